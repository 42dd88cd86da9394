#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ganlab/objective.hpp"

namespace ganlab {

enum class Method { pgd, grid };
std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct GridOptions {
    int points_per_param = 201;  // per scalar parameter, endpoints included
    long long param_cap = 3;     // grid refuses networks with more parameters
};

struct PgdOptions {
    int restarts = 20;
    int iterations = 500;
    double step0 = 0.1;
    double decay = 0.99;  // geometric step decay per iteration
};

struct OptimOptions {
    Method method = Method::pgd;
    GridOptions grid;
    PgdOptions pgd;
    std::uint64_t seed = 0;  // stream for pgd restarts
};

struct SupDiagnostics {
    int restarts_used = 0;
    int iterations = 0;
    int best_restart = -1;
    bool converged = false;
    long long grid_points = 0;
};

struct SupResult {
    double value = 0.0;
    WeightAssignment argmax;
    Method method = Method::grid;
    SupDiagnostics diagnostics;
};

/// Abstract objective over one constrained weight set.
struct BlockObjective {
    virtual double value(const WeightAssignment& w) const = 0;
    virtual double value_and_grad(const WeightAssignment& w, BackpropResult& grad) const = 0;
    virtual ~BlockObjective() = default;
};

/// Maximizes a block objective over the spec's Frobenius balls. The grid
/// oracle enumerates a tensor grid over all entries (each layer radially
/// projected onto its ball) and is exact on the grid; pgd runs multi-restart
/// projected subgradient ascent. Both return feasible points, so the value is
/// a lower bound on the true sup by construction. Ties break toward the
/// first point in row-major grid order. Suprema are taken over parameterized
/// continua of weights; the objectives are continuous in the weights, so
/// restricting to countable dense subsets would not change any value.
SupResult maximize_over_weights(const NetworkSpec& spec, const BlockObjective& obj,
                                const OptimOptions& opt);

/// Streams every grid point (scratch reused) to the callback; throws when the
/// parameter count exceeds the cap.
void enumerate_grid(const NetworkSpec& spec, const GridOptions& opt,
                    const std::function<void(const WeightAssignment&)>& fn);

/// Full cell diagonal of the grid, used for the one-cell Lipschitz slack
/// U_w * delta_grid that pgd may exceed the grid oracle by.
double grid_cell_diagonal(const NetworkSpec& spec, const GridOptions& opt);

// --- objective-specific entry points ------------------------------------

/// sup over the discriminator ball of the objective at fixed theta.
SupResult sup_over_w(const ObjectiveEvaluator& ev, const WeightAssignment& theta,
                     const OptimOptions& opt);

/// The distance value itself: sup_over_w(...).value.
double distance_value(const ObjectiveEvaluator& ev, const WeightAssignment& theta,
                      const OptimOptions& opt);

struct InfOptions {
    Method method = Method::grid;  // how theta is searched
    GridOptions grid;
    PgdOptions pgd;
    OptimOptions sup;            // inner sup configuration
    double epsilon_slack = 0.0;  // approximate minimizer: first grid point within slack
    /// With a grid theta search and a pgd inner sup, also evaluate the grid
    /// inner sup per theta and keep the larger, so the reported value never
    /// drops below the all-grid infimum. Only applies when the discriminator
    /// fits the grid cap.
    bool floor_pgd_sup_with_grid = true;
    std::uint64_t seed = 0;
};

struct InfResult {
    WeightAssignment theta;
    double value = 0.0;
    SupResult inner;         // sup result at the reported theta
    long grid_index = -1;    // row-major index when theta came from a grid
};

/// inf over the generator ball of the sup-distance.
InfResult inf_over_theta(const ObjectiveEvaluator& ev, const InfOptions& opt);

// --- Rademacher complexity ----------------------------------------------

enum class RademacherClass { discriminator, composed };

struct RademacherOptions {
    OptimOptions optim;
    RademacherClass cls = RademacherClass::discriminator;
    /// Optional transform of the network output inside the correlation sum.
    std::optional<MeasuringFunction> phi;
};

/// Monte Carlo estimate of E[ sup_w (2/n) sum_i tau_i f_w(p_i) ] with
/// tau uniform on {-1,+1}; for the composed class the sup runs jointly over
/// (w, theta) and the points feed the generator.
double rademacher_estimate(const NetworkSpec& fspec, const NetworkSpec* gspec,
                           const std::vector<Vector>& points, int replicates,
                           const RademacherOptions& opt, std::uint64_t seed);

}  // namespace ganlab
