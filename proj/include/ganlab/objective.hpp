#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ganlab/distribution.hpp"
#include "ganlab/nets.hpp"

namespace ganlab {

/// Which objective is being evaluated: the fully empirical two-sample
/// version, the half-empirical version (population generator term, empirical
/// target term), or the population version.
enum class Variant { empirical_mn, half_empirical, population };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// How population expectations are realized.
enum class PopulationMethod { automatic, plugin };

/// How one side of the objective is represented. Every expectation here is a
/// finite average over `points`:
///   samples        - the empirical measure of a drawn SampleSet,
///   plugin_pool    - a large fresh pool standing in for the population,
///   finite_support - the exact support of an empirical law (exact),
///   mean_point     - a single mean point, exact when the integrand is
///                    affine (identity phi and linear networks).
enum class SideMethod { samples, plugin_pool, finite_support, mean_point };

std::string side_method_name(SideMethod m);

struct SidePoints {
    std::vector<Vector> points;
    SideMethod method = SideMethod::samples;
    Vector mean;

    static SidePoints from_points(std::vector<Vector> pts, SideMethod method);
};

/// The function classes, measuring function, and sign convention of one
/// objective. abs_mode=true is the |.| - 2*phi(1/2) form; abs_mode=false is
/// the signed neural-network-distance form, identity phi only.
struct ObjectiveInstance {
    NetworkSpec fspec;
    NetworkSpec gspec;
    MeasuringFunction phi = MeasuringFunction::identity();
    bool abs_mode = true;
};

/// Builds the population representations of (target law, base law), sharing
/// one derivation seed so that a plug-in population with pool size N and an
/// empirical evaluation with n = m = N on the same seed are the same
/// computation. Exact representations (finite support, mean point) are used
/// when admissible unless method forces plug-in.
std::pair<SidePoints, SidePoints> make_population_sides(const ObjectiveInstance& inst,
                                                        const DistributionSpec& target,
                                                        const DistributionSpec& base, long n_pop,
                                                        std::uint64_t seed,
                                                        PopulationMethod method);

/// Evaluates the objective for fixed data at any (theta, w). Detects exact
/// linearity shortcuts: with identity phi and a linear discriminator, sample
/// averages of the two terms collapse onto means, which turns the per-point
/// cost of a grid sweep into O(1).
class ObjectiveEvaluator {
public:
    ObjectiveEvaluator(ObjectiveInstance inst, Variant variant, SidePoints x_side,
                       SidePoints z_side);

    static ObjectiveEvaluator from_samples(ObjectiveInstance inst, const SampleSet& data);
    static ObjectiveEvaluator half(ObjectiveInstance inst, const SampleSet& data,
                                   SidePoints z_population);
    static ObjectiveEvaluator population(ObjectiveInstance inst, SidePoints x_population,
                                         SidePoints z_population);

    const ObjectiveInstance& instance() const { return inst_; }
    Variant variant() const { return variant_; }
    const SidePoints& x_side() const { return x_side_; }
    const SidePoints& z_side() const { return z_side_; }
    bool fast_path() const { return f_linear_; }

    /// Fixes theta, precomputing generator pushforwards, so the discriminator
    /// can be swept cheaply.
    class ThetaBound {
    public:
        /// Full objective value at w.
        double value(const WeightAssignment& w) const;
        /// Objective value and subgradient w.r.t. the discriminator weights.
        double value_and_grad_w(const WeightAssignment& w, BackpropResult& grad) const;
        /// mean over the z side of phi(1 - f_w(g_theta(z))).
        double z_term(const WeightAssignment& w) const;
        /// mean over the x side of phi(f_w(x)).
        double x_term(const WeightAssignment& w) const;

    private:
        friend class ObjectiveEvaluator;
        const ObjectiveEvaluator* ev_ = nullptr;
        std::vector<Vector> pushed_;  // general path: g_theta(z_j) for all j
        Vector pushed_mean_;          // fast path: mean of the above
        mutable ForwardWorkspace ws_;
    };

    ThetaBound bind_theta(const WeightAssignment& theta) const;

    double value(const WeightAssignment& theta, const WeightAssignment& w) const;

    /// Objective value and subgradient w.r.t. the generator weights at fixed w.
    double value_and_grad_theta(const WeightAssignment& theta, const WeightAssignment& w,
                                BackpropResult& grad) const;

private:
    double assemble(double z_term, double x_term) const;

    ObjectiveInstance inst_;
    Variant variant_;
    SidePoints x_side_;
    SidePoints z_side_;
    bool f_linear_ = false;  // identity phi and linear discriminator
    bool g_linear_ = false;
    double two_phi_half_ = 0.0;
};

/// One-shot evaluation of the objective at (theta, w); the simple entry
/// point behind which the evaluator machinery sits.
double objective_at(const ObjectiveInstance& inst, const WeightAssignment& theta,
                    const WeightAssignment& w, Variant variant, const SampleSet& data);
double objective_at(const ObjectiveInstance& inst, const WeightAssignment& theta,
                    const WeightAssignment& w, Variant variant, const DistributionSpec& target,
                    const DistributionSpec& base, long n_pop, std::uint64_t seed,
                    PopulationMethod method = PopulationMethod::automatic,
                    const SampleSet* data = nullptr);

}  // namespace ganlab
