#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ganlab/optimizer.hpp"

namespace ganlab {

/// The five generalization-error definitions the lab measures.
///   theorem1         |inf_theta d_emp(n,m) - inf_theta d_pop|
///   sup_gap_arora    sup_theta |d_emp(theta) - d_pop(theta)|
///   plugin_zhang     d_pop(theta_hat) - inf_theta d_pop, theta_hat from the
///                    half-empirical objective (population generator term)
///   plugin_ji        same with theta from the fully empirical objective
///   expectation_liang plugin_zhang gaps whose summary statistic is the
///                    replicate mean instead of the median
enum class ErrorKind { theorem1, sup_gap_arora, plugin_zhang, plugin_ji, expectation_liang };

std::string error_kind_name(ErrorKind k);
ErrorKind error_kind_from_name(const std::string& name);
/// plugin_zhang and expectation_liang use only the target sample size.
bool error_kind_uses_m(ErrorKind k);

struct ExperimentConfig {
    ErrorKind error_kind = ErrorKind::theorem1;
    NetworkSpec fspec;
    NetworkSpec gspec;
    MeasuringFunction phi = MeasuringFunction::identity();
    DistributionSpec target = DistributionSpec::uniform_ball(1, 1.0);
    DistributionSpec base = DistributionSpec::uniform_ball(1, 1.0);
    std::vector<long> n_grid;
    std::vector<long> m_grid;  // empty means m = n for two-sample kinds
    int replicates = 200;
    long n_pop = 100000;
    Method sup_method = Method::pgd;
    Method inf_method = Method::pgd;
    bool abs_mode = true;
    std::uint64_t master_seed = 0;
    double epsilon_slack = 0.0;
    GridOptions grid;
    PgdOptions pgd;
    PopulationMethod population_method = PopulationMethod::automatic;
    int threads = 0;

    void validate() const;
    ObjectiveInstance instance() const { return {fspec, gspec, phi, abs_mode}; }
};

struct GapRecord {
    ErrorKind error_kind = ErrorKind::theorem1;
    long n = 0;
    long m = 0;
    int replicate = 0;
    double gap = 0.0;
    bool abs_mode = true;
    Method sup_method = Method::grid;
    Method inf_method = Method::grid;
    std::uint64_t seed = 0;
    bool flagged_negative = false;  // plugin gap below zero (inner-optimizer slack), kept unclipped
    double wall_seconds = 0.0;
};

struct ExperimentResult {
    std::vector<GapRecord> records;
    std::vector<std::string> notes;  // aborted grid points, population metadata
    double population_inf = 0.0;
    std::string x_population_method;
    std::string z_population_method;
    long population_pool_size = 0;
};

/// Runs the full grid: one population pass (reused across replicates), then
/// fresh samples per (grid point, replicate) on derived streams. Fully
/// deterministic given the master seed, independent of thread count.
ExperimentResult run_error_experiment(const ExperimentConfig& config);

// --- rate fitting ----------------------------------------------------------

enum class RegressorKind { log_sqrt_logn_over_n, log_n };
std::string regressor_name(RegressorKind k);
RegressorKind regressor_from_name(const std::string& name);

struct RatePoint {
    long n = 0;
    double summary_gap = 0.0;  // median (or mean for expectation_liang)
    double q25 = 0.0;
    double q75 = 0.0;
    double predicted = 0.0;  // exp(intercept + slope * regressor)
    bool excluded = false;   // nonpositive summary, reported but not fitted
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    RegressorKind regressor = RegressorKind::log_sqrt_logn_over_n;
    int points_used = 0;
    std::vector<RatePoint> points;
};

/// OLS of log(summary gap at n) against the regressor. use_mean selects the
/// replicate mean as the per-n summary (the expectation-style error);
/// default is the median. Needs >= 3 usable points.
RateFit fit_rate(const std::vector<GapRecord>& records, RegressorKind kind, bool use_mean = false);

// --- decomposition check -----------------------------------------------

struct DecompositionRecord {
    double lhs = 0.0;        // |inf_theta d_emp - inf_theta d_pop|
    double rhs_term1 = 0.0;  // sup_u |empirical h mean - population h mean|
    double rhs_term2 = 0.0;  // sup_w |empirical f1 mean - population f1 mean|
    double slack = 0.0;      // rhs - lhs, nonnegative on every instance
};

/// Verifies the inf-difference bound with every sup/inf grid-computed and the
/// same population representation on both sides, which makes the inequality
/// an exact finite-max statement.
DecompositionRecord verify_decomposition(const ObjectiveInstance& inst, const SampleSet& data,
                                         const SidePoints& x_population,
                                         const SidePoints& z_population, const GridOptions& grid);

// --- dyadic blocking ---------------------------------------------------

struct DyadicBlock {
    int k = 0;  // block (2^{k-1}, 2^k]
    long lo = 0;
    long hi = 0;
    double max_normalized = 0.0;  // max over the block of gap * sqrt(n / ln n)
    long count = 0;
};

/// Groups records by dyadic block of n and reports the per-block maximum of
/// the rate-normalized gap; bounded maxima across blocks support the claimed
/// rate. Records need to span at least two blocks.
std::vector<DyadicBlock> dyadic_blocking_summary(const std::vector<GapRecord>& records,
                                                 std::vector<std::string>* notes = nullptr);

}  // namespace ganlab
