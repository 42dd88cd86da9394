#include "ganlab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "ganlab/bounds.hpp"
#include "ganlab/errors.hpp"
#include "ganlab/parallel.hpp"
#include "ganlab/stats.hpp"

namespace ganlab {

std::string error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::theorem1:
            return "theorem1";
        case ErrorKind::sup_gap_arora:
            return "sup_gap_arora";
        case ErrorKind::plugin_zhang:
            return "plugin_zhang";
        case ErrorKind::plugin_ji:
            return "plugin_ji";
        case ErrorKind::expectation_liang:
            return "expectation_liang";
    }
    return "?";
}

ErrorKind error_kind_from_name(const std::string& name) {
    if (name == "theorem1") return ErrorKind::theorem1;
    if (name == "sup_gap_arora") return ErrorKind::sup_gap_arora;
    if (name == "plugin_zhang") return ErrorKind::plugin_zhang;
    if (name == "plugin_ji") return ErrorKind::plugin_ji;
    if (name == "expectation_liang") return ErrorKind::expectation_liang;
    throw ConfigError("unknown error_kind '" + name +
                      "' (kinds: theorem1, sup_gap_arora, plugin_zhang, plugin_ji, "
                      "expectation_liang)");
}

bool error_kind_uses_m(ErrorKind k) {
    return k == ErrorKind::theorem1 || k == ErrorKind::sup_gap_arora || k == ErrorKind::plugin_ji;
}

void ExperimentConfig::validate() const {
    if (n_grid.empty()) throw ConfigError("n_grid must not be empty");
    for (long n : n_grid) {
        if (n < 1) throw ConfigError("n_grid entries must be positive");
    }
    for (std::size_t i = 1; i < n_grid.size(); ++i) {
        if (n_grid[i] <= n_grid[i - 1]) {
            throw ConfigError("n_grid must be strictly ascending");
        }
    }
    if (error_kind_uses_m(error_kind)) {
        if (!m_grid.empty() && m_grid != n_grid) {
            throw ConfigError("two-sample error kinds run with m = n; m_grid must equal n_grid "
                              "or be omitted");
        }
    } else if (!m_grid.empty()) {
        throw ConfigError("error kind " + error_kind_name(error_kind) +
                          " uses only n; m_grid must be omitted");
    }
    if (replicates < 1) throw ConfigError("replicates must be positive");
    if (n_pop < 1) throw ConfigError("n_pop must be positive");
    if (epsilon_slack < 0.0) throw ConfigError("epsilon_slack must be nonnegative");
    if (error_kind == ErrorKind::sup_gap_arora && inf_method != Method::grid) {
        throw ConfigError("sup_gap_arora takes a sup over the theta grid; inf_method must be grid");
    }
    fspec.require_discriminator();
    if (sup_method == Method::grid && fspec.parameter_count() > grid.param_cap) {
        throw ConfigError("grid sup selected but the discriminator has " +
                          std::to_string(fspec.parameter_count()) +
                          " parameters, above the cap of " + std::to_string(grid.param_cap));
    }
    if (inf_method == Method::grid && gspec.parameter_count() > grid.param_cap) {
        throw ConfigError("grid inf selected but the generator has " +
                          std::to_string(gspec.parameter_count()) +
                          " parameters, above the cap of " + std::to_string(grid.param_cap));
    }
    if (target.dimension() != fspec.input_dim()) {
        throw ConfigError("target distribution dimension " + std::to_string(target.dimension()) +
                          " does not match discriminator input " +
                          std::to_string(fspec.input_dim()));
    }
    if (base.dimension() != gspec.input_dim()) {
        throw ConfigError("base distribution dimension " + std::to_string(base.dimension()) +
                          " does not match generator input " + std::to_string(gspec.input_dim()));
    }
    // Envelope precheck: rejects measuring functions whose domain cannot
    // cover the intervals the classes can reach.
    compute_bound_report(fspec, gspec, phi, target.norm_radius(), base.norm_radius());
}

namespace {

struct PopulationPass {
    ObjectiveEvaluator evaluator;
    double inf_value = 0.0;
    std::vector<double> theta_table;  // d_pop per theta grid point (grid inf only)
    bool have_table = false;
};

OptimOptions make_sup_options(const ExperimentConfig& c, std::uint64_t seed) {
    OptimOptions o;
    o.method = c.sup_method;
    o.grid = c.grid;
    o.pgd = c.pgd;
    o.seed = seed;
    return o;
}

InfOptions make_inf_options(const ExperimentConfig& c, std::uint64_t seed, double slack) {
    InfOptions o;
    o.method = c.inf_method;
    o.grid = c.grid;
    o.pgd = c.pgd;
    o.sup = make_sup_options(c, derive_seed(seed, {17}));
    o.epsilon_slack = slack;
    o.seed = seed;
    return o;
}

PopulationPass run_population_pass(const ExperimentConfig& c, const ObjectiveInstance& inst,
                                   ExperimentResult& result) {
    auto sides = make_population_sides(inst, c.target, c.base, c.n_pop,
                                       derive_seed(c.master_seed, {1}), c.population_method);
    result.x_population_method = side_method_name(sides.first.method);
    result.z_population_method = side_method_name(sides.second.method);
    result.population_pool_size = static_cast<long>(
        std::max(sides.first.points.size(), sides.second.points.size()));
    result.notes.push_back("population sides: x=" + result.x_population_method +
                           " (" + std::to_string(sides.first.points.size()) + " points), z=" +
                           result.z_population_method + " (" +
                           std::to_string(sides.second.points.size()) + " points)");
    result.notes.push_back(
        "weight sampling law: i.i.d. uniform entries rescaled to a uniform radius, "
        "supported on the whole ball");

    PopulationPass pass{ObjectiveEvaluator::population(inst, std::move(sides.first),
                                                       std::move(sides.second)),
                        0.0,
                        {},
                        false};

    const std::uint64_t pop_seed = derive_seed(c.master_seed, {1, 2});
    if (c.inf_method == Method::grid) {
        // One sweep fills both the per-theta table (needed by the arora kind)
        // and the infimum.
        long long table_size = 1;
        for (long long i = 0; i < c.gspec.parameter_count(); ++i) {
            table_size *= c.grid.points_per_param;
            if (table_size > 5'000'000) {
                throw NumericError("theta grid too large to tabulate; reduce grid points or "
                                   "generator parameters");
            }
        }
        pass.theta_table.reserve(static_cast<std::size_t>(table_size));
        OptimOptions sup_opt = make_sup_options(c, derive_seed(pop_seed, {0}));
        enumerate_grid(c.gspec, c.grid, [&](const WeightAssignment& theta) {
            double v = sup_over_w(pass.evaluator, theta, sup_opt).value;
            if (sup_opt.method == Method::pgd &&
                c.fspec.parameter_count() <= c.grid.param_cap) {
                // same flooring convention as inf_over_theta
                OptimOptions g = sup_opt;
                g.method = Method::grid;
                v = std::max(v, sup_over_w(pass.evaluator, theta, g).value);
            }
            pass.theta_table.push_back(v);
        });
        pass.have_table = true;
        pass.inf_value = *std::min_element(pass.theta_table.begin(), pass.theta_table.end());
    } else {
        InfOptions inf_opt = make_inf_options(c, pop_seed, 0.0);
        pass.inf_value = inf_over_theta(pass.evaluator, inf_opt).value;
    }
    return pass;
}

}  // namespace

ExperimentResult run_error_experiment(const ExperimentConfig& config) {
    config.validate();
    const ObjectiveInstance inst = config.instance();
    ExperimentResult result;

    const PopulationPass pop = run_population_pass(config, inst, result);
    result.population_inf = pop.inf_value;

    const std::size_t grid_count = config.n_grid.size();
    const std::size_t reps = static_cast<std::size_t>(config.replicates);
    const std::size_t total = grid_count * reps;
    std::vector<GapRecord> slots(total);

    parallel_for(total, config.threads, [&](std::size_t task) {
        const std::size_t i = task / reps;
        const int r = static_cast<int>(task % reps);
        const long n = config.n_grid[i];
        const long m = error_kind_uses_m(config.error_kind) ? n : 0;
        const std::uint64_t seed =
            derive_seed(config.master_seed, {2, static_cast<std::uint64_t>(i),
                                             static_cast<std::uint64_t>(r)});
        const auto t0 = std::chrono::steady_clock::now();

        const SampleSet data = draw_samples(config.target, config.base, n, m, seed);
        GapRecord rec;
        rec.error_kind = config.error_kind;
        rec.n = n;
        rec.m = m;
        rec.replicate = r;
        rec.abs_mode = config.abs_mode;
        rec.sup_method = config.sup_method;
        rec.inf_method = config.inf_method;
        rec.seed = seed;

        switch (config.error_kind) {
            case ErrorKind::theorem1: {
                const ObjectiveEvaluator emp = ObjectiveEvaluator::from_samples(inst, data);
                const InfOptions io = make_inf_options(config, derive_seed(seed, {10}), 0.0);
                const double emp_inf = inf_over_theta(emp, io).value;
                rec.gap = std::abs(emp_inf - pop.inf_value);
                break;
            }
            case ErrorKind::sup_gap_arora: {
                const ObjectiveEvaluator emp = ObjectiveEvaluator::from_samples(inst, data);
                const OptimOptions so = make_sup_options(config, derive_seed(seed, {11}));
                double worst = 0.0;
                std::size_t k = 0;
                enumerate_grid(config.gspec, config.grid, [&](const WeightAssignment& theta) {
                    const double emp_d = sup_over_w(emp, theta, so).value;
                    worst = std::max(worst, std::abs(emp_d - pop.theta_table[k]));
                    ++k;
                });
                rec.gap = worst;
                break;
            }
            case ErrorKind::plugin_zhang:
            case ErrorKind::expectation_liang: {
                const ObjectiveEvaluator half =
                    ObjectiveEvaluator::half(inst, data, pop.evaluator.z_side());
                const InfOptions io =
                    make_inf_options(config, derive_seed(seed, {10}), config.epsilon_slack);
                const InfResult sel = inf_over_theta(half, io);
                const OptimOptions so = make_sup_options(config, derive_seed(seed, {11}));
                const double d_pop_at =
                    pop.have_table && sel.grid_index >= 0
                        ? pop.theta_table[static_cast<std::size_t>(sel.grid_index)]
                        : sup_over_w(pop.evaluator, sel.theta, so).value;
                rec.gap = d_pop_at - pop.inf_value;
                break;
            }
            case ErrorKind::plugin_ji: {
                const ObjectiveEvaluator emp = ObjectiveEvaluator::from_samples(inst, data);
                const InfOptions io = make_inf_options(config, derive_seed(seed, {10}), 0.0);
                const InfResult sel = inf_over_theta(emp, io);
                const OptimOptions so = make_sup_options(config, derive_seed(seed, {11}));
                const double d_pop_at =
                    pop.have_table && sel.grid_index >= 0
                        ? pop.theta_table[static_cast<std::size_t>(sel.grid_index)]
                        : sup_over_w(pop.evaluator, sel.theta, so).value;
                rec.gap = d_pop_at - pop.inf_value;
                break;
            }
        }
        rec.flagged_negative = rec.gap < 0.0;
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        slots[task] = rec;
    });

    // Non-finite gaps abort their grid point with a diagnostic note; finite
    // records keep their deterministic (n, replicate) order.
    for (std::size_t i = 0; i < grid_count; ++i) {
        std::size_t bad = reps;
        for (std::size_t r = 0; r < reps; ++r) {
            if (!std::isfinite(slots[i * reps + r].gap)) {
                bad = r;
                break;
            }
        }
        if (bad < reps) {
            result.notes.push_back("grid point n=" + std::to_string(config.n_grid[i]) +
                                   " aborted at replicate " + std::to_string(bad) +
                                   ": non-finite gap");
        }
        for (std::size_t r = 0; r < bad; ++r) result.records.push_back(slots[i * reps + r]);
    }
    return result;
}

// --- rate fitting ----------------------------------------------------------

std::string regressor_name(RegressorKind k) {
    return k == RegressorKind::log_sqrt_logn_over_n ? "log_sqrt_logn_over_n" : "log_n";
}

RegressorKind regressor_from_name(const std::string& name) {
    if (name == "log_sqrt_logn_over_n") return RegressorKind::log_sqrt_logn_over_n;
    if (name == "log_n") return RegressorKind::log_n;
    throw ConfigError("unknown regressor '" + name +
                      "' (kinds: log_sqrt_logn_over_n, log_n)");
}

namespace {

double regressor_value(RegressorKind kind, long n) {
    const double dn = static_cast<double>(n);
    return kind == RegressorKind::log_sqrt_logn_over_n ? 0.5 * (std::log(std::log(dn)) - std::log(dn))
                                                       : std::log(dn);
}

}  // namespace

RateFit fit_rate(const std::vector<GapRecord>& records, RegressorKind kind, bool use_mean) {
    std::map<long, std::vector<double>> by_n;
    for (const GapRecord& r : records) by_n[r.n].push_back(r.gap);

    RateFit fit;
    fit.regressor = kind;
    std::vector<double> xs, ys;
    for (const auto& [n, gaps] : by_n) {
        RatePoint p;
        p.n = n;
        p.summary_gap = use_mean ? mean(gaps) : median(gaps);
        p.q25 = quantile(gaps, 0.25);
        p.q75 = quantile(gaps, 0.75);
        p.excluded = !(p.summary_gap > 0.0) || n < 2;
        if (!p.excluded) {
            xs.push_back(regressor_value(kind, n));
            ys.push_back(std::log(p.summary_gap));
        }
        fit.points.push_back(p);
    }
    if (xs.size() < 3) {
        throw NumericError("rate fit needs at least 3 grid points with positive " +
                           std::string(use_mean ? "mean" : "median") + " gaps; have " +
                           std::to_string(xs.size()));
    }
    const OlsFit ols = ordinary_least_squares(xs, ys);
    fit.slope = ols.slope;
    fit.intercept = ols.intercept;
    fit.r_squared = ols.r_squared;
    fit.points_used = static_cast<int>(xs.size());
    for (RatePoint& p : fit.points) {
        p.predicted =
            p.n >= 2 ? std::exp(fit.intercept + fit.slope * regressor_value(kind, p.n)) : 0.0;
    }
    return fit;
}

// --- decomposition check -----------------------------------------------

DecompositionRecord verify_decomposition(const ObjectiveInstance& inst, const SampleSet& data,
                                         const SidePoints& x_population,
                                         const SidePoints& z_population, const GridOptions& grid) {
    if (!inst.abs_mode) {
        throw ConfigError("the decomposition bound concerns the absolute-value objective; "
                          "abs_mode must be on");
    }
    const ObjectiveEvaluator emp = ObjectiveEvaluator::from_samples(inst, data);
    const ObjectiveEvaluator pop =
        ObjectiveEvaluator::population(inst, x_population, z_population);

    OptimOptions sup_opt;
    sup_opt.method = Method::grid;
    sup_opt.grid = grid;
    InfOptions inf_opt;
    inf_opt.method = Method::grid;
    inf_opt.grid = grid;
    inf_opt.sup = sup_opt;

    DecompositionRecord rec;
    const double inf_emp = inf_over_theta(emp, inf_opt).value;
    const double inf_pop = inf_over_theta(pop, inf_opt).value;
    rec.lhs = std::abs(inf_emp - inf_pop);

    // sup over (theta, w) of the generator-side deviation, then sup over w of
    // the target-side deviation; all on the same grids as the infima.
    double term1 = 0.0;
    enumerate_grid(inst.gspec, grid, [&](const WeightAssignment& theta) {
        const ObjectiveEvaluator::ThetaBound be = emp.bind_theta(theta);
        const ObjectiveEvaluator::ThetaBound bp = pop.bind_theta(theta);
        enumerate_grid(inst.fspec, grid, [&](const WeightAssignment& w) {
            term1 = std::max(term1, std::abs(be.z_term(w) - bp.z_term(w)));
        });
    });
    double term2 = 0.0;
    {
        const WeightAssignment theta0 = zero_weights(inst.gspec);
        const ObjectiveEvaluator::ThetaBound be = emp.bind_theta(theta0);
        const ObjectiveEvaluator::ThetaBound bp = pop.bind_theta(theta0);
        enumerate_grid(inst.fspec, grid, [&](const WeightAssignment& w) {
            term2 = std::max(term2, std::abs(be.x_term(w) - bp.x_term(w)));
        });
    }
    rec.rhs_term1 = term1;
    rec.rhs_term2 = term2;
    rec.slack = term1 + term2 - rec.lhs;
    return rec;
}

// --- dyadic blocking ---------------------------------------------------

std::vector<DyadicBlock> dyadic_blocking_summary(const std::vector<GapRecord>& records,
                                                 std::vector<std::string>* notes) {
    std::map<int, DyadicBlock> blocks;
    for (const GapRecord& r : records) {
        if (r.n < 2) {
            if (notes != nullptr) {
                notes->push_back("record with n=" + std::to_string(r.n) +
                                 " skipped: rate normalization needs n >= 2");
            }
            continue;
        }
        // block k holds n in (2^{k-1}, 2^k]
        int k = 1;
        while ((1L << k) < r.n) ++k;
        const double normalized =
            r.gap * std::sqrt(static_cast<double>(r.n) / std::log(static_cast<double>(r.n)));
        auto [it, fresh] = blocks.try_emplace(k);
        DyadicBlock& b = it->second;
        if (fresh) {
            b.k = k;
            b.lo = 1L << (k - 1);
            b.hi = 1L << k;
            b.max_normalized = normalized;
        } else {
            b.max_normalized = std::max(b.max_normalized, normalized);
        }
        ++b.count;
    }
    if (blocks.size() < 2) {
        throw NumericError("dyadic summary needs records spanning at least 2 dyadic blocks");
    }
    std::vector<DyadicBlock> out;
    int prev_k = 0;
    for (const auto& [k, b] : blocks) {
        if (prev_k != 0 && notes != nullptr) {
            for (int missing = prev_k + 1; missing < k; ++missing) {
                notes->push_back("dyadic block k=" + std::to_string(missing) +
                                 " empty, skipped");
            }
        }
        prev_k = k;
        out.push_back(b);
    }
    return out;
}

}  // namespace ganlab
