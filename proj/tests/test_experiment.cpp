#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ganlab/errors.hpp"
#include "ganlab/experiment.hpp"
#include "ganlab/stats.hpp"

using namespace ganlab;

namespace {

NetworkSpec scalar_net(double bound = 1.0) { return NetworkSpec({1, 1}, {bound}, {}); }

WeightAssignment scalar_w(double v) {
    WeightAssignment w;
    w.matrices.push_back(Matrix(1, 1, {v}));
    return w;
}

ExperimentConfig toy_config(ErrorKind kind, std::vector<long> grid, int replicates,
                            std::uint64_t seed) {
    ExperimentConfig c;
    c.error_kind = kind;
    c.fspec = scalar_net();
    c.gspec = scalar_net();
    const bool plugin = kind == ErrorKind::plugin_zhang || kind == ErrorKind::plugin_ji ||
                        kind == ErrorKind::expectation_liang;
    c.base = plugin ? DistributionSpec::empirical({{0.1}, {1.9}})
                    : DistributionSpec::uniform_ball(1, 1.0);
    c.target = DistributionSpec::pushforward(scalar_net(), scalar_w(0.7), c.base);
    c.n_grid = std::move(grid);
    c.replicates = replicates;
    c.sup_method = Method::grid;
    c.inf_method = Method::grid;
    c.master_seed = seed;
    return c;
}

std::vector<GapRecord> synthetic_records(const std::vector<long>& ns, double scale,
                                         double offset = 0.0) {
    std::vector<GapRecord> records;
    for (long n : ns) {
        GapRecord r;
        r.n = n;
        r.m = n;
        r.gap = offset + scale * std::sqrt(std::log(static_cast<double>(n)) / n);
        records.push_back(r);
    }
    return records;
}

}  // namespace

TEST_CASE("identical config and master seed give identical records") {
    const ExperimentConfig c = toy_config(ErrorKind::theorem1, {16, 32}, 5, 2024);
    const ExperimentResult a = run_error_experiment(c);
    ExperimentConfig c2 = c;
    c2.threads = 2;
    const ExperimentResult b = run_error_experiment(c2);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].gap == b.records[i].gap);
        CHECK(a.records[i].n == b.records[i].n);
        CHECK(a.records[i].replicate == b.records[i].replicate);
        CHECK(a.records[i].seed == b.records[i].seed);
    }
}

TEST_CASE("matched realizable theorem1 run: population inf 0 and nonnegative gaps") {
    const ExperimentConfig c = toy_config(ErrorKind::theorem1, {16, 64}, 10, 7);
    const ExperimentResult r = run_error_experiment(c);
    CHECK(r.population_inf == 0.0);
    CHECK(r.x_population_method == "mean_point");
    CHECK(r.records.size() == 20);
    for (const GapRecord& rec : r.records) CHECK(rec.gap >= 0.0);
}

TEST_CASE("scalar toy medians decrease with n") {
    const ExperimentConfig c =
        toy_config(ErrorKind::theorem1, {64, 128, 256, 512, 1024}, 100, 99);
    const ExperimentResult r = run_error_experiment(c);
    std::vector<double> ns, medians;
    for (long n : c.n_grid) {
        std::vector<double> gaps;
        for (const GapRecord& rec : r.records) {
            if (rec.n == n) gaps.push_back(rec.gap);
        }
        ns.push_back(static_cast<double>(n));
        medians.push_back(median(gaps));
    }
    CHECK(spearman(ns, medians) <= -0.9);
}

TEST_CASE("expectation_liang records equal plugin_zhang records at the same seed") {
    const ExperimentConfig zc = toy_config(ErrorKind::plugin_zhang, {32, 64}, 6, 13);
    ExperimentConfig lc = zc;
    lc.error_kind = ErrorKind::expectation_liang;
    const ExperimentResult z = run_error_experiment(zc);
    const ExperimentResult l = run_error_experiment(lc);
    REQUIRE(z.records.size() == l.records.size());
    for (std::size_t i = 0; i < z.records.size(); ++i) {
        CHECK(z.records[i].gap == l.records[i].gap);
    }
}

TEST_CASE("plugin gaps are nonnegative under grid methods") {
    for (ErrorKind kind : {ErrorKind::plugin_zhang, ErrorKind::plugin_ji}) {
        const ExperimentConfig c = toy_config(kind, {32, 128}, 20, 17);
        const ExperimentResult r = run_error_experiment(c);
        for (const GapRecord& rec : r.records) {
            CHECK(rec.gap >= 0.0);
            CHECK_FALSE(rec.flagged_negative);
        }
    }
}

TEST_CASE("sup_gap_arora gaps are nonnegative and the kind validates its methods") {
    ExperimentConfig c = toy_config(ErrorKind::sup_gap_arora, {32, 64}, 5, 23);
    const ExperimentResult r = run_error_experiment(c);
    for (const GapRecord& rec : r.records) CHECK(rec.gap >= 0.0);
    c.inf_method = Method::pgd;
    CHECK_THROWS_AS(run_error_experiment(c), ConfigError);
}

TEST_CASE("config validation rejects malformed grids") {
    ExperimentConfig c = toy_config(ErrorKind::theorem1, {64, 32}, 5, 1);
    CHECK_THROWS_AS(c.validate(), ConfigError);  // unsorted
    c = toy_config(ErrorKind::theorem1, {}, 5, 1);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = toy_config(ErrorKind::plugin_zhang, {32, 64}, 5, 1);
    c.m_grid = {32, 64};
    CHECK_THROWS_AS(c.validate(), ConfigError);  // n-only kind with m_grid
    c = toy_config(ErrorKind::theorem1, {32, 64}, 5, 1);
    c.m_grid = {32, 128};
    CHECK_THROWS_AS(c.validate(), ConfigError);  // m grid must equal n grid
    c.m_grid = {32, 64};
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("rate fit on exact synthetic gaps") {
    const std::vector<long> ns{64, 128, 256, 512, 1024};
    const RateFit unit = fit_rate(synthetic_records(ns, 1.0),
                                  RegressorKind::log_sqrt_logn_over_n);
    CHECK(unit.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(unit.intercept == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(unit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(unit.points_used == 5);

    const RateFit scaled = fit_rate(synthetic_records(ns, 3.0),
                                    RegressorKind::log_sqrt_logn_over_n);
    CHECK(scaled.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(scaled.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-9));

    std::vector<GapRecord> constant;
    for (long n : ns) {
        GapRecord r;
        r.n = n;
        r.gap = 0.25;
        constant.push_back(r);
    }
    const RateFit flat = fit_rate(constant, RegressorKind::log_sqrt_logn_over_n);
    CHECK(flat.slope == doctest::Approx(0.0).epsilon(1e-12));

    // against log n the exact-rate slope is near -1/2
    const RateFit logn = fit_rate(synthetic_records(ns, 1.0), RegressorKind::log_n);
    CHECK(logn.slope < -0.35);
    CHECK(logn.slope > -0.65);
}

TEST_CASE("rate fit excludes nonpositive medians and needs three points") {
    std::vector<GapRecord> records = synthetic_records({64, 128, 256, 512}, 1.0);
    GapRecord zero;
    zero.n = 1024;
    zero.gap = 0.0;
    for (int r = 0; r < 3; ++r) records.push_back(zero);
    const RateFit fit = fit_rate(records, RegressorKind::log_sqrt_logn_over_n);
    CHECK(fit.points_used == 4);
    bool found_excluded = false;
    for (const RatePoint& p : fit.points) {
        if (p.n == 1024) {
            CHECK(p.excluded);
            found_excluded = true;
        }
    }
    CHECK(found_excluded);
    CHECK_THROWS_AS(fit_rate(synthetic_records({64, 128}, 1.0),
                             RegressorKind::log_sqrt_logn_over_n),
                    NumericError);
}

TEST_CASE("decomposition bound on the matched toy, including degenerate n = m = 1") {
    const ObjectiveInstance inst{scalar_net(), scalar_net(), MeasuringFunction::identity(), true};
    const DistributionSpec base = DistributionSpec::uniform_ball(1, 1.0);
    const DistributionSpec target =
        DistributionSpec::pushforward(scalar_net(), scalar_w(0.7), base);
    auto sides = make_population_sides(inst, target, base, 10000, 5,
                                       PopulationMethod::automatic);
    GridOptions grid;

    for (long nm : {1L, 10L, 100L}) {
        const SampleSet data = draw_samples(target, base, nm, nm, 1000 + nm);
        const DecompositionRecord rec =
            verify_decomposition(inst, data, sides.first, sides.second, grid);
        CHECK(rec.slack >= 0.0);
        CHECK(rec.lhs <= rec.rhs_term1 + rec.rhs_term2);
    }

    const SampleSet big = draw_samples(target, base, 10000, 10000, 31);
    const DecompositionRecord rec =
        verify_decomposition(inst, big, sides.first, sides.second, grid);
    CHECK(rec.slack >= 0.0);
    CHECK(rec.lhs <= 0.05);
}

TEST_CASE("decomposition requires the absolute-value convention") {
    const ObjectiveInstance inst{scalar_net(), scalar_net(), MeasuringFunction::identity(),
                                 false};
    SampleSet data;
    data.x_samples = {{0.5}};
    data.z_samples = {{0.5}};
    const SidePoints side = SidePoints::from_points({{0.0}}, SideMethod::mean_point);
    CHECK_THROWS_AS(verify_decomposition(inst, data, side, side, GridOptions{}), ConfigError);
}

TEST_CASE("dyadic blocking bookkeeping and exact normalization") {
    const std::vector<long> ns{64, 128, 256, 512, 1024};
    const std::vector<DyadicBlock> blocks =
        dyadic_blocking_summary(synthetic_records(ns, 1.0));
    CHECK(blocks.size() == 5);  // one block per power of two, (2^{k-1}, 2^k]
    CHECK(blocks.front().k == 6);
    CHECK(blocks.back().k == 10);
    for (const DyadicBlock& b : blocks) {
        CHECK(b.max_normalized == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(b.count == 1);
    }

    std::vector<std::string> notes;
    std::vector<GapRecord> with_tiny = synthetic_records(ns, 1.0);
    GapRecord one;
    one.n = 1;
    one.gap = 0.5;
    with_tiny.push_back(one);
    dyadic_blocking_summary(with_tiny, &notes);
    CHECK(notes.size() == 1);

    CHECK_THROWS_AS(dyadic_blocking_summary(synthetic_records({64}, 1.0)), NumericError);
}

TEST_CASE("the runner handles multidimensional discriminators") {
    ExperimentConfig c;
    c.error_kind = ErrorKind::theorem1;
    c.fspec = NetworkSpec({2, 1}, {1.0}, {});
    c.gspec = NetworkSpec({1, 2}, {1.0}, {});
    c.base = DistributionSpec::uniform_ball(1, 1.0);
    WeightAssignment theta_star{{Matrix(2, 1, {0.5, -0.3})}};
    c.target = DistributionSpec::pushforward(c.gspec, theta_star, c.base);
    c.n_grid = {16, 64};
    c.replicates = 4;
    c.sup_method = Method::grid;
    c.inf_method = Method::grid;
    c.grid.points_per_param = 41;
    c.master_seed = 3141;
    const ExperimentResult r = run_error_experiment(c);
    CHECK(r.records.size() == 8);
    CHECK(r.population_inf == 0.0);
    for (const GapRecord& rec : r.records) {
        CHECK(rec.gap >= 0.0);
        CHECK(std::isfinite(rec.gap));
    }
}

TEST_CASE("the runner works with pgd sup and alternating pgd inf") {
    ExperimentConfig c = toy_config(ErrorKind::theorem1, {32}, 3, 555);
    c.sup_method = Method::pgd;
    c.inf_method = Method::pgd;
    c.pgd.restarts = 3;
    c.pgd.iterations = 60;
    const ExperimentResult a = run_error_experiment(c);
    CHECK(a.records.size() == 3);
    for (const GapRecord& rec : a.records) CHECK(std::isfinite(rec.gap));
    // matched linear toy: the population objective vanishes identically, so
    // even the pgd population pass lands on zero
    CHECK(a.population_inf == 0.0);
    const ExperimentResult b = run_error_experiment(c);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].gap == b.records[i].gap);
    }
}

TEST_CASE("plugin kinds run with a pgd inner sup under a grid theta search") {
    ExperimentConfig c = toy_config(ErrorKind::plugin_zhang, {64}, 4, 808);
    c.sup_method = Method::pgd;
    c.pgd.restarts = 4;
    c.pgd.iterations = 80;
    c.grid.points_per_param = 101;
    const ExperimentResult r = run_error_experiment(c);
    CHECK(r.records.size() == 4);
    // the grid floor keeps per-theta values at least the grid sup, so the
    // plug-in gap stays nonnegative
    for (const GapRecord& rec : r.records) CHECK(rec.gap >= -1e-12);
}

TEST_CASE("doubling replicates moves medians less than the interquartile range") {
    const ExperimentConfig half = toy_config(ErrorKind::theorem1, {128}, 50, 77);
    ExperimentConfig full = half;
    full.replicates = 100;
    const ExperimentResult a = run_error_experiment(half);
    const ExperimentResult b = run_error_experiment(full);
    std::vector<double> ga, gb;
    for (const GapRecord& r : a.records) ga.push_back(r.gap);
    for (const GapRecord& r : b.records) gb.push_back(r.gap);
    const double iqr = quantile(gb, 0.75) - quantile(gb, 0.25);
    CHECK(std::abs(median(ga) - median(gb)) <= iqr);
}
