#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ganlab/errors.hpp"
#include "ganlab/objective.hpp"

using namespace ganlab;

namespace {

NetworkSpec scalar_net(double bound = 1.0) { return NetworkSpec({1, 1}, {bound}, {}); }

WeightAssignment scalar_w(double v) {
    WeightAssignment w;
    w.matrices.push_back(Matrix(1, 1, {v}));
    return w;
}

ObjectiveInstance scalar_instance(bool abs_mode = true) {
    return {scalar_net(), scalar_net(), MeasuringFunction::identity(), abs_mode};
}

/// Direct per-sample transcription of the objective, independent of the
/// evaluator's code paths.
double oracle_value(const ObjectiveInstance& inst, const WeightAssignment& theta,
                    const WeightAssignment& w, const std::vector<Vector>& xs,
                    const std::vector<Vector>& zs) {
    double zsum = 0.0;
    for (const Vector& z : zs) {
        const double raw = forward_composed(inst.fspec, w, inst.gspec, theta, z);
        zsum += inst.abs_mode ? inst.phi(1.0 - raw) : raw;
    }
    zsum /= static_cast<double>(zs.size());
    double xsum = 0.0;
    for (const Vector& x : xs) {
        const double raw = forward_discriminator(inst.fspec, w, x);
        xsum += inst.abs_mode ? inst.phi(raw) : raw;
    }
    xsum /= static_cast<double>(xs.size());
    return inst.abs_mode ? std::abs(zsum + xsum) - 2.0 * inst.phi(0.5) : zsum - xsum;
}

}  // namespace

TEST_CASE("hand evaluation of the empirical objective") {
    SampleSet data;
    data.x_samples = {{0.5}};
    data.z_samples = {{0.0}};
    const double v = objective_at(scalar_instance(), scalar_w(0.3), scalar_w(1.0),
                                  Variant::empirical_mn, data);
    CHECK(v == doctest::Approx(0.5).epsilon(1e-15));  // |1 - 0 + 0.5| - 1
}

TEST_CASE("all-zero discriminator gives zero") {
    SampleSet data;
    data.x_samples = {{0.5}, {-0.25}};
    data.z_samples = {{0.7}};
    const double v = objective_at(scalar_instance(), scalar_w(0.4), scalar_w(0.0),
                                  Variant::empirical_mn, data);
    CHECK(v == 0.0);  // |phi(1) + phi(0)| - 2 phi(1/2)
}

TEST_CASE("matched population value is exactly zero on the linear toy") {
    const DistributionSpec base = DistributionSpec::uniform_ball(1, 1.0);
    const DistributionSpec target =
        DistributionSpec::pushforward(scalar_net(), scalar_w(0.7), base);
    const ObjectiveInstance inst = scalar_instance();
    auto sides = make_population_sides(inst, target, base, 1000, 42,
                                       PopulationMethod::automatic);
    CHECK(sides.first.method == SideMethod::mean_point);
    CHECK(sides.second.method == SideMethod::mean_point);
    const ObjectiveEvaluator ev =
        ObjectiveEvaluator::population(inst, sides.first, sides.second);
    RngStream rng(5);
    for (int t = 0; t < 50; ++t) {
        const double v = ev.value(scalar_w(rng.uniform(-1.0, 1.0)),
                                  scalar_w(rng.uniform(-1.0, 1.0)));
        CHECK(v == 0.0);
    }
}

TEST_CASE("plug-in population with pool N equals empirical with n = m = N on one seed") {
    NetworkSpec fspec({1, 2, 1}, {1.5, 1.0}, {Activation::relu()});
    NetworkSpec gspec({1, 1}, {1.0}, {});
    const ObjectiveInstance inst{fspec, gspec, MeasuringFunction::identity(), true};
    const DistributionSpec base = DistributionSpec::uniform_ball(1, 1.0);
    const DistributionSpec target = DistributionSpec::uniform_cube(1, 1.0);
    const long n = 200;
    const std::uint64_t seed = 314159;

    auto sides = make_population_sides(inst, target, base, n, seed, PopulationMethod::plugin);
    const ObjectiveEvaluator pop =
        ObjectiveEvaluator::population(inst, sides.first, sides.second);
    const SampleSet data = draw_samples(target, base, n, n, seed);
    const ObjectiveEvaluator emp = ObjectiveEvaluator::from_samples(inst, data);

    RngStream rng(6);
    for (int t = 0; t < 20; ++t) {
        const WeightAssignment w = sample_weights(fspec, rng);
        const WeightAssignment theta = sample_weights(gspec, rng);
        CHECK(pop.value(theta, w) == emp.value(theta, w));
    }
}

TEST_CASE("linearity fast path agrees with the per-sample oracle") {
    const ObjectiveInstance inst = scalar_instance();
    RngStream rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        SampleSet data;
        const int n = 1 + static_cast<int>(rng.uniform01() * 8);
        const int m = 1 + static_cast<int>(rng.uniform01() * 8);
        for (int i = 0; i < n; ++i) data.x_samples.push_back({rng.uniform(-1.0, 1.0)});
        for (int j = 0; j < m; ++j) data.z_samples.push_back({rng.uniform(-1.0, 1.0)});
        const ObjectiveEvaluator ev = ObjectiveEvaluator::from_samples(inst, data);
        CHECK(ev.fast_path());
        const WeightAssignment w = scalar_w(rng.uniform(-1.0, 1.0));
        const WeightAssignment theta = scalar_w(rng.uniform(-1.0, 1.0));
        const double fast = ev.value(theta, w);
        const double slow = oracle_value(inst, theta, w, data.x_samples, data.z_samples);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
    }
}

TEST_CASE("fast path with a relu generator still matches the oracle") {
    NetworkSpec gspec({1, 2, 2}, {1.5, 1.5}, {Activation::relu()});
    NetworkSpec fspec({2, 1}, {1.0}, {});
    const ObjectiveInstance inst{fspec, gspec, MeasuringFunction::identity(), true};
    RngStream rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        SampleSet data;
        for (int i = 0; i < 5; ++i) data.x_samples.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        for (int j = 0; j < 7; ++j) data.z_samples.push_back({rng.uniform(-1.0, 1.0)});
        const ObjectiveEvaluator ev = ObjectiveEvaluator::from_samples(inst, data);
        CHECK(ev.fast_path());
        const WeightAssignment w = sample_weights(fspec, rng);
        const WeightAssignment theta = sample_weights(gspec, rng);
        CHECK(ev.value(theta, w) ==
              doctest::Approx(oracle_value(inst, theta, w, data.x_samples, data.z_samples))
                  .epsilon(1e-12));
    }
}

TEST_CASE("general path (log measuring function) matches the oracle on admissible weights") {
    NetworkSpec fspec({1, 1}, {1.0}, {});
    NetworkSpec gspec({1, 1}, {1.0}, {});
    const ObjectiveInstance inst{fspec, gspec, MeasuringFunction::log(), true};
    SampleSet data;
    data.x_samples = {{0.5}, {0.8}};  // positive inputs
    data.z_samples = {{0.1}, {0.2}};
    const ObjectiveEvaluator ev = ObjectiveEvaluator::from_samples(inst, data);
    CHECK_FALSE(ev.fast_path());
    const WeightAssignment w = scalar_w(0.5);  // f_w(x) in (0, 0.4]: log defined
    const WeightAssignment theta = scalar_w(0.5);
    CHECK(ev.value(theta, w) ==
          doctest::Approx(oracle_value(inst, theta, w, data.x_samples, data.z_samples))
              .epsilon(1e-12));

    // a weight that drives f_w(x) <= 0 is a hard domain error, never clamped
    CHECK_THROWS_AS(ev.value(theta, scalar_w(-0.5)), NumericError);
}

TEST_CASE("abs_mode off computes the signed difference and requires identity phi") {
    SampleSet data;
    data.x_samples = {{1.0}};
    data.z_samples = {{0.4}};
    const ObjectiveInstance inst = scalar_instance(false);
    const ObjectiveEvaluator ev = ObjectiveEvaluator::from_samples(inst, data);
    // mean f(g(z)) - mean f(x) with w=0.5, theta=0: 0 - 0.5
    CHECK(ev.value(scalar_w(0.0), scalar_w(0.5)) == doctest::Approx(-0.5));

    ObjectiveInstance bad{scalar_net(), scalar_net(), MeasuringFunction::log(), false};
    CHECK_THROWS_AS(ObjectiveEvaluator::from_samples(bad, data), ConfigError);
}

TEST_CASE("gradients match finite differences through the evaluator") {
    NetworkSpec fspec({2, 2, 1}, {2.0, 2.0}, {Activation::leaky(0.4)});
    NetworkSpec gspec({1, 2}, {1.5}, {});
    const ObjectiveInstance inst{fspec, gspec, MeasuringFunction::identity(), true};
    RngStream rng(15);
    SampleSet data;
    for (int i = 0; i < 4; ++i) data.x_samples.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    for (int j = 0; j < 3; ++j) data.z_samples.push_back({rng.uniform(-1.0, 1.0)});
    const ObjectiveEvaluator ev = ObjectiveEvaluator::from_samples(inst, data);
    const WeightAssignment w = sample_weights(fspec, rng);
    const WeightAssignment theta = sample_weights(gspec, rng);

    const auto bound = ev.bind_theta(theta);
    BackpropResult wg = zero_grads(fspec);
    const double v0 = bound.value_and_grad_w(w, wg);
    CHECK(v0 == doctest::Approx(ev.value(theta, w)).epsilon(1e-12));
    const double h = 1e-6;
    for (std::size_t l = 0; l < w.matrices.size(); ++l) {
        for (std::size_t i = 0; i < w.matrices[l].values.size(); ++i) {
            WeightAssignment wp = w, wm = w;
            wp.matrices[l].values[i] += h;
            wm.matrices[l].values[i] -= h;
            const double fd = (bound.value(wp) - bound.value(wm)) / (2.0 * h);
            CHECK(wg.weight_grads[l].values[i] == doctest::Approx(fd).epsilon(1e-4));
        }
    }

    BackpropResult tg = zero_grads(gspec);
    const double v1 = ev.value_and_grad_theta(theta, w, tg);
    CHECK(v1 == doctest::Approx(v0).epsilon(1e-12));
    for (std::size_t l = 0; l < theta.matrices.size(); ++l) {
        for (std::size_t i = 0; i < theta.matrices[l].values.size(); ++i) {
            WeightAssignment tp = theta, tm = theta;
            tp.matrices[l].values[i] += h;
            tm.matrices[l].values[i] -= h;
            const double fd = (ev.value(tp, w) - ev.value(tm, w)) / (2.0 * h);
            CHECK(tg.weight_grads[l].values[i] == doctest::Approx(fd).epsilon(1e-4));
        }
    }
}

TEST_CASE("fast-path gradients match finite differences") {
    NetworkSpec fspec({2, 1}, {1.5}, {});
    NetworkSpec gspec({1, 2, 2}, {1.5, 1.5}, {Activation::relu()});
    const ObjectiveInstance inst{fspec, gspec, MeasuringFunction::identity(), true};
    RngStream rng(25);
    SampleSet data;
    for (int i = 0; i < 6; ++i) data.x_samples.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    for (int j = 0; j < 5; ++j) data.z_samples.push_back({rng.uniform(-1.0, 1.0)});
    const ObjectiveEvaluator ev = ObjectiveEvaluator::from_samples(inst, data);
    CHECK(ev.fast_path());
    const WeightAssignment w = sample_weights(fspec, rng);
    const WeightAssignment theta = sample_weights(gspec, rng);
    const auto bound = ev.bind_theta(theta);
    BackpropResult wg = zero_grads(fspec);
    const double v0 = bound.value_and_grad_w(w, wg);
    CHECK(v0 == doctest::Approx(ev.value(theta, w)).epsilon(1e-12));
    const double h = 1e-6;
    for (std::size_t i = 0; i < w.matrices[0].values.size(); ++i) {
        WeightAssignment wp = w, wm = w;
        wp.matrices[0].values[i] += h;
        wm.matrices[0].values[i] -= h;
        const double fd = (bound.value(wp) - bound.value(wm)) / (2.0 * h);
        CHECK(wg.weight_grads[0].values[i] == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("objective_at accepts distribution pairs for the population variants") {
    const ObjectiveInstance inst = scalar_instance();
    const DistributionSpec base = DistributionSpec::uniform_ball(1, 1.0);
    const DistributionSpec target =
        DistributionSpec::pushforward(scalar_net(), scalar_w(0.7), base);
    const double pop = objective_at(inst, scalar_w(0.2), scalar_w(0.9), Variant::population,
                                    target, base, 1000, 3);
    CHECK(pop == 0.0);  // linear toy, closed-form means

    const SampleSet data = draw_samples(target, base, 8, 0, 5);
    const double half = objective_at(inst, scalar_w(0.2), scalar_w(0.9),
                                     Variant::half_empirical, target, base, 1000, 3,
                                     PopulationMethod::automatic, &data);
    // population z-side mean is zero, so only the x-sample mean remains
    double xbar = 0.0;
    for (const Vector& x : data.x_samples) xbar += x[0];
    xbar /= 8.0;
    CHECK(half == doctest::Approx(std::abs(1.0 + 0.9 * xbar) - 1.0).epsilon(1e-12));

    CHECK_THROWS_AS(objective_at(inst, scalar_w(0.2), scalar_w(0.9), Variant::half_empirical,
                                 target, base, 1000, 3),
                    ConfigError);  // missing samples
}

TEST_CASE("construction validates sides") {
    const ObjectiveInstance inst = scalar_instance();
    SampleSet empty;
    empty.x_samples = {{0.5}};
    CHECK_THROWS_AS(ObjectiveEvaluator::from_samples(inst, empty), NumericError);
    SampleSet wrong;
    wrong.x_samples = {{0.5, 0.5}};
    wrong.z_samples = {{0.1}};
    CHECK_THROWS_AS(ObjectiveEvaluator::from_samples(inst, wrong), NumericError);
}
