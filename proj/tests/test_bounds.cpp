#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ganlab/bounds.hpp"
#include "ganlab/distribution.hpp"
#include "ganlab/errors.hpp"

using namespace ganlab;

namespace {
NetworkSpec make_f23() {
    return NetworkSpec({2, 2, 1}, {2.0, 3.0}, {Activation::relu()});
}
NetworkSpec make_g2() { return NetworkSpec({2, 2}, {2.0}, {}); }
}  // namespace

TEST_CASE("bound report by direct substitution") {
    const BoundReport r = compute_bound_report(make_f23(), make_g2(),
                                               MeasuringFunction::identity(), 1.0, 1.0);
    CHECK(r.u_w == 6.0);
    CHECK(r.k1 == 6.0);
    CHECK(r.k3 == 6.0);
    CHECK(r.u_v == 2.0);
    CHECK(r.k2 == 12.0);
    CHECK(r.k4 == 13.0);  // max(|1-12|, |1+12|)
    CHECK(r.layers_f == 2);
    CHECK(r.layers_g == 1);
    CHECK(r.weight_count_f == 6);
    CHECK(r.weight_count_g == 4);
    // composed class uses layers d+s-1 and the summed weight count
    CHECK(r.vc_fg == doctest::Approx(vc_scaling(2, 10)).epsilon(1e-15));
    CHECK(r.vc_f == doctest::Approx(vc_scaling(2, 6)).epsilon(1e-15));
}

TEST_CASE("log measuring function cannot cover [-K1, K1]") {
    try {
        compute_bound_report(make_f23(), make_g2(), MeasuringFunction::log(), 1.0, 1.0);
        FAIL("expected rejection");
    } catch (const NumericError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("(0, inf)") != std::string::npos);
        CHECK(msg.find("-6") != std::string::npos);
        CHECK(msg.find("K3") != std::string::npos);
    }
    CHECK_THROWS_AS(compute_bound_report(make_f23(), make_g2(),
                                         MeasuringFunction::shifted_log(0.5), 1.0, 1.0),
                    NumericError);
}

TEST_CASE("single linear layer has an empty Lipschitz product") {
    NetworkSpec f({1, 1}, {1.0}, {});
    NetworkSpec g({1, 1}, {1.0}, {});
    const BoundReport r = compute_bound_report(f, g, MeasuringFunction::identity(), 1.0, 1.0);
    CHECK(r.u_w == 1.0);
    CHECK(r.k1 == 1.0);
    CHECK(r.k3 == 1.0);
}

TEST_CASE("vc scaling values and conventions") {
    CHECK(vc_scaling(2, 9) == doctest::Approx(2.0 * 9.0 * std::log(9.0)).epsilon(1e-12));
    CHECK(vc_scaling(2, 9) == doctest::Approx(39.5501).epsilon(1e-4));
    CHECK(vc_scaling(1, 1) == 1.0);  // small-W convention
    CHECK_THROWS_AS(vc_scaling(0, 5), NumericError);
    CHECK_THROWS_AS(vc_scaling(2, 0), NumericError);

    // strictly increasing in both arguments for W >= 2
    for (long long w = 2; w < 40; ++w) {
        CHECK(vc_scaling(3, w + 1) > vc_scaling(3, w));
        CHECK(vc_scaling(4, w) > vc_scaling(3, w));
    }
    CHECK(vc_scaling(3, 2) > vc_scaling(3, 1));
}

TEST_CASE("composed class layer bookkeeping for two-layer pairs") {
    // d = 2 and s = 2 compose into d + s - 1 = 3 layers
    NetworkSpec f({1, 1, 1}, {1.0, 1.0}, {Activation::relu()});
    NetworkSpec g({1, 1, 1}, {1.0, 1.0}, {Activation::relu()});
    const BoundReport r = compute_bound_report(f, g, MeasuringFunction::identity(), 1.0, 1.0);
    CHECK(r.vc_fg == doctest::Approx(vc_scaling(3, 4)).epsilon(1e-15));
}

TEST_CASE("constants are monotone in the caps and radii") {
    const MeasuringFunction id = MeasuringFunction::identity();
    RngStream rng(3);
    for (int t = 0; t < 100; ++t) {
        const double m1 = rng.uniform(0.5, 2.0), m2 = rng.uniform(0.5, 2.0);
        const double mg = rng.uniform(0.5, 2.0);
        const double bx = rng.uniform(0.5, 2.0), bz = rng.uniform(0.5, 2.0);
        NetworkSpec f({2, 2, 1}, {m1, m2}, {Activation::relu()});
        NetworkSpec f_bigger({2, 2, 1}, {m1 * 1.3, m2}, {Activation::relu()});
        NetworkSpec g({2, 2}, {mg}, {});
        NetworkSpec g_bigger({2, 2}, {mg * 1.7}, {});
        const BoundReport base = compute_bound_report(f, g, id, bx, bz);
        const BoundReport fb = compute_bound_report(f_bigger, g, id, bx, bz);
        const BoundReport gb = compute_bound_report(f, g_bigger, id, bx, bz);
        const BoundReport xb = compute_bound_report(f, g, id, bx * 2.0, bz);
        const BoundReport zb = compute_bound_report(f, g, id, bx, bz * 2.0);
        CHECK(fb.k1 >= base.k1);
        CHECK(fb.k3 >= base.k3);
        CHECK(xb.k1 >= base.k1);
        CHECK(xb.k3 >= base.k3);
        CHECK(gb.k2 >= base.k2);
        CHECK(gb.k4 >= base.k4);
        CHECK(zb.k2 >= base.k2);
        CHECK(zb.k4 >= base.k4);
    }
}

TEST_CASE("explicit weights feed actual nonzero counts") {
    NetworkSpec f({2, 1}, {5.0}, {});
    NetworkSpec g({2, 2}, {2.0}, {});
    WeightAssignment sparse_f{{Matrix(1, 2, {1.5, 0.0})}};
    WeightAssignment sparse_g{{Matrix(2, 2, {1.0, 0.0, 0.0, 0.0})}};
    const BoundReport r = compute_bound_report(f, g, MeasuringFunction::identity(), 1.0, 1.0,
                                               &sparse_f, &sparse_g);
    CHECK(r.weight_count_f == 1);
    CHECK(r.weight_count_g == 1);
    CHECK(r.vc_f == doctest::Approx(vc_scaling(1, 1)));
    CHECK(r.vc_fg == doctest::Approx(vc_scaling(1 + 1 - 1, 2)));
}

TEST_CASE("rejects nonpositive radii and mismatched dimensions") {
    CHECK_THROWS_AS(
        compute_bound_report(make_f23(), make_g2(), MeasuringFunction::identity(), 0.0, 1.0),
        NumericError);
    NetworkSpec g_bad({2, 3}, {1.0}, {});
    CHECK_THROWS_AS(
        compute_bound_report(make_f23(), g_bad, MeasuringFunction::identity(), 1.0, 1.0),
        ConfigError);
}

TEST_CASE("quick empirical envelope spot check") {
    NetworkSpec f({2, 2, 1}, {1.2, 0.9}, {Activation::relu()});
    NetworkSpec g({2, 2}, {1.5}, {});
    const double bx = 1.0, bz = 1.0;
    const BoundReport r = compute_bound_report(f, g, MeasuringFunction::identity(), bx, bz);
    RngStream rng(17);
    const DistributionSpec xs = DistributionSpec::uniform_ball(2, bx);
    const DistributionSpec zs = DistributionSpec::uniform_ball(2, bz);
    ForwardWorkspace ws;
    Vector pushed;
    for (int t = 0; t < 2000; ++t) {
        const WeightAssignment w = sample_weights(f, rng);
        const WeightAssignment th = sample_weights(g, rng);
        const Vector x = xs.draw(rng), z = zs.draw(rng);
        CHECK(std::abs(forward_scalar_unchecked(f, w, x, ws)) <= r.k1 * (1.0 + 1e-9));
        forward_unchecked(g, th, z, pushed, ws);
        CHECK(std::abs(forward_scalar_unchecked(f, w, pushed, ws)) <= r.k2 * (1.0 + 1e-9));
    }
}
