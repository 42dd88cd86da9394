#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ganlab/distribution.hpp"
#include "ganlab/errors.hpp"

using namespace ganlab;

TEST_CASE("uniform ball draws stay inside and fill the radius") {
    for (int dim : {1, 2, 3}) {
        const DistributionSpec law = DistributionSpec::uniform_ball(dim, 1.5);
        CHECK(law.norm_radius() == 1.5);
        RngStream rng(101 + dim);
        double max_norm = 0.0;
        for (int t = 0; t < 5000; ++t) {
            const Vector x = law.draw(rng);
            CHECK(static_cast<int>(x.size()) == dim);
            const double nrm = norm2(x);
            CHECK(nrm <= 1.5 * (1.0 + 1e-12));
            max_norm = std::max(max_norm, nrm);
        }
        CHECK(max_norm > 1.4);  // the radial law reaches the boundary
    }
}

TEST_CASE("uniform cube draws and norm radius") {
    const DistributionSpec law = DistributionSpec::uniform_cube(3, 0.5);
    CHECK(law.norm_radius() == doctest::Approx(0.5 * std::sqrt(3.0)));
    RngStream rng(7);
    for (int t = 0; t < 3000; ++t) {
        for (double v : law.draw(rng)) CHECK(std::abs(v) <= 0.5);
    }
}

TEST_CASE("pushforward draws respect the class-level envelope") {
    NetworkSpec gspec({1, 2}, {1.3}, {});
    WeightAssignment theta{{Matrix(2, 1, {0.6, -0.4})}};
    const DistributionSpec base = DistributionSpec::uniform_ball(1, 2.0);
    const DistributionSpec push = DistributionSpec::pushforward(gspec, theta, base);
    CHECK(push.dimension() == 2);
    CHECK(push.norm_radius() == doctest::Approx(1.3 * 2.0));
    RngStream rng(3);
    for (int t = 0; t < 3000; ++t) {
        CHECK(norm2(push.draw(rng)) <= push.norm_radius() * (1.0 + 1e-12));
    }
    CHECK(push.has_zero_mean());  // linear generator over a symmetric base
}

TEST_CASE("empirical law draws members and exposes exact support") {
    const std::vector<Vector> pts{{0.1}, {1.9}, {-0.7}};
    const DistributionSpec law = DistributionSpec::empirical(pts);
    CHECK(law.is_finite_support());
    CHECK(law.support_points() == pts);
    CHECK(law.norm_radius() == 1.9);
    CHECK_FALSE(law.has_zero_mean());
    RngStream rng(13);
    int seen[3] = {0, 0, 0};
    for (int t = 0; t < 3000; ++t) {
        const Vector x = law.draw(rng);
        bool found = false;
        for (int k = 0; k < 3; ++k) {
            if (x == pts[static_cast<std::size_t>(k)]) {
                ++seen[k];
                found = true;
            }
        }
        CHECK(found);
    }
    for (int k = 0; k < 3; ++k) CHECK(seen[k] > 500);

    NetworkSpec gspec({1, 1}, {1.0}, {});
    WeightAssignment theta{{Matrix(1, 1, {0.7})}};
    const DistributionSpec push = DistributionSpec::pushforward(gspec, theta, law);
    CHECK(push.is_finite_support());
    const std::vector<Vector> pushed = push.support_points();
    CHECK(pushed[0][0] == doctest::Approx(0.07));
    CHECK(pushed[1][0] == doctest::Approx(1.9 * 0.7));
}

TEST_CASE("draw_samples counts, dimensions, and determinism") {
    const DistributionSpec target = DistributionSpec::uniform_ball(2, 1.0);
    const DistributionSpec base = DistributionSpec::uniform_ball(3, 1.0);
    const SampleSet a = draw_samples(target, base, 17, 5, 999);
    CHECK(a.x_samples.size() == 17);
    CHECK(a.z_samples.size() == 5);
    CHECK(a.x_samples[0].size() == 2);
    CHECK(a.z_samples[0].size() == 3);
    const SampleSet b = draw_samples(target, base, 17, 5, 999);
    CHECK(a.x_samples == b.x_samples);
    CHECK(a.z_samples == b.z_samples);
    const SampleSet c = draw_samples(target, base, 17, 5, 1000);
    CHECK(a.x_samples != c.x_samples);
}

TEST_CASE("validation errors") {
    CHECK_THROWS_AS(DistributionSpec::uniform_ball(0, 1.0), ConfigError);
    CHECK_THROWS_AS(DistributionSpec::uniform_ball(1, 0.0), ConfigError);
    CHECK_THROWS_AS(DistributionSpec::empirical({}), ConfigError);
    CHECK_THROWS_AS(DistributionSpec::empirical({{1.0}, {1.0, 2.0}}), ConfigError);
    NetworkSpec gspec({2, 1}, {1.0}, {});
    WeightAssignment theta{{Matrix(1, 2, {0.1, 0.1})}};
    CHECK_THROWS_AS(
        DistributionSpec::pushforward(gspec, theta, DistributionSpec::uniform_ball(1, 1.0)),
        ConfigError);
}
