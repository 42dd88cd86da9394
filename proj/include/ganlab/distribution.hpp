#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ganlab/nets.hpp"

namespace ganlab {

/// A samplable law with a known norm radius. Pushforward wraps a base law
/// with a generator at fixed weights; empirical is the uniform law on a
/// finite point list.
class DistributionSpec {
public:
    enum class Kind { uniform_ball, uniform_cube, pushforward, empirical };

    static DistributionSpec uniform_ball(int dimension, double radius);
    static DistributionSpec uniform_cube(int dimension, double half_width);
    static DistributionSpec pushforward(NetworkSpec gspec, WeightAssignment theta_star,
                                        DistributionSpec base);
    static DistributionSpec empirical(std::vector<Vector> points);

    Kind kind() const { return kind_; }
    int dimension() const { return dimension_; }
    double radius() const { return radius_; }

    /// Every draw satisfies ||x|| <= norm_radius(). For a pushforward this is
    /// the generator Lipschitz product times the base radius.
    double norm_radius() const;

    Vector draw(RngStream& rng) const;

    /// True when expectations under this law are exact finite averages
    /// (empirical lists and pushforwards of them).
    bool is_finite_support() const;
    /// The support points for finite-support laws (pushforwards applied).
    std::vector<Vector> support_points() const;
    /// True when the law is symmetric about the origin and its mean is known
    /// to be zero (uniform ball/cube, and linear pushforwards of them).
    bool has_zero_mean() const;

    const NetworkSpec* generator_spec() const { return gspec_.get(); }
    const WeightAssignment* generator_weights() const { return theta_star_.get(); }
    const DistributionSpec* base() const { return base_.get(); }
    const std::vector<Vector>& points() const { return points_; }

private:
    DistributionSpec() = default;
    Kind kind_ = Kind::uniform_ball;
    int dimension_ = 0;
    double radius_ = 0.0;  // ball radius or cube half-width
    std::shared_ptr<const NetworkSpec> gspec_;
    std::shared_ptr<const WeightAssignment> theta_star_;
    std::shared_ptr<const DistributionSpec> base_;
    std::vector<Vector> points_;
};

/// n draws from the target law and m draws from the base law, with the seed
/// they came from. The empirical measures are the uniform laws on the lists.
struct SampleSet {
    std::vector<Vector> x_samples;
    std::vector<Vector> z_samples;
    std::uint64_t seed = 0;
};

/// Draws x from `target` on stream derive(seed, {0}) and z from `base` on
/// derive(seed, {1}).
SampleSet draw_samples(const DistributionSpec& target, const DistributionSpec& base, long n,
                       long m, std::uint64_t seed);

}  // namespace ganlab
