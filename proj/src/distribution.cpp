#include "ganlab/distribution.hpp"

#include <cmath>
#include <string>

#include "ganlab/bounds.hpp"
#include "ganlab/errors.hpp"

namespace ganlab {

DistributionSpec DistributionSpec::uniform_ball(int dimension, double radius) {
    if (dimension <= 0) throw ConfigError("distribution dimension must be positive");
    if (!(radius > 0.0)) throw ConfigError("uniform_ball radius must be positive");
    DistributionSpec d;
    d.kind_ = Kind::uniform_ball;
    d.dimension_ = dimension;
    d.radius_ = radius;
    return d;
}

DistributionSpec DistributionSpec::uniform_cube(int dimension, double half_width) {
    if (dimension <= 0) throw ConfigError("distribution dimension must be positive");
    if (!(half_width > 0.0)) throw ConfigError("uniform_cube half-width must be positive");
    DistributionSpec d;
    d.kind_ = Kind::uniform_cube;
    d.dimension_ = dimension;
    d.radius_ = half_width;
    return d;
}

DistributionSpec DistributionSpec::pushforward(NetworkSpec gspec, WeightAssignment theta_star,
                                               DistributionSpec base) {
    validate_weights(gspec, theta_star);
    if (base.dimension() != gspec.input_dim()) {
        throw ConfigError("pushforward base has dimension " + std::to_string(base.dimension()) +
                          " but the generator expects " + std::to_string(gspec.input_dim()));
    }
    DistributionSpec d;
    d.kind_ = Kind::pushforward;
    d.dimension_ = gspec.output_dim();
    d.gspec_ = std::make_shared<NetworkSpec>(std::move(gspec));
    d.theta_star_ = std::make_shared<WeightAssignment>(std::move(theta_star));
    d.base_ = std::make_shared<DistributionSpec>(std::move(base));
    return d;
}

DistributionSpec DistributionSpec::empirical(std::vector<Vector> points) {
    if (points.empty()) throw ConfigError("empirical distribution needs at least one point");
    const std::size_t dim = points.front().size();
    if (dim == 0) throw ConfigError("empirical points must be non-empty vectors");
    for (const Vector& p : points) {
        if (p.size() != dim) {
            throw ConfigError("empirical points have inconsistent dimensions");
        }
        require_finite(p, "empirical point");
    }
    DistributionSpec d;
    d.kind_ = Kind::empirical;
    d.dimension_ = static_cast<int>(dim);
    d.points_ = std::move(points);
    return d;
}

double DistributionSpec::norm_radius() const {
    switch (kind_) {
        case Kind::uniform_ball:
            return radius_;
        case Kind::uniform_cube:
            return radius_ * std::sqrt(static_cast<double>(dimension_));
        case Kind::pushforward:
            return lipschitz_product(*gspec_) * base_->norm_radius();
        case Kind::empirical: {
            double best = 0.0;
            for (const Vector& p : points_) best = std::max(best, norm2(p));
            return best;
        }
    }
    return 0.0;
}

Vector DistributionSpec::draw(RngStream& rng) const {
    switch (kind_) {
        case Kind::uniform_ball: {
            // Gaussian direction, then radius with the uniform-in-ball law.
            Vector x(static_cast<std::size_t>(dimension_));
            double sq = 0.0;
            for (double& v : x) {
                v = rng.normal();
                sq += v * v;
            }
            const double norm = std::sqrt(sq);
            const double r =
                radius_ * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dimension_));
            if (norm > 0.0) {
                const double scale = r / norm;
                for (double& v : x) v *= scale;
            }
            return x;
        }
        case Kind::uniform_cube: {
            Vector x(static_cast<std::size_t>(dimension_));
            for (double& v : x) v = rng.uniform(-radius_, radius_);
            return x;
        }
        case Kind::pushforward: {
            const Vector z = base_->draw(rng);
            ForwardWorkspace ws;
            Vector out;
            forward_unchecked(*gspec_, *theta_star_, z, out, ws);
            return out;
        }
        case Kind::empirical: {
            const std::size_t idx =
                static_cast<std::size_t>(rng.uniform01() * static_cast<double>(points_.size()));
            return points_[idx < points_.size() ? idx : points_.size() - 1];
        }
    }
    return {};
}

bool DistributionSpec::is_finite_support() const {
    switch (kind_) {
        case Kind::empirical:
            return true;
        case Kind::pushforward:
            return base_->is_finite_support();
        default:
            return false;
    }
}

std::vector<Vector> DistributionSpec::support_points() const {
    if (!is_finite_support()) {
        throw NumericError("support_points requested for a non-finite-support distribution");
    }
    if (kind_ == Kind::empirical) return points_;
    std::vector<Vector> base_points = base_->support_points();
    ForwardWorkspace ws;
    std::vector<Vector> out;
    out.reserve(base_points.size());
    for (const Vector& z : base_points) {
        Vector y;
        forward_unchecked(*gspec_, *theta_star_, z, y, ws);
        out.push_back(std::move(y));
    }
    return out;
}

bool DistributionSpec::has_zero_mean() const {
    switch (kind_) {
        case Kind::uniform_ball:
        case Kind::uniform_cube:
            return true;
        case Kind::pushforward:
            return gspec_->is_linear() && base_->has_zero_mean();
        case Kind::empirical:
            return false;
    }
    return false;
}

SampleSet draw_samples(const DistributionSpec& target, const DistributionSpec& base, long n,
                       long m, std::uint64_t seed) {
    if (n < 0 || m < 0) throw ConfigError("sample counts must be nonnegative");
    SampleSet s;
    s.seed = seed;
    RngStream x_stream(derive_seed(seed, {0}));
    RngStream z_stream(derive_seed(seed, {1}));
    s.x_samples.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) s.x_samples.push_back(target.draw(x_stream));
    s.z_samples.reserve(static_cast<std::size_t>(m));
    for (long j = 0; j < m; ++j) s.z_samples.push_back(base.draw(z_stream));
    return s;
}

}  // namespace ganlab
