#include "ganlab/objective.hpp"

#include <cmath>

#include "ganlab/errors.hpp"

namespace ganlab {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::empirical_mn:
            return "empirical_mn";
        case Variant::half_empirical:
            return "half_empirical";
        case Variant::population:
            return "population";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    if (name == "empirical_mn") return Variant::empirical_mn;
    if (name == "half_empirical") return Variant::half_empirical;
    if (name == "population") return Variant::population;
    throw ConfigError("unknown variant '" + name +
                      "' (kinds: empirical_mn, half_empirical, population)");
}

std::string side_method_name(SideMethod m) {
    switch (m) {
        case SideMethod::samples:
            return "samples";
        case SideMethod::plugin_pool:
            return "plugin_pool";
        case SideMethod::finite_support:
            return "finite_support";
        case SideMethod::mean_point:
            return "mean_point";
    }
    return "?";
}

namespace {

Vector mean_of(const std::vector<Vector>& points) {
    if (points.empty()) throw NumericError("cannot average an empty point list");
    Vector m(points.front().size(), 0.0);
    for (const Vector& p : points) {
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += p[i];
    }
    const double inv = 1.0 / static_cast<double>(points.size());
    for (double& v : m) v *= inv;
    return m;
}

}  // namespace

SidePoints SidePoints::from_points(std::vector<Vector> pts, SideMethod method) {
    SidePoints s;
    s.points = std::move(pts);
    s.method = method;
    s.mean = mean_of(s.points);
    return s;
}

std::pair<SidePoints, SidePoints> make_population_sides(const ObjectiveInstance& inst,
                                                        const DistributionSpec& target,
                                                        const DistributionSpec& base, long n_pop,
                                                        std::uint64_t seed,
                                                        PopulationMethod method) {
    const bool phi_id = inst.phi.is_identity();
    const bool x_affine = phi_id && inst.fspec.is_linear();
    const bool z_affine = phi_id && inst.fspec.is_linear() && inst.gspec.is_linear();

    SidePoints x_side, z_side;
    bool need_x_pool = true, need_z_pool = true;

    if (method == PopulationMethod::automatic) {
        if (target.is_finite_support()) {
            x_side = SidePoints::from_points(target.support_points(), SideMethod::finite_support);
            need_x_pool = false;
        } else if (x_affine && target.has_zero_mean()) {
            x_side = SidePoints::from_points({Vector(target.dimension(), 0.0)},
                                             SideMethod::mean_point);
            need_x_pool = false;
        }
        if (base.is_finite_support()) {
            z_side = SidePoints::from_points(base.support_points(), SideMethod::finite_support);
            need_z_pool = false;
        } else if (z_affine && base.has_zero_mean()) {
            z_side =
                SidePoints::from_points({Vector(base.dimension(), 0.0)}, SideMethod::mean_point);
            need_z_pool = false;
        }
    }

    if (need_x_pool || need_z_pool) {
        if (n_pop < 1) throw ConfigError("plug-in population requires n_pop >= 1");
        // Same derivation as draw_samples so that a plug-in population with
        // pool size N and an empirical run with n = m = N on the same seed
        // are literally the same computation.
        SampleSet pool = draw_samples(target, base, n_pop, n_pop, seed);
        if (need_x_pool) {
            x_side = SidePoints::from_points(std::move(pool.x_samples), SideMethod::plugin_pool);
        }
        if (need_z_pool) {
            z_side = SidePoints::from_points(std::move(pool.z_samples), SideMethod::plugin_pool);
        }
    }
    return {std::move(x_side), std::move(z_side)};
}

ObjectiveEvaluator::ObjectiveEvaluator(ObjectiveInstance inst, Variant variant, SidePoints x_side,
                                       SidePoints z_side)
    : inst_(std::move(inst)),
      variant_(variant),
      x_side_(std::move(x_side)),
      z_side_(std::move(z_side)) {
    inst_.fspec.require_discriminator();
    if (inst_.gspec.output_dim() != inst_.fspec.input_dim()) {
        throw ConfigError("generator output dimension " +
                          std::to_string(inst_.gspec.output_dim()) +
                          " does not match discriminator input dimension " +
                          std::to_string(inst_.fspec.input_dim()));
    }
    if (!inst_.abs_mode && !inst_.phi.is_identity()) {
        throw ConfigError("abs_mode off implements the signed identity-phi convention; got phi=" +
                          inst_.phi.name());
    }
    if (x_side_.points.empty() || z_side_.points.empty()) {
        throw NumericError("objective needs at least one point on each side");
    }
    for (const Vector& x : x_side_.points) {
        if (static_cast<int>(x.size()) != inst_.fspec.input_dim()) {
            throw NumericError("x-side point has length " + std::to_string(x.size()) +
                               " but the discriminator expects " +
                               std::to_string(inst_.fspec.input_dim()));
        }
    }
    for (const Vector& z : z_side_.points) {
        if (static_cast<int>(z.size()) != inst_.gspec.input_dim()) {
            throw NumericError("z-side point has length " + std::to_string(z.size()) +
                               " but the generator expects " +
                               std::to_string(inst_.gspec.input_dim()));
        }
    }
    f_linear_ = inst_.phi.is_identity() && inst_.fspec.is_linear();
    g_linear_ = inst_.gspec.is_linear();
    two_phi_half_ = inst_.abs_mode ? 2.0 * inst_.phi(0.5) : 0.0;
}

ObjectiveEvaluator ObjectiveEvaluator::from_samples(ObjectiveInstance inst, const SampleSet& data) {
    return ObjectiveEvaluator(std::move(inst), Variant::empirical_mn,
                              SidePoints::from_points(data.x_samples, SideMethod::samples),
                              SidePoints::from_points(data.z_samples, SideMethod::samples));
}

ObjectiveEvaluator ObjectiveEvaluator::half(ObjectiveInstance inst, const SampleSet& data,
                                            SidePoints z_population) {
    return ObjectiveEvaluator(std::move(inst), Variant::half_empirical,
                              SidePoints::from_points(data.x_samples, SideMethod::samples),
                              std::move(z_population));
}

ObjectiveEvaluator ObjectiveEvaluator::population(ObjectiveInstance inst, SidePoints x_population,
                                                  SidePoints z_population) {
    return ObjectiveEvaluator(std::move(inst), Variant::population, std::move(x_population),
                              std::move(z_population));
}

ObjectiveEvaluator::ThetaBound ObjectiveEvaluator::bind_theta(const WeightAssignment& theta) const {
    validate_weights(inst_.gspec, theta);
    ThetaBound b;
    b.ev_ = this;
    if (f_linear_) {
        if (g_linear_) {
            forward_unchecked(inst_.gspec, theta, z_side_.mean, b.pushed_mean_, b.ws_);
        } else {
            Vector y;
            b.pushed_mean_.assign(static_cast<std::size_t>(inst_.gspec.output_dim()), 0.0);
            for (const Vector& z : z_side_.points) {
                forward_unchecked(inst_.gspec, theta, z, y, b.ws_);
                for (std::size_t i = 0; i < y.size(); ++i) b.pushed_mean_[i] += y[i];
            }
            const double inv = 1.0 / static_cast<double>(z_side_.points.size());
            for (double& v : b.pushed_mean_) v *= inv;
        }
    } else {
        b.pushed_.reserve(z_side_.points.size());
        Vector y;
        for (const Vector& z : z_side_.points) {
            forward_unchecked(inst_.gspec, theta, z, y, b.ws_);
            b.pushed_.push_back(y);
        }
    }
    return b;
}

double ObjectiveEvaluator::assemble(double z_term, double x_term) const {
    if (inst_.abs_mode) {
        return std::abs(z_term + x_term) - two_phi_half_;
    }
    // Signed convention: mean f(g(Z)) - mean f(X). z_term and x_term carry
    // the raw means in this mode (see ThetaBound::z_term / x_term).
    return z_term - x_term;
}

double ObjectiveEvaluator::ThetaBound::z_term(const WeightAssignment& w) const {
    const ObjectiveEvaluator& ev = *ev_;
    const MeasuringFunction& phi = ev.inst_.phi;
    if (ev.f_linear_) {
        const double raw = forward_scalar_unchecked(ev.inst_.fspec, w, pushed_mean_, ws_);
        return ev.inst_.abs_mode ? 1.0 - raw : raw;
    }
    double acc = 0.0;
    for (const Vector& y : pushed_) {
        const double raw = forward_scalar_unchecked(ev.inst_.fspec, w, y, ws_);
        acc += ev.inst_.abs_mode ? phi(1.0 - raw) : raw;
    }
    return acc / static_cast<double>(pushed_.size());
}

double ObjectiveEvaluator::ThetaBound::x_term(const WeightAssignment& w) const {
    const ObjectiveEvaluator& ev = *ev_;
    const MeasuringFunction& phi = ev.inst_.phi;
    if (ev.f_linear_) {
        return forward_scalar_unchecked(ev.inst_.fspec, w, ev.x_side_.mean, ws_);
    }
    double acc = 0.0;
    for (const Vector& x : ev.x_side_.points) {
        const double raw = forward_scalar_unchecked(ev.inst_.fspec, w, x, ws_);
        acc += ev.inst_.abs_mode ? phi(raw) : raw;
    }
    return acc / static_cast<double>(ev.x_side_.points.size());
}

double ObjectiveEvaluator::ThetaBound::value(const WeightAssignment& w) const {
    return ev_->assemble(z_term(w), x_term(w));
}

double ObjectiveEvaluator::ThetaBound::value_and_grad_w(const WeightAssignment& w,
                                                        BackpropResult& grad) const {
    const ObjectiveEvaluator& ev = *ev_;
    const NetworkSpec& fspec = ev.inst_.fspec;
    const MeasuringFunction& phi = ev.inst_.phi;
    const bool abs_mode = ev.inst_.abs_mode;

    for (Matrix& g : grad.weight_grads) std::fill(g.values.begin(), g.values.end(), 0.0);
    grad.input_grad.assign(fspec.input_dim(), 0.0);

    ForwardTrace trace;
    Vector upstream(1, 0.0);

    if (ev.f_linear_) {
        // Means are sufficient: phi is the identity and f is linear, so both
        // the value and the gradient factor through the mean points.
        forward_with_trace(fspec, w, pushed_mean_, trace);
        const double fz = trace.output[0];
        forward_with_trace(fspec, w, ev.x_side_.mean, trace);  // trace reused below
        const double fx = trace.output[0];
        const double s = abs_mode ? (1.0 - fz) + fx : fz - fx;
        const double outer = abs_mode ? (s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0)) : 1.0;
        const double value = abs_mode ? std::abs(s) - ev.two_phi_half_ : s;

        upstream[0] = abs_mode ? outer : -1.0;  // coefficient on f(x) path
        backprop(fspec, w, trace, upstream, grad, true);
        forward_with_trace(fspec, w, pushed_mean_, trace);
        upstream[0] = abs_mode ? -outer : 1.0;  // coefficient on f(g(z)) path
        backprop(fspec, w, trace, upstream, grad, true);
        return value;
    }

    // General path: accumulate per-sample contributions. With abs_mode the
    // outer sign multiplies everything, so compute the bracket first.
    const double zt = z_term(w);
    const double xt = x_term(w);
    const double s = zt + xt;
    const double outer = abs_mode ? (s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0)) : 1.0;

    const double inv_m = 1.0 / static_cast<double>(pushed_.size());
    for (const Vector& y : pushed_) {
        forward_with_trace(fspec, w, y, trace);
        const double raw = trace.output[0];
        const double coeff =
            abs_mode ? outer * inv_m * phi.derivative(1.0 - raw) * (-1.0) : inv_m;
        upstream[0] = coeff;
        backprop(fspec, w, trace, upstream, grad, true);
    }
    const double inv_n = 1.0 / static_cast<double>(ev.x_side_.points.size());
    for (const Vector& x : ev.x_side_.points) {
        forward_with_trace(fspec, w, x, trace);
        const double raw = trace.output[0];
        const double coeff = abs_mode ? outer * inv_n * phi.derivative(raw) : -inv_n;
        upstream[0] = coeff;
        backprop(fspec, w, trace, upstream, grad, true);
    }
    return ev.assemble(zt, xt);
}

double ObjectiveEvaluator::value(const WeightAssignment& theta, const WeightAssignment& w) const {
    validate_weights(inst_.fspec, w);
    return bind_theta(theta).value(w);
}

double ObjectiveEvaluator::value_and_grad_theta(const WeightAssignment& theta,
                                                const WeightAssignment& w,
                                                BackpropResult& grad) const {
    validate_weights(inst_.gspec, theta);
    validate_weights(inst_.fspec, w);
    const NetworkSpec& fspec = inst_.fspec;
    const NetworkSpec& gspec = inst_.gspec;
    const MeasuringFunction& phi = inst_.phi;

    for (Matrix& g : grad.weight_grads) std::fill(g.values.begin(), g.values.end(), 0.0);
    grad.input_grad.assign(gspec.input_dim(), 0.0);

    // The x term does not depend on theta but fixes the outer sign.
    ThetaBound bound = bind_theta(theta);
    const double zt = bound.z_term(w);
    const double xt = bound.x_term(w);
    const double s = zt + xt;
    const double outer =
        inst_.abs_mode ? (s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0)) : 1.0;

    ForwardTrace gtrace, ftrace;
    BackpropResult fgrad = zero_grads(fspec);
    Vector upstream(1, 0.0);

    const bool mean_shortcut = f_linear_ && g_linear_;
    const std::vector<Vector>* zs = &z_side_.points;
    std::vector<Vector> mean_only;
    if (mean_shortcut) {
        mean_only.push_back(z_side_.mean);
        zs = &mean_only;
    }
    const double inv_m = 1.0 / static_cast<double>(zs->size());
    for (const Vector& z : *zs) {
        forward_with_trace(gspec, theta, z, gtrace);
        forward_with_trace(fspec, w, gtrace.output, ftrace);
        const double raw = ftrace.output[0];
        const double coeff = inst_.abs_mode
                                 ? outer * inv_m * phi.derivative(1.0 - raw) * (-1.0)
                                 : inv_m;
        upstream[0] = 1.0;
        backprop(fspec, w, ftrace, upstream, fgrad, false);
        Vector g_upstream = fgrad.input_grad;
        for (double& v : g_upstream) v *= coeff;
        backprop(gspec, theta, gtrace, g_upstream, grad, true);
    }
    return assemble(zt, xt);
}

double objective_at(const ObjectiveInstance& inst, const WeightAssignment& theta,
                    const WeightAssignment& w, Variant variant, const SampleSet& data) {
    if (variant != Variant::empirical_mn) {
        throw ConfigError("objective_at with a bare SampleSet evaluates the empirical_mn variant; "
                          "population terms need distributions and n_pop");
    }
    return ObjectiveEvaluator::from_samples(inst, data).value(theta, w);
}

double objective_at(const ObjectiveInstance& inst, const WeightAssignment& theta,
                    const WeightAssignment& w, Variant variant, const DistributionSpec& target,
                    const DistributionSpec& base, long n_pop, std::uint64_t seed,
                    PopulationMethod method, const SampleSet* data) {
    switch (variant) {
        case Variant::empirical_mn: {
            if (data == nullptr) {
                throw ConfigError("empirical_mn variant needs a SampleSet");
            }
            return ObjectiveEvaluator::from_samples(inst, *data).value(theta, w);
        }
        case Variant::half_empirical: {
            if (data == nullptr) {
                throw ConfigError("half_empirical variant needs a SampleSet for the target side");
            }
            auto sides = make_population_sides(inst, target, base, n_pop, seed, method);
            return ObjectiveEvaluator::half(inst, *data, std::move(sides.second)).value(theta, w);
        }
        case Variant::population: {
            auto sides = make_population_sides(inst, target, base, n_pop, seed, method);
            return ObjectiveEvaluator::population(inst, std::move(sides.first),
                                                  std::move(sides.second))
                .value(theta, w);
        }
    }
    throw ConfigError("unknown variant");
}

}  // namespace ganlab
