#include "ganlab/nets.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ganlab/errors.hpp"

namespace ganlab {

namespace {
constexpr double kNormSlack = 1e-9;  // relative tolerance on ball membership
const double kInf = std::numeric_limits<double>::infinity();
}  // namespace

Activation Activation::leaky(double slope) {
    if (!(slope > 0.0 && slope < 1.0)) {
        throw NumericError("leaky_relu slope must lie in (0,1), got " + std::to_string(slope));
    }
    return {ActivationType::leaky_relu, slope, 1.0};
}

Activation Activation::from_name(const std::string& name) {
    if (name == "relu") return relu();
    if (name == "identity") return identity();
    if (name.rfind("leaky_relu(", 0) == 0 && name.back() == ')') {
        const std::string arg = name.substr(11, name.size() - 12);
        try {
            return leaky(std::stod(arg));
        } catch (const std::invalid_argument&) {
            throw ConfigError("cannot parse leaky_relu slope from '" + name + "'");
        }
    }
    throw ConfigError("unknown activation '" + name +
                      "' (piecewise-linear kinds only: relu, identity, leaky_relu(slope))");
}

std::string Activation::name() const {
    switch (type) {
        case ActivationType::relu:
            return "relu";
        case ActivationType::identity:
            return "identity";
        case ActivationType::leaky_relu: {
            std::ostringstream os;
            os << "leaky_relu(" << slope << ")";
            return os.str();
        }
    }
    return "?";
}

double Activation::apply(double x) const {
    switch (type) {
        case ActivationType::relu:
            return x > 0.0 ? x : 0.0;
        case ActivationType::leaky_relu:
            return x > 0.0 ? x : slope * x;
        case ActivationType::identity:
            return x;
    }
    return x;
}

double Activation::subgradient(double x) const {
    switch (type) {
        case ActivationType::relu:
            return x > 0.0 ? 1.0 : 0.0;
        case ActivationType::leaky_relu:
            return x > 0.0 ? 1.0 : (x < 0.0 ? slope : 0.0);
        case ActivationType::identity:
            return 1.0;
    }
    return 0.0;
}

NetworkSpec::NetworkSpec(std::vector<int> dims, std::vector<double> bounds,
                         std::vector<Activation> acts)
    : layer_dims(std::move(dims)), norm_bounds(std::move(bounds)), activations(std::move(acts)) {
    if (layer_dims.size() < 2) {
        throw ConfigError("network needs at least one weight matrix (got " +
                          std::to_string(layer_dims.size()) + " layer dims)");
    }
    for (int d : layer_dims) {
        if (d <= 0) throw ConfigError("layer dimensions must be positive, got " + std::to_string(d));
    }
    if (norm_bounds.size() != layer_dims.size() - 1) {
        throw ConfigError("expected " + std::to_string(layer_dims.size() - 1) +
                          " norm bounds, got " + std::to_string(norm_bounds.size()));
    }
    for (double b : norm_bounds) {
        if (!(b > 0.0)) throw ConfigError("norm bounds must be positive, got " + std::to_string(b));
    }
    if (activations.size() != norm_bounds.size() - 1) {
        throw ConfigError("expected " + std::to_string(norm_bounds.size() - 1) +
                          " activations, got " + std::to_string(activations.size()));
    }
}

long long NetworkSpec::parameter_count() const {
    long long count = 0;
    for (std::size_t i = 0; i + 1 < layer_dims.size(); ++i) {
        count += static_cast<long long>(layer_dims[i + 1]) * layer_dims[i];
    }
    return count;
}

bool NetworkSpec::is_linear() const {
    for (const Activation& a : activations) {
        if (!a.is_identity()) return false;
    }
    return true;
}

void NetworkSpec::require_discriminator() const {
    if (output_dim() != 1) {
        throw ConfigError("discriminator spec must end in dimension 1, got " +
                          std::to_string(output_dim()));
    }
}

void validate_weights(const NetworkSpec& spec, const WeightAssignment& w) {
    if (w.matrices.size() != spec.norm_bounds.size()) {
        throw NumericError("weight assignment has " + std::to_string(w.matrices.size()) +
                           " matrices but the spec has " + std::to_string(spec.norm_bounds.size()) +
                           " layers");
    }
    for (std::size_t i = 0; i < w.matrices.size(); ++i) {
        const Matrix& m = w.matrices[i];
        if (m.rows != spec.layer_dims[i + 1] || m.cols != spec.layer_dims[i]) {
            throw NumericError("layer " + std::to_string(i + 1) + " weight is " +
                               std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                               " but the spec needs " + std::to_string(spec.layer_dims[i + 1]) +
                               "x" + std::to_string(spec.layer_dims[i]));
        }
        const double norm = frobenius_norm(m);
        const double cap = spec.norm_bounds[i];
        if (norm > cap * (1.0 + kNormSlack)) {
            throw NumericError("layer " + std::to_string(i + 1) + " weight norm " +
                               std::to_string(norm) + " exceeds its cap " + std::to_string(cap));
        }
    }
}

WeightAssignment zero_weights(const NetworkSpec& spec) {
    WeightAssignment w;
    for (std::size_t i = 0; i + 1 < spec.layer_dims.size(); ++i) {
        w.matrices.emplace_back(spec.layer_dims[i + 1], spec.layer_dims[i]);
    }
    return w;
}

WeightAssignment sample_weights(const NetworkSpec& spec, RngStream& rng) {
    WeightAssignment w = zero_weights(spec);
    for (std::size_t i = 0; i < w.matrices.size(); ++i) {
        Matrix& m = w.matrices[i];
        double sq = 0.0;
        for (double& v : m.values) {
            v = rng.uniform(-1.0, 1.0);
            sq += v * v;
        }
        const double norm = std::sqrt(sq);
        const double radius = spec.norm_bounds[i] * rng.uniform01();
        if (norm > 0.0) {
            const double scale = radius / norm;
            for (double& v : m.values) v *= scale;
        }
    }
    return w;
}

void forward_unchecked(const NetworkSpec& spec, const WeightAssignment& w, const Vector& x,
                       Vector& out, ForwardWorkspace& ws) {
    const Vector* cur = &x;
    const int depth = spec.depth();
    for (int layer = 0; layer < depth; ++layer) {
        Vector& dst = (layer % 2 == 0) ? ws.a : ws.b;
        matvec_into(w.matrices[layer], *cur, dst);
        if (layer < depth - 1) {
            const Activation& act = spec.activations[layer];
            for (double& v : dst) v = act.apply(v);
        }
        cur = &dst;
    }
    out = *cur;
}

double forward_scalar_unchecked(const NetworkSpec& spec, const WeightAssignment& w,
                                const Vector& x, ForwardWorkspace& ws) {
    const Vector* cur = &x;
    const int depth = spec.depth();
    for (int layer = 0; layer < depth - 1; ++layer) {
        Vector& dst = (layer % 2 == 0) ? ws.a : ws.b;
        matvec_into(w.matrices[layer], *cur, dst);
        const Activation& act = spec.activations[layer];
        for (double& v : dst) v = act.apply(v);
        cur = &dst;
    }
    const Matrix& last = w.matrices[depth - 1];
    double acc = 0.0;
    for (int j = 0; j < last.cols; ++j) acc += last.values[j] * (*cur)[j];
    return acc;
}

double forward_discriminator(const NetworkSpec& spec, const WeightAssignment& w, const Vector& x) {
    spec.require_discriminator();
    validate_weights(spec, w);
    if (static_cast<int>(x.size()) != spec.input_dim()) {
        throw NumericError("discriminator input has length " + std::to_string(x.size()) +
                           " but the spec expects " + std::to_string(spec.input_dim()));
    }
    ForwardWorkspace ws;
    return forward_scalar_unchecked(spec, w, x, ws);
}

Vector forward_generator(const NetworkSpec& spec, const WeightAssignment& theta, const Vector& z) {
    validate_weights(spec, theta);
    if (static_cast<int>(z.size()) != spec.input_dim()) {
        throw NumericError("generator input has length " + std::to_string(z.size()) +
                           " but the spec expects " + std::to_string(spec.input_dim()));
    }
    ForwardWorkspace ws;
    Vector out;
    forward_unchecked(spec, theta, z, out, ws);
    return out;
}

double forward_composed(const NetworkSpec& fspec, const WeightAssignment& w,
                        const NetworkSpec& gspec, const WeightAssignment& theta, const Vector& z) {
    if (gspec.output_dim() != fspec.input_dim()) {
        throw NumericError("generator output dimension " + std::to_string(gspec.output_dim()) +
                           " does not match discriminator input dimension " +
                           std::to_string(fspec.input_dim()));
    }
    return forward_discriminator(fspec, w, forward_generator(gspec, theta, z));
}

void forward_with_trace(const NetworkSpec& spec, const WeightAssignment& w, const Vector& x,
                        ForwardTrace& trace) {
    const int depth = spec.depth();
    trace.layer_inputs.resize(depth);
    trace.preactivations.resize(depth);
    trace.layer_inputs[0] = x;
    for (int layer = 0; layer < depth; ++layer) {
        matvec_into(w.matrices[layer], trace.layer_inputs[layer], trace.preactivations[layer]);
        if (layer < depth - 1) {
            const Activation& act = spec.activations[layer];
            Vector& next = trace.layer_inputs[layer + 1];
            next = trace.preactivations[layer];
            for (double& v : next) v = act.apply(v);
        }
    }
    trace.output = trace.preactivations[depth - 1];
}

BackpropResult zero_grads(const NetworkSpec& spec) {
    BackpropResult r;
    for (std::size_t i = 0; i + 1 < spec.layer_dims.size(); ++i) {
        r.weight_grads.emplace_back(spec.layer_dims[i + 1], spec.layer_dims[i]);
    }
    r.input_grad.assign(spec.layer_dims[0], 0.0);
    return r;
}

void backprop(const NetworkSpec& spec, const WeightAssignment& w, const ForwardTrace& trace,
              const Vector& output_grad, BackpropResult& result, bool accumulate) {
    const int depth = spec.depth();
    if (!accumulate) {
        for (Matrix& g : result.weight_grads) {
            std::fill(g.values.begin(), g.values.end(), 0.0);
        }
        result.input_grad.assign(spec.layer_dims[0], 0.0);
    }
    Vector delta = output_grad;  // gradient w.r.t. preactivation of current layer
    for (int layer = depth - 1; layer >= 0; --layer) {
        const Vector& input = trace.layer_inputs[layer];
        Matrix& wg = result.weight_grads[layer];
        const Matrix& wm = w.matrices[layer];
        // dL/dW[i][j] += delta[i] * input[j]
        for (int i = 0; i < wm.rows; ++i) {
            const double d = delta[i];
            if (d == 0.0) continue;
            double* row = &wg.values[static_cast<std::size_t>(i) * wm.cols];
            for (int j = 0; j < wm.cols; ++j) row[j] += d * input[j];
        }
        // dL/dinput[j] = sum_i delta[i] * W[i][j], then through the activation below
        Vector prev(static_cast<std::size_t>(wm.cols), 0.0);
        for (int i = 0; i < wm.rows; ++i) {
            const double d = delta[i];
            if (d == 0.0) continue;
            const double* row = &wm.values[static_cast<std::size_t>(i) * wm.cols];
            for (int j = 0; j < wm.cols; ++j) prev[j] += d * row[j];
        }
        if (layer > 0) {
            const Activation& act = spec.activations[layer - 1];
            const Vector& pre = trace.preactivations[layer - 1];
            for (std::size_t j = 0; j < prev.size(); ++j) prev[j] *= act.subgradient(pre[j]);
        }
        if (layer == 0) {
            for (std::size_t j = 0; j < prev.size(); ++j) result.input_grad[j] += prev[j];
        }
        delta = std::move(prev);
    }
}

// --- measuring function -------------------------------------------------

MeasuringFunction MeasuringFunction::identity() {
    return MeasuringFunction(MeasuringKind::identity, 0.0);
}

MeasuringFunction MeasuringFunction::log() {
    return MeasuringFunction(MeasuringKind::log_kind, 0.0);
}

MeasuringFunction MeasuringFunction::shifted_log(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ConfigError("shifted_log delta must lie in (0,1), got " + std::to_string(delta));
    }
    return MeasuringFunction(MeasuringKind::shifted_log, delta);
}

MeasuringFunction MeasuringFunction::from_name(const std::string& name) {
    if (name == "identity") return identity();
    if (name == "log") return log();
    if (name.rfind("shifted_log(", 0) == 0 && name.back() == ')') {
        const std::string arg = name.substr(12, name.size() - 13);
        try {
            return shifted_log(std::stod(arg));
        } catch (const std::invalid_argument&) {
            throw ConfigError("cannot parse shifted_log delta from '" + name + "'");
        }
    }
    throw ConfigError("unknown measuring function '" + name +
                      "' (kinds: identity, log, shifted_log(delta))");
}

std::string MeasuringFunction::name() const {
    switch (kind_) {
        case MeasuringKind::identity:
            return "identity";
        case MeasuringKind::log_kind:
            return "log";
        case MeasuringKind::shifted_log: {
            std::ostringstream os;
            os << "shifted_log(" << delta_ << ")";
            return os.str();
        }
    }
    return "?";
}

bool MeasuringFunction::contains(double x) const {
    switch (kind_) {
        case MeasuringKind::identity:
            return std::isfinite(x);
        case MeasuringKind::log_kind:
            return x > 0.0;
        case MeasuringKind::shifted_log:
            return x >= 0.0;
    }
    return false;
}

bool MeasuringFunction::contains_interval(double lo, double hi) const {
    if (lo > hi) return false;
    switch (kind_) {
        case MeasuringKind::identity:
            return true;
        case MeasuringKind::log_kind:
            return lo > 0.0;
        case MeasuringKind::shifted_log:
            return lo >= 0.0;
    }
    return false;
}

std::string MeasuringFunction::domain_description() const {
    switch (kind_) {
        case MeasuringKind::identity:
            return "(-inf, inf)";
        case MeasuringKind::log_kind:
            return "(0, inf)";
        case MeasuringKind::shifted_log:
            return "[0, inf)";
    }
    return "?";
}

double MeasuringFunction::operator()(double x) const {
    if (!contains(x)) {
        throw NumericError(name() + " undefined at " + std::to_string(x) + "; domain is " +
                           domain_description());
    }
    switch (kind_) {
        case MeasuringKind::identity:
            return x;
        case MeasuringKind::log_kind:
            return std::log(x);
        case MeasuringKind::shifted_log:
            return std::log(delta_ + (1.0 - delta_) * x);
    }
    return x;
}

double MeasuringFunction::derivative(double x) const {
    if (!contains(x)) {
        throw NumericError(name() + " derivative undefined at " + std::to_string(x) +
                           "; domain is " + domain_description());
    }
    switch (kind_) {
        case MeasuringKind::identity:
            return 1.0;
        case MeasuringKind::log_kind:
            return 1.0 / x;
        case MeasuringKind::shifted_log:
            return (1.0 - delta_) / (delta_ + (1.0 - delta_) * x);
    }
    return 1.0;
}

double MeasuringFunction::lipschitz_on(double lo, double hi) const {
    if (!contains_interval(lo, hi)) {
        throw NumericError(name() + " is not defined on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]; domain is " + domain_description());
    }
    switch (kind_) {
        case MeasuringKind::identity:
            return 1.0;
        case MeasuringKind::log_kind:
            return 1.0 / lo;
        case MeasuringKind::shifted_log:
            return derivative(lo);
    }
    return kInf;
}

double MeasuringFunction::range_bound_on(double lo, double hi) const {
    const double a = (*this)(lo);
    const double b = (*this)(hi);
    return std::max(std::abs(a), std::abs(b));
}

double apply_measuring(const MeasuringFunction& phi, MeasureRole role, double raw) {
    return role == MeasureRole::h_u ? phi(1.0 - raw) : phi(raw);
}

}  // namespace ganlab
