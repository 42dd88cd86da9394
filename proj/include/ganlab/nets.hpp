#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ganlab/linalg.hpp"
#include "ganlab/rng.hpp"

namespace ganlab {

/// Piecewise-linear activations only; other Lipschitz activations are
/// rejected at spec construction because the weight-count complexity scaling
/// used in `bounds` is specific to piecewise-linear networks.
enum class ActivationType { relu, leaky_relu, identity };

struct Activation {
    ActivationType type = ActivationType::relu;
    double slope = 0.0;              // leaky_relu only, in (0,1)
    double lipschitz_constant = 1.0; // 1 for all three kinds

    static Activation relu() { return {ActivationType::relu, 0.0, 1.0}; }
    static Activation identity() { return {ActivationType::identity, 0.0, 1.0}; }
    static Activation leaky(double slope);
    /// Parses "relu", "identity", "leaky_relu(0.2)".
    static Activation from_name(const std::string& name);
    std::string name() const;

    double apply(double x) const;
    /// Subgradient; relu and leaky_relu take the value 0 at the kink
    /// (fixed convention for determinism).
    double subgradient(double x) const;
    bool is_identity() const { return type == ActivationType::identity; }
};

/// Architecture of one constrained class: layer dimensions [p0..pd],
/// per-layer Frobenius norm caps, and per-hidden-layer activations.
struct NetworkSpec {
    std::vector<int> layer_dims;
    std::vector<double> norm_bounds;
    std::vector<Activation> activations;

    NetworkSpec() = default;
    NetworkSpec(std::vector<int> dims, std::vector<double> bounds, std::vector<Activation> acts);

    int depth() const { return static_cast<int>(norm_bounds.size()); }
    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }
    /// Dense entry count over all weight matrices.
    long long parameter_count() const;
    /// True when every hidden activation is the identity, i.e. the network is
    /// a product of matrices. Enables exact mean-propagation shortcuts.
    bool is_linear() const;

    void require_discriminator() const;  // final dimension must be 1
};

/// A concrete parameter point inside the constraint set: one matrix per
/// layer, each inside its Frobenius ball.
struct WeightAssignment {
    std::vector<Matrix> matrices;
};

/// Throws unless shapes match the spec and every matrix satisfies its norm
/// cap (with relative slack 1e-9 for projected points).
void validate_weights(const NetworkSpec& spec, const WeightAssignment& w);

WeightAssignment zero_weights(const NetworkSpec& spec);

/// Draws each matrix with i.i.d. uniform entries, rescales it onto its
/// sphere, then multiplies by a uniform radius factor, so the draw is
/// supported on the whole ball and always feasible.
WeightAssignment sample_weights(const NetworkSpec& spec, RngStream& rng);

// --- forward evaluation ------------------------------------------------

/// Scratch buffers so hot loops do not allocate.
struct ForwardWorkspace {
    Vector a, b;
};

/// f_w(x) = W_d sigma_{d-1}( ... sigma_1(W_1 x)); no bias terms anywhere.
double forward_discriminator(const NetworkSpec& spec, const WeightAssignment& w, const Vector& x);
Vector forward_generator(const NetworkSpec& spec, const WeightAssignment& theta, const Vector& z);
double forward_composed(const NetworkSpec& fspec, const WeightAssignment& w,
                        const NetworkSpec& gspec, const WeightAssignment& theta, const Vector& z);

/// Unchecked fast paths; callers must have validated weights once.
void forward_unchecked(const NetworkSpec& spec, const WeightAssignment& w, const Vector& x,
                       Vector& out, ForwardWorkspace& ws);
double forward_scalar_unchecked(const NetworkSpec& spec, const WeightAssignment& w,
                                const Vector& x, ForwardWorkspace& ws);

// --- backpropagation (for projected subgradient methods) ---------------

struct ForwardTrace {
    std::vector<Vector> layer_inputs;  // input to layer k (post-activation of k-1)
    std::vector<Vector> preactivations;
    Vector output;
};

void forward_with_trace(const NetworkSpec& spec, const WeightAssignment& w, const Vector& x,
                        ForwardTrace& trace);

struct BackpropResult {
    std::vector<Matrix> weight_grads;
    Vector input_grad;
};

/// Reverse pass given the gradient of some scalar loss w.r.t. the network
/// output. Accumulates into `result` when accumulate=true.
void backprop(const NetworkSpec& spec, const WeightAssignment& w, const ForwardTrace& trace,
              const Vector& output_grad, BackpropResult& result, bool accumulate);

BackpropResult zero_grads(const NetworkSpec& spec);

// --- measuring function -------------------------------------------------

enum class MeasuringKind { identity, log_kind, shifted_log };

/// Monotone increasing transform applied to discriminator outputs inside the
/// objective. identity is defined on all reals; log on (0, inf);
/// shifted_log(delta) on [0, inf) where it is globally (1-delta)/delta
/// Lipschitz. Evaluation outside the domain is a hard error, never clamped.
class MeasuringFunction {
public:
    static MeasuringFunction identity();
    static MeasuringFunction log();
    static MeasuringFunction shifted_log(double delta);
    /// Parses "identity", "log", "shifted_log(0.25)".
    static MeasuringFunction from_name(const std::string& name);

    MeasuringKind kind() const { return kind_; }
    double delta() const { return delta_; }
    std::string name() const;
    bool is_identity() const { return kind_ == MeasuringKind::identity; }

    bool contains(double x) const;
    /// [lo, hi] inside the domain? lo may be -inf only for identity.
    bool contains_interval(double lo, double hi) const;
    std::string domain_description() const;

    double operator()(double x) const;  // throws NumericError outside domain
    double derivative(double x) const;

    /// Lipschitz constant valid on [lo, hi] (inf when the interval touches a
    /// singularity); for monotone concave kinds this is the left endpoint slope.
    double lipschitz_on(double lo, double hi) const;
    /// Range bound: max |phi| over [lo, hi]; monotonicity makes this the
    /// larger endpoint magnitude.
    double range_bound_on(double lo, double hi) const;

private:
    MeasuringFunction(MeasuringKind k, double delta) : kind_(k), delta_(delta) {}
    MeasuringKind kind_;
    double delta_;
};

enum class MeasureRole { h_u, f1 };

/// h_u role evaluates phi(1 - raw); f1 role evaluates phi(raw).
double apply_measuring(const MeasuringFunction& phi, MeasureRole role, double raw);

}  // namespace ganlab
