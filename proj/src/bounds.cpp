#include "ganlab/bounds.hpp"

#include <cmath>
#include <string>

#include "ganlab/errors.hpp"

namespace ganlab {

double lipschitz_product(const NetworkSpec& spec) {
    double p = 1.0;
    for (double b : spec.norm_bounds) p *= b;
    for (const Activation& a : spec.activations) p *= a.lipschitz_constant;
    return p;
}

double vc_scaling(int layers, long long nonzero_weights) {
    if (layers < 1) {
        throw NumericError("vc_scaling needs at least one layer, got " + std::to_string(layers));
    }
    if (nonzero_weights < 1) {
        throw NumericError("vc_scaling needs at least one weight, got " +
                           std::to_string(nonzero_weights));
    }
    const double w = static_cast<double>(nonzero_weights);
    const double log_factor = nonzero_weights >= 2 ? std::log(w) : 1.0;
    return static_cast<double>(layers) * w * log_factor;
}

namespace {

long long nonzero_or_dense_count(const NetworkSpec& spec, const WeightAssignment* weights) {
    if (weights == nullptr) return spec.parameter_count();
    validate_weights(spec, *weights);
    long long count = 0;
    for (const Matrix& m : weights->matrices) count += m.nonzero_count();
    return count;
}

void require_covered(const MeasuringFunction& phi, double lo, double hi, const char* which) {
    if (!phi.contains_interval(lo, hi)) {
        throw NumericError("measuring function " + phi.name() + " with domain " +
                           phi.domain_description() + " cannot cover the interval [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "] required for " +
                           which);
    }
}

}  // namespace

BoundReport compute_bound_report(const NetworkSpec& fspec, const NetworkSpec& gspec,
                                 const MeasuringFunction& phi, double b_x, double b_z,
                                 const WeightAssignment* weights_f,
                                 const WeightAssignment* weights_g) {
    fspec.require_discriminator();
    if (gspec.output_dim() != fspec.input_dim()) {
        throw ConfigError("generator output dimension " + std::to_string(gspec.output_dim()) +
                          " does not match discriminator input dimension " +
                          std::to_string(fspec.input_dim()));
    }
    if (!(b_x > 0.0) || !(b_z > 0.0)) {
        throw NumericError("input norm radii must be positive, got B_X=" + std::to_string(b_x) +
                           ", B_Z=" + std::to_string(b_z));
    }

    BoundReport r;
    r.b_x = b_x;
    r.b_z = b_z;
    r.layers_f = fspec.depth();
    r.layers_g = gspec.depth();
    r.u_w = lipschitz_product(fspec);
    r.u_v = lipschitz_product(gspec);
    r.k1 = r.u_w * b_x;
    r.k2 = r.u_w * r.u_v * b_z;

    require_covered(phi, -r.k1, r.k1, "K3");
    require_covered(phi, 1.0 - r.k2, 1.0 + r.k2, "K4");
    r.k3 = phi.range_bound_on(-r.k1, r.k1);
    r.k4 = phi.range_bound_on(1.0 - r.k2, 1.0 + r.k2);

    r.weight_count_f = nonzero_or_dense_count(fspec, weights_f);
    r.weight_count_g = nonzero_or_dense_count(gspec, weights_g);
    r.vc_f = vc_scaling(r.layers_f, r.weight_count_f);
    r.vc_fg = vc_scaling(r.layers_f + r.layers_g - 1, r.weight_count_f + r.weight_count_g);
    return r;
}

}  // namespace ganlab
