#pragma once

#include "ganlab/nets.hpp"

namespace ganlab {

/// Every closed-form constant for one (discriminator, generator, phi,
/// B_X, B_Z) tuple: global Lipschitz products, pre- and post-phi envelopes,
/// weight counts, and complexity scalings.
struct BoundReport {
    double u_w = 0.0;  // product of discriminator norm caps and activation constants
    double u_v = 0.0;  // same for the generator
    double k1 = 0.0;   // sup |f_w(x)| over the class and the input ball
    double k2 = 0.0;   // sup |f_w(g_theta(z))|
    double k3 = 0.0;   // sup |phi(f_w(x))|
    double k4 = 0.0;   // sup |phi(1 - f_w(g_theta(z)))|
    int layers_f = 0;  // d
    int layers_g = 0;  // s
    long long weight_count_f = 0;
    long long weight_count_g = 0;
    double vc_f = 0.0;   // scaling for the discriminator class
    double vc_fg = 0.0;  // scaling for the composed class, layers d+s-1
    double b_x = 0.0;
    double b_z = 0.0;
};

/// Complexity scaling layers * W * ln W (natural log), with the log factor
/// replaced by 1 for W < 2 so degenerate sizes stay positive. This is a
/// scaling up to an unknown universal constant, not a literal dimension.
double vc_scaling(int layers, long long nonzero_weights);

/// Computes the full report. Weight assignments are optional: when given,
/// their actual nonzero counts feed the weight counts, otherwise dense
/// counts are used. Throws when phi's domain cannot cover [-K1, K1] or
/// [1-K2, 1+K2], naming the interval and the domain.
BoundReport compute_bound_report(const NetworkSpec& fspec, const NetworkSpec& gspec,
                                 const MeasuringFunction& phi, double b_x, double b_z,
                                 const WeightAssignment* weights_f = nullptr,
                                 const WeightAssignment* weights_g = nullptr);

/// Lipschitz product of one network: prod of norm caps times prod of hidden
/// activation constants.
double lipschitz_product(const NetworkSpec& spec);

}  // namespace ganlab
