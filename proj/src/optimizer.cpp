#include "ganlab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "ganlab/errors.hpp"

namespace ganlab {

std::string method_name(Method m) { return m == Method::pgd ? "pgd" : "grid"; }

Method method_from_name(const std::string& name) {
    if (name == "pgd") return Method::pgd;
    if (name == "grid") return Method::grid;
    throw ConfigError("unknown method '" + name + "' (kinds: pgd, grid)");
}

namespace {

long long grid_size_or_throw(const NetworkSpec& spec, const GridOptions& opt) {
    if (opt.points_per_param < 2) {
        throw ConfigError("grid needs at least 2 points per parameter, got " +
                          std::to_string(opt.points_per_param));
    }
    const long long params = spec.parameter_count();
    if (params > opt.param_cap) {
        throw NumericError("grid oracle requested for " + std::to_string(params) +
                           " parameters, above the cap of " + std::to_string(opt.param_cap) +
                           "; no silent fallback");
    }
    long long total = 1;
    for (long long i = 0; i < params; ++i) total *= opt.points_per_param;
    return total;
}

void check_finite_value(double v) {
    if (!std::isfinite(v)) {
        throw NumericError("objective evaluated to a non-finite value " + std::to_string(v));
    }
}

void pgd_step(const NetworkSpec& spec, WeightAssignment& w, const BackpropResult& grad,
              double step, double direction) {
    // Normalized subgradient step: the step size is the distance moved, so
    // small raw subgradients do not stall the search. A zero subgradient
    // (inside a dead piecewise-linear region) leaves the point fixed.
    double sq = 0.0;
    for (const Matrix& g : grad.weight_grads) {
        for (double v : g.values) sq += v * v;
    }
    if (sq < 1e-30) return;
    const double scale = direction * step / std::sqrt(sq);
    for (std::size_t l = 0; l < w.matrices.size(); ++l) {
        Matrix& m = w.matrices[l];
        const Matrix& g = grad.weight_grads[l];
        for (std::size_t i = 0; i < m.values.size(); ++i) {
            m.values[i] += scale * g.values[i];
        }
        project_frobenius_ball_inplace(m, spec.norm_bounds[l]);
    }
}

}  // namespace

void enumerate_grid(const NetworkSpec& spec, const GridOptions& opt,
                    const std::function<void(const WeightAssignment&)>& fn) {
    grid_size_or_throw(spec, opt);
    const int g = opt.points_per_param;
    const long long params = spec.parameter_count();

    // Per-parameter 1-D grids span [-M, M] of the owning layer; each filled
    // layer is then radially mapped into its ball.
    std::vector<int> layer_of, offset_in_layer;
    layer_of.reserve(static_cast<std::size_t>(params));
    for (std::size_t l = 0; l < spec.norm_bounds.size(); ++l) {
        const int entries = spec.layer_dims[l + 1] * spec.layer_dims[l];
        for (int e = 0; e < entries; ++e) {
            layer_of.push_back(static_cast<int>(l));
            offset_in_layer.push_back(e);
        }
    }

    WeightAssignment scratch = zero_weights(spec);
    std::vector<int> idx(static_cast<std::size_t>(params), 0);
    while (true) {
        for (long long p = 0; p < params; ++p) {
            const int l = layer_of[static_cast<std::size_t>(p)];
            const double m = spec.norm_bounds[static_cast<std::size_t>(l)];
            const double step = 2.0 * m / static_cast<double>(g - 1);
            scratch.matrices[static_cast<std::size_t>(l)]
                .values[static_cast<std::size_t>(offset_in_layer[static_cast<std::size_t>(p)])] =
                -m + step * idx[static_cast<std::size_t>(p)];
        }
        for (std::size_t l = 0; l < scratch.matrices.size(); ++l) {
            project_frobenius_ball_inplace(scratch.matrices[l], spec.norm_bounds[l]);
        }
        fn(scratch);

        // Row-major odometer: the last parameter varies fastest.
        long long p = params - 1;
        while (p >= 0) {
            if (++idx[static_cast<std::size_t>(p)] < g) break;
            idx[static_cast<std::size_t>(p)] = 0;
            --p;
        }
        if (p < 0) break;
    }
}

double grid_cell_diagonal(const NetworkSpec& spec, const GridOptions& opt) {
    if (opt.points_per_param < 2) return 0.0;
    double sq = 0.0;
    for (std::size_t l = 0; l < spec.norm_bounds.size(); ++l) {
        const double step = 2.0 * spec.norm_bounds[l] / static_cast<double>(opt.points_per_param - 1);
        sq += step * step * spec.layer_dims[l + 1] * spec.layer_dims[l];
    }
    return std::sqrt(sq);
}

SupResult maximize_over_weights(const NetworkSpec& spec, const BlockObjective& obj,
                                const OptimOptions& opt) {
    SupResult best;
    best.method = opt.method;
    bool have = false;

    if (opt.method == Method::grid) {
        long long count = 0;
        enumerate_grid(spec, opt.grid, [&](const WeightAssignment& w) {
            const double v = obj.value(w);
            check_finite_value(v);
            if (!have || v > best.value) {
                have = true;
                best.value = v;
                best.argmax = w;
            }
            ++count;
        });
        best.diagnostics.grid_points = count;
        return best;
    }

    const PgdOptions& p = opt.pgd;
    BackpropResult grad = zero_grads(spec);
    for (int r = 0; r < p.restarts; ++r) {
        RngStream stream(derive_seed(opt.seed, {static_cast<std::uint64_t>(r)}));
        WeightAssignment w = sample_weights(spec, stream);
        double restart_best = -std::numeric_limits<double>::infinity();
        WeightAssignment restart_arg = w;
        int best_iter = 0;
        double step = p.step0;
        for (int t = 0; t < p.iterations; ++t) {
            const double v = obj.value_and_grad(w, grad);
            check_finite_value(v);
            if (v > restart_best) {
                restart_best = v;
                restart_arg = w;
                best_iter = t;
            }
            pgd_step(spec, w, grad, step, +1.0);
            step *= p.decay;
        }
        const double v = obj.value(w);
        check_finite_value(v);
        if (v > restart_best) {
            restart_best = v;
            restart_arg = w;
            best_iter = p.iterations;
        }
        if (!have || restart_best > best.value) {
            have = true;
            best.value = restart_best;
            best.argmax = restart_arg;
            best.diagnostics.best_restart = r;
            best.diagnostics.converged = best_iter <= (9 * p.iterations) / 10;
        }
    }
    best.diagnostics.restarts_used = p.restarts;
    best.diagnostics.iterations = p.iterations;
    return best;
}

namespace {

/// The GAN objective at fixed theta, as a block objective over w.
struct BoundObjective final : BlockObjective {
    const ObjectiveEvaluator::ThetaBound* bound;
    double value(const WeightAssignment& w) const override { return bound->value(w); }
    double value_and_grad(const WeightAssignment& w, BackpropResult& grad) const override {
        return bound->value_and_grad_w(w, grad);
    }
};

}  // namespace

SupResult sup_over_w(const ObjectiveEvaluator& ev, const WeightAssignment& theta,
                     const OptimOptions& opt) {
    const ObjectiveEvaluator::ThetaBound bound = ev.bind_theta(theta);
    BoundObjective obj;
    obj.bound = &bound;
    SupResult r = maximize_over_weights(ev.instance().fspec, obj, opt);
    // Re-evaluate at the argmax so the stored value is exactly the objective
    // at the stored weights.
    r.value = bound.value(r.argmax);
    return r;
}

double distance_value(const ObjectiveEvaluator& ev, const WeightAssignment& theta,
                      const OptimOptions& opt) {
    return sup_over_w(ev, theta, opt).value;
}

namespace {

double inner_sup_value(const ObjectiveEvaluator& ev, const InfOptions& opt,
                       const ObjectiveEvaluator::ThetaBound& bound, SupResult* out) {
    BoundObjective obj;
    obj.bound = &bound;
    const NetworkSpec& fspec = ev.instance().fspec;
    OptimOptions sup_opt = opt.sup;
    SupResult r = maximize_over_weights(fspec, obj, sup_opt);
    r.value = bound.value(r.argmax);
    if (sup_opt.method == Method::pgd && opt.floor_pgd_sup_with_grid &&
        fspec.parameter_count() <= sup_opt.grid.param_cap) {
        OptimOptions grid_opt = sup_opt;
        grid_opt.method = Method::grid;
        SupResult gr = maximize_over_weights(fspec, obj, grid_opt);
        gr.value = bound.value(gr.argmax);
        if (gr.value > r.value) r = gr;
    }
    if (out != nullptr) *out = r;
    return r.value;
}

}  // namespace

InfResult inf_over_theta(const ObjectiveEvaluator& ev, const InfOptions& opt) {
    const NetworkSpec& gspec = ev.instance().gspec;
    InfResult best;
    bool have = false;

    if (opt.method == Method::grid) {
        long index = 0;
        enumerate_grid(gspec, opt.grid, [&](const WeightAssignment& theta) {
            const ObjectiveEvaluator::ThetaBound bound = ev.bind_theta(theta);
            SupResult inner;
            const double v = inner_sup_value(ev, opt, bound, &inner);
            check_finite_value(v);
            if (!have || v < best.value) {
                have = true;
                best.value = v;
                best.theta = theta;
                best.inner = std::move(inner);
                best.grid_index = index;
            }
            ++index;
        });
        if (opt.epsilon_slack > 0.0) {
            // Approximate minimizer: the first grid point (row-major) whose
            // value is within the slack of the infimum.
            long idx = 0;
            bool done = false;
            const double cutoff = best.value + opt.epsilon_slack;
            enumerate_grid(gspec, opt.grid, [&](const WeightAssignment& theta) {
                if (done || idx++ >= best.grid_index) return;
                const ObjectiveEvaluator::ThetaBound bound = ev.bind_theta(theta);
                SupResult inner;
                const double v = inner_sup_value(ev, opt, bound, &inner);
                if (v <= cutoff) {
                    best.value = v;
                    best.theta = theta;
                    best.inner = std::move(inner);
                    best.grid_index = idx - 1;
                    done = true;
                }
            });
        }
        return best;
    }

    // Alternating projected subgradient: ascend in w a few steps, then one
    // descent step in theta, per outer iteration.
    const PgdOptions& p = opt.pgd;
    const int inner_ascent_steps = 5;
    BackpropResult wgrad = zero_grads(ev.instance().fspec);
    BackpropResult tgrad = zero_grads(gspec);
    std::vector<std::pair<double, WeightAssignment>> finals;
    for (int r = 0; r < p.restarts; ++r) {
        RngStream stream(derive_seed(opt.seed, {0xa17eULL, static_cast<std::uint64_t>(r)}));
        WeightAssignment theta = sample_weights(gspec, stream);
        WeightAssignment w = sample_weights(ev.instance().fspec, stream);
        double step = p.step0;
        for (int t = 0; t < p.iterations; ++t) {
            const ObjectiveEvaluator::ThetaBound bound = ev.bind_theta(theta);
            for (int k = 0; k < inner_ascent_steps; ++k) {
                const double v = bound.value_and_grad_w(w, wgrad);
                check_finite_value(v);
                pgd_step(ev.instance().fspec, w, wgrad, step, +1.0);
            }
            const double v = ev.value_and_grad_theta(theta, w, tgrad);
            check_finite_value(v);
            pgd_step(gspec, theta, tgrad, step, -1.0);
            step *= p.decay;
        }
        SupResult final_sup;
        const ObjectiveEvaluator::ThetaBound bound = ev.bind_theta(theta);
        const double v = inner_sup_value(ev, opt, bound, &final_sup);
        finals.emplace_back(v, theta);
        if (!have || v < best.value) {
            have = true;
            best.value = v;
            best.theta = theta;
            best.inner = std::move(final_sup);
        }
    }
    if (opt.epsilon_slack > 0.0) {
        for (std::size_t r = 0; r < finals.size(); ++r) {
            if (finals[r].first <= best.value + opt.epsilon_slack) {
                if (finals[r].first != best.value) {
                    const ObjectiveEvaluator::ThetaBound bound = ev.bind_theta(finals[r].second);
                    SupResult inner;
                    best.value = inner_sup_value(ev, opt, bound, &inner);
                    best.theta = finals[r].second;
                    best.inner = std::move(inner);
                }
                break;
            }
        }
    }
    return best;
}

// --- Rademacher -----------------------------------------------------------

namespace {

/// (2/n) sum_i tau_i phi(f_w(p_i)) over fixed points and signs.
struct RademacherObjective final : BlockObjective {
    const NetworkSpec* fspec = nullptr;
    const std::vector<Vector>* points = nullptr;
    const std::vector<double>* signs = nullptr;
    const MeasuringFunction* phi = nullptr;  // nullptr means raw outputs
    bool fast_linear = false;
    Vector weighted_mean;  // (2/n) sum tau_i p_i when the fast path holds
    mutable ForwardWorkspace ws;

    void prepare() {
        fast_linear = (phi == nullptr || phi->is_identity()) && fspec->is_linear();
        if (fast_linear) {
            weighted_mean.assign(points->front().size(), 0.0);
            const double scale = 2.0 / static_cast<double>(points->size());
            for (std::size_t i = 0; i < points->size(); ++i) {
                const Vector& pt = (*points)[i];
                for (std::size_t j = 0; j < pt.size(); ++j) {
                    weighted_mean[j] += scale * (*signs)[i] * pt[j];
                }
            }
        }
    }

    double value(const WeightAssignment& w) const override {
        if (fast_linear) return forward_scalar_unchecked(*fspec, w, weighted_mean, ws);
        const double scale = 2.0 / static_cast<double>(points->size());
        double acc = 0.0;
        for (std::size_t i = 0; i < points->size(); ++i) {
            double raw = forward_scalar_unchecked(*fspec, w, (*points)[i], ws);
            if (phi != nullptr) raw = (*phi)(raw);
            acc += scale * (*signs)[i] * raw;
        }
        return acc;
    }

    double value_and_grad(const WeightAssignment& w, BackpropResult& grad) const override {
        for (Matrix& g : grad.weight_grads) std::fill(g.values.begin(), g.values.end(), 0.0);
        grad.input_grad.assign(fspec->input_dim(), 0.0);
        ForwardTrace trace;
        Vector upstream(1, 0.0);
        if (fast_linear) {
            forward_with_trace(*fspec, w, weighted_mean, trace);
            upstream[0] = 1.0;
            backprop(*fspec, w, trace, upstream, grad, true);
            return trace.output[0];
        }
        const double scale = 2.0 / static_cast<double>(points->size());
        double acc = 0.0;
        for (std::size_t i = 0; i < points->size(); ++i) {
            forward_with_trace(*fspec, w, (*points)[i], trace);
            const double raw = trace.output[0];
            const double phi_val = phi != nullptr ? (*phi)(raw) : raw;
            const double phi_der = phi != nullptr ? phi->derivative(raw) : 1.0;
            acc += scale * (*signs)[i] * phi_val;
            upstream[0] = scale * (*signs)[i] * phi_der;
            backprop(*fspec, w, trace, upstream, grad, true);
        }
        return acc;
    }
};

double composed_replicate_sup(const NetworkSpec& fspec, const NetworkSpec& gspec,
                              const std::vector<Vector>& z_points,
                              const std::vector<double>& signs, const MeasuringFunction* phi,
                              const OptimOptions& opt, std::uint64_t seed) {
    if (opt.method == Method::grid) {
        if (fspec.parameter_count() + gspec.parameter_count() > opt.grid.param_cap) {
            throw NumericError("joint grid over " +
                               std::to_string(fspec.parameter_count() + gspec.parameter_count()) +
                               " parameters exceeds the cap of " +
                               std::to_string(opt.grid.param_cap));
        }
        GridOptions unconstrained = opt.grid;
        unconstrained.param_cap = opt.grid.param_cap;  // per-network checks stay within the joint cap
        double best = -std::numeric_limits<double>::infinity();
        ForwardWorkspace ws;
        std::vector<Vector> pushed(z_points.size());
        enumerate_grid(gspec, unconstrained, [&](const WeightAssignment& theta) {
            for (std::size_t i = 0; i < z_points.size(); ++i) {
                forward_unchecked(gspec, theta, z_points[i], pushed[i], ws);
            }
            RademacherObjective obj;
            obj.fspec = &fspec;
            obj.points = &pushed;
            obj.signs = &signs;
            obj.phi = phi;
            obj.prepare();
            enumerate_grid(fspec, unconstrained, [&](const WeightAssignment& w) {
                best = std::max(best, obj.value(w));
            });
        });
        check_finite_value(best);
        return best;
    }

    // Joint projected ascent over (w, theta).
    const PgdOptions& p = opt.pgd;
    double best = -std::numeric_limits<double>::infinity();
    BackpropResult fgrad = zero_grads(fspec);
    BackpropResult ggrad = zero_grads(gspec);
    BackpropResult fgrad_single = zero_grads(fspec);
    ForwardTrace gtrace, ftrace;
    const double scale = 2.0 / static_cast<double>(z_points.size());
    for (int r = 0; r < p.restarts; ++r) {
        RngStream stream(derive_seed(seed, {0x7adeULL, static_cast<std::uint64_t>(r)}));
        WeightAssignment w = sample_weights(fspec, stream);
        WeightAssignment theta = sample_weights(gspec, stream);
        double step = p.step0;
        for (int t = 0; t <= p.iterations; ++t) {
            for (Matrix& g : fgrad.weight_grads) std::fill(g.values.begin(), g.values.end(), 0.0);
            for (Matrix& g : ggrad.weight_grads) std::fill(g.values.begin(), g.values.end(), 0.0);
            double acc = 0.0;
            Vector upstream(1, 0.0);
            for (std::size_t i = 0; i < z_points.size(); ++i) {
                forward_with_trace(gspec, theta, z_points[i], gtrace);
                forward_with_trace(fspec, w, gtrace.output, ftrace);
                const double raw = ftrace.output[0];
                const double phi_val = phi != nullptr ? (*phi)(raw) : raw;
                const double phi_der = phi != nullptr ? phi->derivative(raw) : 1.0;
                acc += scale * signs[i] * phi_val;
                upstream[0] = scale * signs[i] * phi_der;
                backprop(fspec, w, ftrace, upstream, fgrad, true);
                upstream[0] = 1.0;
                backprop(fspec, w, ftrace, upstream, fgrad_single, false);
                Vector g_up = fgrad_single.input_grad;
                for (double& v : g_up) v *= scale * signs[i] * phi_der;
                backprop(gspec, theta, gtrace, g_up, ggrad, true);
            }
            check_finite_value(acc);
            best = std::max(best, acc);
            if (t == p.iterations) break;
            pgd_step(fspec, w, fgrad, step, +1.0);
            pgd_step(gspec, theta, ggrad, step, +1.0);
            step *= p.decay;
        }
    }
    return best;
}

}  // namespace

double rademacher_estimate(const NetworkSpec& fspec, const NetworkSpec* gspec,
                           const std::vector<Vector>& points, int replicates,
                           const RademacherOptions& opt, std::uint64_t seed) {
    if (replicates < 1) throw ConfigError("rademacher_estimate needs at least one replicate");
    if (points.empty()) throw NumericError("rademacher_estimate needs at least one point");
    fspec.require_discriminator();
    if (opt.cls == RademacherClass::composed && gspec == nullptr) {
        throw ConfigError("composed Rademacher class needs a generator spec");
    }

    double acc = 0.0;
    for (int rep = 0; rep < replicates; ++rep) {
        RngStream stream(derive_seed(seed, {static_cast<std::uint64_t>(rep)}));
        std::vector<double> signs(points.size());
        for (double& s : signs) s = stream.rademacher();

        if (opt.cls == RademacherClass::discriminator) {
            RademacherObjective obj;
            obj.fspec = &fspec;
            obj.points = &points;
            obj.signs = &signs;
            obj.phi = opt.phi.has_value() ? &*opt.phi : nullptr;
            obj.prepare();
            OptimOptions o = opt.optim;
            o.seed = derive_seed(seed, {0xbeefULL, static_cast<std::uint64_t>(rep)});
            acc += maximize_over_weights(fspec, obj, o).value;
        } else {
            acc += composed_replicate_sup(
                fspec, *gspec, points, signs, opt.phi.has_value() ? &*opt.phi : nullptr, opt.optim,
                derive_seed(seed, {0xbeefULL, static_cast<std::uint64_t>(rep)}));
        }
    }
    return acc / static_cast<double>(replicates);
}

}  // namespace ganlab
