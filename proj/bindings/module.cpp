#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ganlab/config.hpp"
#include "ganlab/emit.hpp"
#include "ganlab/errors.hpp"
#include "ganlab/verify.hpp"
#include "ganlab/version.hpp"

namespace py = pybind11;
using namespace ganlab;

namespace {

using PyMatrix = std::vector<std::vector<double>>;
using PyWeights = std::vector<PyMatrix>;

WeightAssignment weights_from_py(const PyWeights& pw) {
    WeightAssignment w;
    for (const PyMatrix& pm : pw) {
        if (pm.empty() || pm.front().empty()) {
            throw NumericError("weight matrices must have at least one row and column");
        }
        const std::size_t cols = pm.front().size();
        std::vector<double> values;
        for (const auto& row : pm) {
            if (row.size() != cols) throw NumericError("weight matrix rows differ in length");
            values.insert(values.end(), row.begin(), row.end());
        }
        w.matrices.emplace_back(static_cast<int>(pm.size()), static_cast<int>(cols),
                                std::move(values));
    }
    return w;
}

PyWeights weights_to_py(const WeightAssignment& w) {
    PyWeights out;
    for (const Matrix& m : w.matrices) {
        PyMatrix pm;
        for (int i = 0; i < m.rows; ++i) {
            std::vector<double> row(m.values.begin() + static_cast<long>(i) * m.cols,
                                    m.values.begin() + static_cast<long>(i + 1) * m.cols);
            pm.push_back(std::move(row));
        }
        out.push_back(std::move(pm));
    }
    return out;
}

NetworkSpec spec_from_py(const std::vector<int>& dims, const std::vector<double>& bounds,
                         const std::vector<std::string>& activations) {
    std::vector<Activation> acts;
    for (const std::string& a : activations) acts.push_back(Activation::from_name(a));
    return NetworkSpec(dims, bounds, acts);
}

OptimOptions optim_from_py(const std::string& method, int grid_points, long long param_cap,
                           std::uint64_t seed) {
    OptimOptions o;
    o.method = method_from_name(method);
    o.grid.points_per_param = grid_points;
    o.grid.param_cap = param_cap;
    o.seed = seed;
    return o;
}

py::dict sup_result_to_py(const SupResult& r) {
    py::dict d;
    d["value"] = r.value;
    d["argmax_weights"] = weights_to_py(r.argmax);
    d["method"] = method_name(r.method);
    py::dict diag;
    diag["restarts_used"] = r.diagnostics.restarts_used;
    diag["iterations"] = r.diagnostics.iterations;
    diag["best_restart"] = r.diagnostics.best_restart;
    diag["converged"] = r.diagnostics.converged;
    diag["grid_points"] = r.diagnostics.grid_points;
    d["diagnostics"] = diag;
    return d;
}

py::dict gap_record_to_py(const GapRecord& r) {
    py::dict d;
    d["error_kind"] = error_kind_name(r.error_kind);
    d["n"] = r.n;
    d["m"] = r.m;
    d["replicate"] = r.replicate;
    d["gap"] = r.gap;
    d["abs_mode"] = r.abs_mode ? "on" : "off";
    d["sup_method"] = method_name(r.sup_method);
    d["seed"] = r.seed;
    d["flagged_negative"] = r.flagged_negative;
    return d;
}

py::dict rate_fit_to_py(const RateFit& f) {
    py::dict d;
    d["slope"] = f.slope;
    d["intercept"] = f.intercept;
    d["r_squared"] = f.r_squared;
    d["regressor"] = regressor_name(f.regressor);
    d["points_used"] = f.points_used;
    py::list pts;
    for (const RatePoint& p : f.points) {
        py::dict pd;
        pd["n"] = p.n;
        pd["summary_gap"] = p.summary_gap;
        pd["q25"] = p.q25;
        pd["q75"] = p.q75;
        pd["predicted"] = p.predicted;
        pd["excluded"] = p.excluded;
        pts.append(pd);
    }
    d["points"] = pts;
    return d;
}

std::vector<GapRecord> records_from_pairs(const std::vector<std::pair<long, double>>& pairs) {
    std::vector<GapRecord> records;
    int rep = 0;
    long last_n = -1;
    for (const auto& [n, gap] : pairs) {
        GapRecord r;
        r.n = n;
        r.m = n;
        r.replicate = n == last_n ? ++rep : (rep = 0);
        last_n = n;
        r.gap = gap;
        records.push_back(r);
    }
    return records;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "norm-constrained GAN objectives: closed-form constants, sup/inf distances, "
              "and generalization-gap experiments";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<NetworkSpec>(m, "NetworkSpec")
        .def(py::init(&spec_from_py), py::arg("layer_dims"), py::arg("norm_bounds"),
             py::arg("activations") = std::vector<std::string>{})
        .def_readonly("layer_dims", &NetworkSpec::layer_dims)
        .def_readonly("norm_bounds", &NetworkSpec::norm_bounds)
        .def_property_readonly("activations",
                               [](const NetworkSpec& s) {
                                   std::vector<std::string> names;
                                   for (const Activation& a : s.activations)
                                       names.push_back(a.name());
                                   return names;
                               })
        .def("depth", &NetworkSpec::depth)
        .def("parameter_count", &NetworkSpec::parameter_count)
        .def("is_linear", &NetworkSpec::is_linear);

    py::class_<DistributionSpec>(m, "DistributionSpec")
        .def_property_readonly("dimension", &DistributionSpec::dimension)
        .def("norm_radius", &DistributionSpec::norm_radius);

    m.def("uniform_ball", &DistributionSpec::uniform_ball, py::arg("dimension"),
          py::arg("radius"));
    m.def("uniform_cube", &DistributionSpec::uniform_cube, py::arg("dimension"),
          py::arg("half_width"));
    m.def(
        "empirical",
        [](const std::vector<Vector>& points) { return DistributionSpec::empirical(points); },
        py::arg("points"));
    m.def(
        "pushforward",
        [](const NetworkSpec& gspec, const PyWeights& theta, const DistributionSpec& base) {
            return DistributionSpec::pushforward(gspec, weights_from_py(theta), base);
        },
        py::arg("generator"), py::arg("theta"), py::arg("base"));

    m.def(
        "sample_weights",
        [](const NetworkSpec& spec, std::uint64_t seed) {
            RngStream rng(seed);
            return weights_to_py(sample_weights(spec, rng));
        },
        py::arg("spec"), py::arg("seed"));

    m.def(
        "forward_discriminator",
        [](const NetworkSpec& spec, const PyWeights& w, const Vector& x) {
            return forward_discriminator(spec, weights_from_py(w), x);
        },
        py::arg("spec"), py::arg("weights"), py::arg("x"));
    m.def(
        "forward_generator",
        [](const NetworkSpec& spec, const PyWeights& theta, const Vector& z) {
            return forward_generator(spec, weights_from_py(theta), z);
        },
        py::arg("spec"), py::arg("weights"), py::arg("z"));
    m.def(
        "forward_composed",
        [](const NetworkSpec& fspec, const PyWeights& w, const NetworkSpec& gspec,
           const PyWeights& theta, const Vector& z) {
            return forward_composed(fspec, weights_from_py(w), gspec, weights_from_py(theta), z);
        },
        py::arg("fspec"), py::arg("w"), py::arg("gspec"), py::arg("theta"), py::arg("z"));

    m.def(
        "apply_measuring",
        [](const std::string& phi, const std::string& role, double raw) {
            const MeasureRole r = role == "h_u" ? MeasureRole::h_u : MeasureRole::f1;
            return apply_measuring(MeasuringFunction::from_name(phi), r, raw);
        },
        py::arg("phi"), py::arg("role"), py::arg("raw"));

    m.def(
        "compute_bound_report",
        [](const NetworkSpec& fspec, const NetworkSpec& gspec, const std::string& phi, double b_x,
           double b_z, std::optional<PyWeights> weights_f, std::optional<PyWeights> weights_g) {
            std::optional<WeightAssignment> wf, wg;
            if (weights_f) wf = weights_from_py(*weights_f);
            if (weights_g) wg = weights_from_py(*weights_g);
            const BoundReport r =
                compute_bound_report(fspec, gspec, MeasuringFunction::from_name(phi), b_x, b_z,
                                     wf ? &*wf : nullptr, wg ? &*wg : nullptr);
            py::dict d;
            d["u_w"] = r.u_w;
            d["u_v"] = r.u_v;
            d["k1"] = r.k1;
            d["k2"] = r.k2;
            d["k3"] = r.k3;
            d["k4"] = r.k4;
            d["layers_f"] = r.layers_f;
            d["layers_g"] = r.layers_g;
            d["weight_count_f"] = r.weight_count_f;
            d["weight_count_g"] = r.weight_count_g;
            d["vc_f"] = r.vc_f;
            d["vc_fg"] = r.vc_fg;
            d["b_x"] = r.b_x;
            d["b_z"] = r.b_z;
            return d;
        },
        py::arg("fspec"), py::arg("gspec"), py::arg("phi") = "identity", py::arg("b_x") = 1.0,
        py::arg("b_z") = 1.0, py::arg("weights_f") = py::none(),
        py::arg("weights_g") = py::none());

    m.def("vc_scaling", &vc_scaling, py::arg("layers"), py::arg("nonzero_weights"));

    m.def(
        "draw_samples",
        [](const DistributionSpec& target, const DistributionSpec& base, long n, long m,
           std::uint64_t seed) {
            const SampleSet s = draw_samples(target, base, n, m, seed);
            return py::make_tuple(s.x_samples, s.z_samples);
        },
        py::arg("target"), py::arg("base"), py::arg("n"), py::arg("m"), py::arg("seed"));

    m.def(
        "objective_at",
        [](const NetworkSpec& fspec, const NetworkSpec& gspec, const std::string& phi,
           bool abs_mode, const PyWeights& theta, const PyWeights& w,
           const std::vector<Vector>& x_samples, const std::vector<Vector>& z_samples) {
            const ObjectiveInstance inst{fspec, gspec, MeasuringFunction::from_name(phi),
                                         abs_mode};
            SampleSet data;
            data.x_samples = x_samples;
            data.z_samples = z_samples;
            return objective_at(inst, weights_from_py(theta), weights_from_py(w),
                                Variant::empirical_mn, data);
        },
        py::arg("fspec"), py::arg("gspec"), py::arg("phi"), py::arg("abs_mode"), py::arg("theta"),
        py::arg("w"), py::arg("x_samples"), py::arg("z_samples"),
        "Empirical two-sample objective at an explicit (theta, w).");

    m.def(
        "distance",
        [](const NetworkSpec& fspec, const NetworkSpec& gspec, const std::string& phi,
           bool abs_mode, const std::string& variant, const PyWeights& theta,
           const DistributionSpec& target, const DistributionSpec& base, long n, long m,
           long n_pop, const std::string& method, std::uint64_t seed, int grid_points,
           long long param_cap) {
            const ObjectiveInstance inst{fspec, gspec, MeasuringFunction::from_name(phi),
                                         abs_mode};
            const Variant v = variant_from_name(variant);
            const std::uint64_t pop_seed = derive_seed(seed, {1});
            const std::uint64_t data_seed = derive_seed(seed, {2});
            std::optional<ObjectiveEvaluator> ev;
            if (v == Variant::empirical_mn) {
                ev.emplace(ObjectiveEvaluator::from_samples(
                    inst, draw_samples(target, base, n, m, data_seed)));
            } else if (v == Variant::half_empirical) {
                auto sides = make_population_sides(inst, target, base, n_pop, pop_seed,
                                                   PopulationMethod::automatic);
                ev.emplace(ObjectiveEvaluator::half(
                    inst, draw_samples(target, base, n, 0, data_seed),
                    std::move(sides.second)));
            } else {
                auto sides = make_population_sides(inst, target, base, n_pop, pop_seed,
                                                   PopulationMethod::automatic);
                ev.emplace(ObjectiveEvaluator::population(inst, std::move(sides.first),
                                                          std::move(sides.second)));
            }
            const SupResult sup = sup_over_w(
                *ev, weights_from_py(theta),
                optim_from_py(method, grid_points, param_cap, derive_seed(seed, {3})));
            return sup_result_to_py(sup);
        },
        py::arg("fspec"), py::arg("gspec"), py::arg("phi"), py::arg("abs_mode"),
        py::arg("variant"), py::arg("theta"), py::arg("target"), py::arg("base"),
        py::arg("n") = 0, py::arg("m") = 0, py::arg("n_pop") = 100000,
        py::arg("method") = "grid", py::arg("seed") = 0, py::arg("grid_points") = 201,
        py::arg("param_cap") = 3,
        "Sup-distance at an explicit theta; returns the sup value, argmax and diagnostics.");

    m.def(
        "rademacher_estimate",
        [](const NetworkSpec& fspec, const std::vector<Vector>& points, int replicates,
           const std::string& method, std::uint64_t seed, std::optional<NetworkSpec> gspec,
           std::optional<std::string> phi, int grid_points, long long param_cap) {
            RademacherOptions opt;
            opt.optim = optim_from_py(method, grid_points, param_cap, derive_seed(seed, {9}));
            if (gspec) opt.cls = RademacherClass::composed;
            if (phi) opt.phi = MeasuringFunction::from_name(*phi);
            return rademacher_estimate(fspec, gspec ? &*gspec : nullptr, points, replicates, opt,
                                       seed);
        },
        py::arg("fspec"), py::arg("points"), py::arg("replicates"), py::arg("method") = "grid",
        py::arg("seed") = 0, py::arg("gspec") = py::none(), py::arg("phi") = py::none(),
        py::arg("grid_points") = 201, py::arg("param_cap") = 3);

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            const ParsedConfig cfg = parse_config_json(nlohmann::json::parse(config_json));
            if (cfg.task != ParsedConfig::Task::experiment) {
                throw ConfigError("run_experiment needs a config with task \"experiment\"");
            }
            const ExperimentResult result = run_error_experiment(cfg.experiment);
            py::dict d;
            py::list records;
            for (const GapRecord& r : result.records) records.append(gap_record_to_py(r));
            d["records"] = records;
            d["population_inf"] = result.population_inf;
            d["notes"] = result.notes;
            d["config_hash"] = cfg.config_hash;
            try {
                const bool use_mean =
                    cfg.experiment.error_kind == ErrorKind::expectation_liang;
                d["rate_fit"] = rate_fit_to_py(fit_rate(
                    result.records, RegressorKind::log_sqrt_logn_over_n, use_mean));
            } catch (const NumericError&) {
                d["rate_fit"] = py::none();
            }
            return d;
        },
        py::arg("config_json"),
        "Full generalization-gap grid run from a JSON config string.");

    m.def(
        "fit_rate",
        [](const std::vector<std::pair<long, double>>& gaps, const std::string& regressor,
           bool use_mean) {
            return rate_fit_to_py(
                fit_rate(records_from_pairs(gaps), regressor_from_name(regressor), use_mean));
        },
        py::arg("gaps"), py::arg("regressor") = "log_sqrt_logn_over_n",
        py::arg("use_mean") = false, "Fit a rate to (n, gap) pairs.");

    m.def(
        "dyadic_blocking_summary",
        [](const std::vector<std::pair<long, double>>& gaps) {
            py::list out;
            for (const DyadicBlock& b : dyadic_blocking_summary(records_from_pairs(gaps))) {
                py::dict d;
                d["k"] = b.k;
                d["lo"] = b.lo;
                d["hi"] = b.hi;
                d["max_normalized"] = b.max_normalized;
                d["count"] = b.count;
                out.append(d);
            }
            return out;
        },
        py::arg("gaps"));

    m.def("example_config", &example_config, py::arg("kind"));
    m.def(
        "parse_config",
        [](const std::string& config_json) {
            const ParsedConfig cfg = parse_config_json(nlohmann::json::parse(config_json));
            py::dict d;
            d["task"] = cfg.task == ParsedConfig::Task::experiment
                            ? "experiment"
                            : (cfg.task == ParsedConfig::Task::bounds ? "bounds" : "distance");
            d["canonical"] = cfg.canonical.dump(2);
            d["config_hash"] = cfg.config_hash;
            return d;
        },
        py::arg("config_json"), "Validate a config string; returns its canonical form and hash.");

    m.def(
        "run_verification_suites",
        [](int instances, int draws, std::uint64_t seed) {
            py::dict d;
            const EnvelopeSuiteResult env = run_envelope_suite(10, draws, seed);
            d["envelope_violations"] = env.total_violations();
            d["envelope_draws"] = env.draws;
            const LipschitzSuiteResult lip = run_lipschitz_suite(10, draws, seed + 1);
            d["lipschitz_violations"] = lip.violations;
            const OracleSuiteResult oracle = run_oracle_equivalence_suite(instances, seed + 2);
            d["oracle_within_tolerance"] = oracle.within_tolerance;
            d["oracle_within_slack"] = oracle.within_slack;
            d["oracle_instances"] = oracle.instances.size();
            const DecompositionSuiteResult dec = run_decomposition_suite(instances / 2, seed + 3);
            d["decomposition_nonnegative"] = dec.nonnegative_slack;
            d["decomposition_instances"] = dec.records.size();
            d["decomposition_min_slack"] = dec.min_slack;
            return d;
        },
        py::arg("instances") = 20, py::arg("draws") = 1000, py::arg("seed") = 20240901);
}
