#include "ganlab/config.hpp"

#include <fstream>
#include <set>

#include "ganlab/bounds.hpp"
#include "ganlab/errors.hpp"

namespace ganlab {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& item : j.items()) {
        if (allowed.find(item.key()) == allowed.end()) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

const json& require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(std::string(key) + " required in " + where);
    return *it;
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + " must be a number");
    return j.get<double>();
}

long as_integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ConfigError(where + " must be an integer");
    return j.get<long>();
}

std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw ConfigError(where + " must be a string");
    return j.get<std::string>();
}

bool abs_mode_from_json(const json& j, const std::string& where) {
    const std::string s = as_string(j, where);
    if (s == "on") return true;
    if (s == "off") return false;
    throw ConfigError(where + " must be \"on\" or \"off\"");
}

std::uint64_t as_seed(const json& j, const std::string& where) {
    if (!j.is_number_unsigned() && !j.is_number_integer()) {
        throw ConfigError(where + " must be an unsigned 64-bit integer");
    }
    if (j.is_number_integer() && j.get<long long>() < 0) {
        throw ConfigError(where + " must be nonnegative");
    }
    return j.get<std::uint64_t>();
}

PopulationMethod population_method_from_json(const json& j, const std::string& where) {
    const std::string s = as_string(j, where);
    if (s == "auto") return PopulationMethod::automatic;
    if (s == "plugin") return PopulationMethod::plugin;
    throw ConfigError(where + " must be \"auto\" or \"plugin\"");
}

GridOptions grid_options_from(const json& j, GridOptions defaults, const std::string& where) {
    GridOptions g = defaults;
    if (j.contains("grid_points")) {
        g.points_per_param = static_cast<int>(as_integer(j["grid_points"], where + ".grid_points"));
        if (g.points_per_param < 2) throw ConfigError(where + ".grid_points must be at least 2");
    }
    if (j.contains("grid_param_cap")) {
        g.param_cap = as_integer(j["grid_param_cap"], where + ".grid_param_cap");
        if (g.param_cap < 1) throw ConfigError(where + ".grid_param_cap must be positive");
    }
    return g;
}

PgdOptions pgd_options_from(const json& j, const std::string& where) {
    PgdOptions p;
    if (!j.contains("pgd")) return p;
    const json& sub = j["pgd"];
    check_keys(sub, {"restarts", "iterations", "step", "decay"}, where + ".pgd");
    if (sub.contains("restarts")) {
        p.restarts = static_cast<int>(as_integer(sub["restarts"], where + ".pgd.restarts"));
        if (p.restarts < 1) throw ConfigError(where + ".pgd.restarts must be positive");
    }
    if (sub.contains("iterations")) {
        p.iterations = static_cast<int>(as_integer(sub["iterations"], where + ".pgd.iterations"));
        if (p.iterations < 1) throw ConfigError(where + ".pgd.iterations must be positive");
    }
    if (sub.contains("step")) {
        p.step0 = as_number(sub["step"], where + ".pgd.step");
        if (!(p.step0 > 0.0)) throw ConfigError(where + ".pgd.step must be positive");
    }
    if (sub.contains("decay")) {
        p.decay = as_number(sub["decay"], where + ".pgd.decay");
        if (!(p.decay > 0.0 && p.decay <= 1.0)) {
            throw ConfigError(where + ".pgd.decay must lie in (0, 1]");
        }
    }
    return p;
}

json pgd_options_to_json(const PgdOptions& p) {
    return json{{"restarts", p.restarts},
                {"iterations", p.iterations},
                {"step", p.step0},
                {"decay", p.decay}};
}

std::vector<long> grid_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + " must be a list of integers");
    std::vector<long> out;
    for (const json& v : j) out.push_back(as_integer(v, where + " entry"));
    return out;
}

}  // namespace

json network_spec_to_json(const NetworkSpec& spec) {
    json acts = json::array();
    for (const Activation& a : spec.activations) acts.push_back(a.name());
    return json{{"layer_dims", spec.layer_dims}, {"norm_bounds", spec.norm_bounds},
                {"activations", acts}};
}

NetworkSpec network_spec_from_json(const json& j, const std::string& where) {
    check_keys(j, {"layer_dims", "norm_bounds", "activations"}, where);
    const json& dims_j = require(j, "layer_dims", where);
    const json& bounds_j = require(j, "norm_bounds", where);
    if (!dims_j.is_array() || !bounds_j.is_array()) {
        throw ConfigError(where + ".layer_dims and .norm_bounds must be lists");
    }
    std::vector<int> dims;
    for (const json& v : dims_j) dims.push_back(static_cast<int>(as_integer(v, where + ".layer_dims entry")));
    std::vector<double> bounds;
    for (const json& v : bounds_j) bounds.push_back(as_number(v, where + ".norm_bounds entry"));
    std::vector<Activation> acts;
    if (j.contains("activations")) {
        for (const json& v : j["activations"]) {
            acts.push_back(Activation::from_name(as_string(v, where + ".activations entry")));
        }
    }
    try {
        return NetworkSpec(std::move(dims), std::move(bounds), std::move(acts));
    } catch (const std::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

json weights_to_json(const WeightAssignment& w) {
    json out = json::array();
    for (const Matrix& m : w.matrices) {
        json rows = json::array();
        for (int i = 0; i < m.rows; ++i) {
            json row = json::array();
            for (int j2 = 0; j2 < m.cols; ++j2) row.push_back(m.at(i, j2));
            rows.push_back(std::move(row));
        }
        out.push_back(std::move(rows));
    }
    return out;
}

WeightAssignment weights_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + " must be a list of matrices");
    WeightAssignment w;
    for (const json& mj : j) {
        if (!mj.is_array() || mj.empty()) throw ConfigError(where + " matrices must be row lists");
        const std::size_t cols = mj.front().is_array() ? mj.front().size() : 0;
        if (cols == 0) throw ConfigError(where + " matrix rows must be non-empty lists");
        std::vector<double> values;
        for (const json& row : mj) {
            if (!row.is_array() || row.size() != cols) {
                throw ConfigError(where + " matrix rows have inconsistent lengths");
            }
            for (const json& v : row) values.push_back(as_number(v, where + " entry"));
        }
        w.matrices.emplace_back(static_cast<int>(mj.size()), static_cast<int>(cols),
                                std::move(values));
    }
    return w;
}

json distribution_to_json(const DistributionSpec& d) {
    switch (d.kind()) {
        case DistributionSpec::Kind::uniform_ball:
            return json{{"kind", "uniform_ball"}, {"dimension", d.dimension()},
                        {"radius", d.radius()}};
        case DistributionSpec::Kind::uniform_cube:
            return json{{"kind", "uniform_cube"}, {"dimension", d.dimension()},
                        {"half_width", d.radius()}};
        case DistributionSpec::Kind::pushforward:
            return json{{"kind", "pushforward"},
                        {"generator", network_spec_to_json(*d.generator_spec())},
                        {"theta", weights_to_json(*d.generator_weights())},
                        {"base", distribution_to_json(*d.base())}};
        case DistributionSpec::Kind::empirical: {
            json pts = json::array();
            for (const Vector& p : d.points()) pts.push_back(p);
            return json{{"kind", "empirical"}, {"points", pts}};
        }
    }
    throw ConfigError("unknown distribution kind");
}

DistributionSpec distribution_from_json(const json& j, const std::string& where) {
    const std::string kind = as_string(require(j, "kind", where), where + ".kind");
    if (kind == "uniform_ball") {
        check_keys(j, {"kind", "dimension", "radius"}, where);
        return DistributionSpec::uniform_ball(
            static_cast<int>(as_integer(require(j, "dimension", where), where + ".dimension")),
            as_number(require(j, "radius", where), where + ".radius"));
    }
    if (kind == "uniform_cube") {
        check_keys(j, {"kind", "dimension", "half_width"}, where);
        return DistributionSpec::uniform_cube(
            static_cast<int>(as_integer(require(j, "dimension", where), where + ".dimension")),
            as_number(require(j, "half_width", where), where + ".half_width"));
    }
    if (kind == "pushforward") {
        check_keys(j, {"kind", "generator", "theta", "base"}, where);
        NetworkSpec gspec = network_spec_from_json(require(j, "generator", where), where + ".generator");
        WeightAssignment theta = weights_from_json(require(j, "theta", where), where + ".theta");
        DistributionSpec base = distribution_from_json(require(j, "base", where), where + ".base");
        try {
            return DistributionSpec::pushforward(std::move(gspec), std::move(theta),
                                                 std::move(base));
        } catch (const std::exception& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    if (kind == "empirical") {
        check_keys(j, {"kind", "points"}, where);
        const json& pts = require(j, "points", where);
        if (!pts.is_array()) throw ConfigError(where + ".points must be a list of vectors");
        std::vector<Vector> points;
        for (const json& p : pts) {
            if (!p.is_array()) throw ConfigError(where + ".points entries must be lists");
            Vector v;
            for (const json& x : p) v.push_back(as_number(x, where + ".points entry"));
            points.push_back(std::move(v));
        }
        try {
            return DistributionSpec::empirical(std::move(points));
        } catch (const std::exception& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    throw ConfigError(where + ".kind '" + kind +
                      "' unknown (kinds: uniform_ball, uniform_cube, pushforward, empirical)");
}

std::string stable_hash_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

namespace {

ParsedConfig parse_experiment(const json& j) {
    check_keys(j, {"task", "error_kind", "discriminator", "generator", "measuring_function",
                   "target", "base", "n_grid", "m_grid", "replicates", "n_pop", "sup_method",
                   "inf_method", "abs_mode", "master_seed", "epsilon_slack", "grid_points",
                   "grid_param_cap", "pgd", "population_method", "threads"},
               "experiment config");
    ParsedConfig out;
    out.task = ParsedConfig::Task::experiment;
    ExperimentConfig& c = out.experiment;
    c.error_kind = error_kind_from_name(
        as_string(require(j, "error_kind", "experiment config"), "error_kind"));
    c.fspec = network_spec_from_json(require(j, "discriminator", "experiment config"),
                                     "discriminator");
    c.gspec = network_spec_from_json(require(j, "generator", "experiment config"), "generator");
    if (j.contains("measuring_function")) {
        c.phi = MeasuringFunction::from_name(as_string(j["measuring_function"],
                                                       "measuring_function"));
    }
    c.target = distribution_from_json(require(j, "target", "experiment config"), "target");
    c.base = distribution_from_json(require(j, "base", "experiment config"), "base");
    c.n_grid = grid_from_json(require(j, "n_grid", "experiment config"), "n_grid");
    if (j.contains("m_grid")) c.m_grid = grid_from_json(j["m_grid"], "m_grid");
    if (j.contains("replicates")) {
        c.replicates = static_cast<int>(as_integer(j["replicates"], "replicates"));
    }
    if (j.contains("n_pop")) c.n_pop = as_integer(j["n_pop"], "n_pop");
    if (j.contains("sup_method")) {
        c.sup_method = method_from_name(as_string(j["sup_method"], "sup_method"));
    }
    if (j.contains("inf_method")) {
        c.inf_method = method_from_name(as_string(j["inf_method"], "inf_method"));
    }
    if (j.contains("abs_mode")) c.abs_mode = abs_mode_from_json(j["abs_mode"], "abs_mode");
    c.master_seed = as_seed(require(j, "master_seed", "experiment config"), "master_seed");
    if (j.contains("epsilon_slack")) {
        c.epsilon_slack = as_number(j["epsilon_slack"], "epsilon_slack");
    }
    c.grid = grid_options_from(j, GridOptions{}, "experiment config");
    c.pgd = pgd_options_from(j, "experiment config");
    if (j.contains("population_method")) {
        c.population_method =
            population_method_from_json(j["population_method"], "population_method");
    }
    if (j.contains("threads")) {
        c.threads = static_cast<int>(as_integer(j["threads"], "threads"));
        if (c.threads < 0) throw ConfigError("threads must be nonnegative");
    }
    try {
        c.validate();
    } catch (const NumericError& e) {
        throw ConfigError(std::string("experiment config rejected: ") + e.what());
    }

    json canon;
    canon["task"] = "experiment";
    canon["error_kind"] = error_kind_name(c.error_kind);
    canon["discriminator"] = network_spec_to_json(c.fspec);
    canon["generator"] = network_spec_to_json(c.gspec);
    canon["measuring_function"] = c.phi.name();
    canon["target"] = distribution_to_json(c.target);
    canon["base"] = distribution_to_json(c.base);
    canon["n_grid"] = c.n_grid;
    canon["m_grid"] = c.m_grid;
    canon["replicates"] = c.replicates;
    canon["n_pop"] = c.n_pop;
    canon["sup_method"] = method_name(c.sup_method);
    canon["inf_method"] = method_name(c.inf_method);
    canon["abs_mode"] = c.abs_mode ? "on" : "off";
    canon["master_seed"] = c.master_seed;
    canon["epsilon_slack"] = c.epsilon_slack;
    canon["grid_points"] = c.grid.points_per_param;
    canon["grid_param_cap"] = c.grid.param_cap;
    canon["pgd"] = pgd_options_to_json(c.pgd);
    canon["population_method"] =
        c.population_method == PopulationMethod::automatic ? "auto" : "plugin";
    canon["threads"] = c.threads;
    out.canonical = std::move(canon);
    return out;
}

ParsedConfig parse_bounds(const json& j) {
    check_keys(j, {"task", "discriminator", "generator", "measuring_function", "b_x", "b_z",
                   "weights_f", "weights_g"},
               "bounds config");
    ParsedConfig out;
    out.task = ParsedConfig::Task::bounds;
    BoundsRequest& b = out.bounds;
    b.fspec = network_spec_from_json(require(j, "discriminator", "bounds config"), "discriminator");
    b.gspec = network_spec_from_json(require(j, "generator", "bounds config"), "generator");
    if (j.contains("measuring_function")) {
        b.phi = MeasuringFunction::from_name(as_string(j["measuring_function"],
                                                       "measuring_function"));
    }
    b.b_x = as_number(require(j, "b_x", "bounds config"), "b_x");
    b.b_z = as_number(require(j, "b_z", "bounds config"), "b_z");
    if (j.contains("weights_f")) b.weights_f = weights_from_json(j["weights_f"], "weights_f");
    if (j.contains("weights_g")) b.weights_g = weights_from_json(j["weights_g"], "weights_g");

    json canon;
    canon["task"] = "bounds";
    canon["discriminator"] = network_spec_to_json(b.fspec);
    canon["generator"] = network_spec_to_json(b.gspec);
    canon["measuring_function"] = b.phi.name();
    canon["b_x"] = b.b_x;
    canon["b_z"] = b.b_z;
    if (b.weights_f) canon["weights_f"] = weights_to_json(*b.weights_f);
    if (b.weights_g) canon["weights_g"] = weights_to_json(*b.weights_g);
    out.canonical = std::move(canon);
    return out;
}

ParsedConfig parse_distance(const json& j) {
    check_keys(j, {"task", "discriminator", "generator", "measuring_function", "variant", "theta",
                   "target", "base", "n", "m", "n_pop", "method", "abs_mode", "master_seed",
                   "grid_points", "grid_param_cap", "pgd", "population_method"},
               "distance config");
    ParsedConfig out;
    out.task = ParsedConfig::Task::distance;
    DistanceRequest& d = out.distance;
    d.fspec = network_spec_from_json(require(j, "discriminator", "distance config"),
                                     "discriminator");
    d.gspec = network_spec_from_json(require(j, "generator", "distance config"), "generator");
    if (j.contains("measuring_function")) {
        d.phi = MeasuringFunction::from_name(as_string(j["measuring_function"],
                                                       "measuring_function"));
    }
    d.variant = variant_from_name(as_string(require(j, "variant", "distance config"), "variant"));
    d.theta = weights_from_json(require(j, "theta", "distance config"), "theta");
    d.target = distribution_from_json(require(j, "target", "distance config"), "target");
    d.base = distribution_from_json(require(j, "base", "distance config"), "base");
    if (j.contains("n")) d.n = as_integer(j["n"], "n");
    if (j.contains("m")) d.m = as_integer(j["m"], "m");
    if (j.contains("n_pop")) d.n_pop = as_integer(j["n_pop"], "n_pop");
    if (j.contains("method")) d.method = method_from_name(as_string(j["method"], "method"));
    if (j.contains("abs_mode")) d.abs_mode = abs_mode_from_json(j["abs_mode"], "abs_mode");
    d.master_seed = as_seed(require(j, "master_seed", "distance config"), "master_seed");
    d.grid = grid_options_from(j, GridOptions{}, "distance config");
    d.pgd = pgd_options_from(j, "distance config");
    if (j.contains("population_method")) {
        d.population_method =
            population_method_from_json(j["population_method"], "population_method");
    }
    if (d.variant == Variant::empirical_mn && (d.n < 1 || d.m < 1)) {
        throw ConfigError("empirical_mn distance query needs n and m sample counts");
    }
    if (d.variant == Variant::half_empirical && d.n < 1) {
        throw ConfigError("half_empirical distance query needs an n sample count");
    }
    try {
        validate_weights(d.gspec, d.theta);
        compute_bound_report(d.fspec, d.gspec, d.phi, d.target.norm_radius(),
                             d.base.norm_radius());
    } catch (const NumericError& e) {
        throw ConfigError(std::string("distance config rejected: ") + e.what());
    }

    json canon;
    canon["task"] = "distance";
    canon["discriminator"] = network_spec_to_json(d.fspec);
    canon["generator"] = network_spec_to_json(d.gspec);
    canon["measuring_function"] = d.phi.name();
    canon["variant"] = variant_name(d.variant);
    canon["theta"] = weights_to_json(d.theta);
    canon["target"] = distribution_to_json(d.target);
    canon["base"] = distribution_to_json(d.base);
    canon["n"] = d.n;
    canon["m"] = d.m;
    canon["n_pop"] = d.n_pop;
    canon["method"] = method_name(d.method);
    canon["abs_mode"] = d.abs_mode ? "on" : "off";
    canon["master_seed"] = d.master_seed;
    canon["grid_points"] = d.grid.points_per_param;
    canon["grid_param_cap"] = d.grid.param_cap;
    canon["pgd"] = pgd_options_to_json(d.pgd);
    canon["population_method"] =
        d.population_method == PopulationMethod::automatic ? "auto" : "plugin";
    out.canonical = std::move(canon);
    return out;
}

}  // namespace

ParsedConfig parse_config_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    const std::string task = as_string(require(j, "task", "config"), "task");
    ParsedConfig out;
    if (task == "experiment") {
        out = parse_experiment(j);
    } else if (task == "bounds") {
        out = parse_bounds(j);
    } else if (task == "distance") {
        out = parse_distance(j);
    } else {
        throw ConfigError("unknown task '" + task + "' (kinds: experiment, bounds, distance)");
    }
    out.config_hash = stable_hash_hex(out.canonical.dump());
    return out;
}

ParsedConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not well-formed: " + e.what());
    }
    return parse_config_json(j);
}

std::string example_config(const std::string& kind) {
    json scalar_f = {{"layer_dims", {1, 1}}, {"norm_bounds", {1.0}},
                     {"activations", json::array()}};
    json scalar_g = scalar_f;
    json uniform1 = {{"kind", "uniform_ball"}, {"dimension", 1}, {"radius", 1.0}};
    json pushforward_target = {{"kind", "pushforward"},
                               {"generator", scalar_g},
                               {"theta", {{{0.7}}}},
                               {"base", uniform1}};
    json two_point_base = {{"kind", "empirical"}, {"points", {{0.1}, {1.9}}}};
    json pushforward_of_points = {{"kind", "pushforward"},
                                  {"generator", scalar_g},
                                  {"theta", {{{0.7}}}},
                                  {"base", two_point_base}};

    if (kind == "bounds") {
        return json{{"task", "bounds"},
                    {"discriminator", {{"layer_dims", {2, 2, 1}}, {"norm_bounds", {2.0, 3.0}},
                                       {"activations", {"relu"}}}},
                    {"generator", {{"layer_dims", {2, 2}}, {"norm_bounds", {2.0}},
                                   {"activations", json::array()}}},
                    {"measuring_function", "identity"},
                    {"b_x", 1.0},
                    {"b_z", 1.0}}
            .dump(2);
    }
    if (kind == "distance") {
        return json{{"task", "distance"},       {"discriminator", scalar_f},
                    {"generator", scalar_g},    {"measuring_function", "identity"},
                    {"variant", "population"},  {"theta", {{{0.7}}}},
                    {"target", pushforward_target}, {"base", uniform1},
                    {"method", "grid"},         {"abs_mode", "on"},
                    {"master_seed", 12345},     {"n_pop", 100000}}
            .dump(2);
    }

    const ErrorKind ek = error_kind_from_name(kind);  // validates the name
    json j;
    j["task"] = "experiment";
    j["error_kind"] = kind;
    j["discriminator"] = scalar_f;
    j["generator"] = scalar_g;
    j["measuring_function"] = "identity";
    // The realizable scalar toy: symmetric uniform base for the inf-difference
    // kinds, a two-point base for the plug-in kinds so the population
    // landscape discriminates theta.
    const bool plugin_kind = ek == ErrorKind::plugin_zhang || ek == ErrorKind::plugin_ji ||
                             ek == ErrorKind::expectation_liang;
    j["target"] = plugin_kind ? pushforward_of_points : pushforward_target;
    j["base"] = plugin_kind ? two_point_base : uniform1;
    j["n_grid"] = {64, 128, 256, 512, 1024};
    j["replicates"] = 50;
    j["n_pop"] = 100000;
    j["sup_method"] = "grid";
    j["inf_method"] = "grid";
    j["abs_mode"] = "on";
    j["master_seed"] = 12345;
    return j.dump(2);
}

}  // namespace ganlab
