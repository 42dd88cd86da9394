#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ganlab/config.hpp"
#include "ganlab/errors.hpp"

using namespace ganlab;
using nlohmann::json;

namespace {

json minimal_theorem1() {
    return json{
        {"task", "experiment"},
        {"error_kind", "theorem1"},
        {"discriminator",
         {{"layer_dims", {1, 1}}, {"norm_bounds", {1.0}}, {"activations", json::array()}}},
        {"generator",
         {{"layer_dims", {1, 1}}, {"norm_bounds", {1.0}}, {"activations", json::array()}}},
        {"target", {{"kind", "uniform_ball"}, {"dimension", 1}, {"radius", 1.0}}},
        {"base", {{"kind", "uniform_ball"}, {"dimension", 1}, {"radius", 1.0}}},
        {"n_grid", {64, 128, 256}},
        {"master_seed", 12345}};
}

}  // namespace

TEST_CASE("minimal config picks up the documented defaults") {
    const ParsedConfig cfg = parse_config_json(minimal_theorem1());
    CHECK(cfg.task == ParsedConfig::Task::experiment);
    CHECK(cfg.experiment.n_pop == 100000);
    CHECK(cfg.experiment.replicates == 200);
    CHECK(cfg.experiment.abs_mode);
    CHECK(cfg.experiment.sup_method == Method::pgd);
    CHECK(cfg.experiment.grid.points_per_param == 201);
    CHECK(cfg.experiment.grid.param_cap == 3);
    CHECK(cfg.experiment.pgd.restarts == 20);
    CHECK(cfg.experiment.pgd.iterations == 500);
    CHECK(cfg.experiment.pgd.step0 == 0.1);
    CHECK(cfg.experiment.pgd.decay == 0.99);
    CHECK(cfg.experiment.phi.is_identity());
    // defaults are echoed into the canonical form
    CHECK(cfg.canonical["n_pop"] == 100000);
    CHECK(cfg.canonical["replicates"] == 200);
    CHECK(cfg.config_hash.size() == 16);
}

TEST_CASE("missing master_seed names the field") {
    json j = minimal_theorem1();
    j.erase("master_seed");
    try {
        parse_config_json(j);
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("master_seed required") != std::string::npos);
    }
}

TEST_CASE("unknown keys are errors, not warnings") {
    json j = minimal_theorem1();
    j["n_grib"] = json::array({64});
    try {
        parse_config_json(j);
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("n_grib") != std::string::npos);
    }
}

TEST_CASE("unsorted grids and bad values are constraint violations") {
    json j = minimal_theorem1();
    j["n_grid"] = {256, 64};
    CHECK_THROWS_AS(parse_config_json(j), ConfigError);
    j = minimal_theorem1();
    j["replicates"] = 0;
    CHECK_THROWS_AS(parse_config_json(j), ConfigError);
    j = minimal_theorem1();
    j["abs_mode"] = "maybe";
    CHECK_THROWS_AS(parse_config_json(j), ConfigError);
    j = minimal_theorem1();
    j["sup_method"] = "newton";
    CHECK_THROWS_AS(parse_config_json(j), ConfigError);
}

TEST_CASE("log measuring function is rejected at parse time by the envelope precheck") {
    json j = minimal_theorem1();
    j["measuring_function"] = "log";
    try {
        parse_config_json(j);
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("log") != std::string::npos);
        CHECK(msg.find("domain") != std::string::npos);
    }
}

TEST_CASE("canonical form round-trips to an identical config") {
    const ParsedConfig first = parse_config_json(minimal_theorem1());
    const ParsedConfig second = parse_config_json(first.canonical);
    CHECK(first.canonical == second.canonical);
    CHECK(first.config_hash == second.config_hash);
}

TEST_CASE("every example config parses and matches its task") {
    for (const std::string kind : {"theorem1", "sup_gap_arora", "plugin_zhang", "plugin_ji",
                                   "expectation_liang"}) {
        const ParsedConfig cfg = parse_config_json(json::parse(example_config(kind)));
        CHECK(cfg.task == ParsedConfig::Task::experiment);
        CHECK(error_kind_name(cfg.experiment.error_kind) == kind);
    }
    CHECK(parse_config_json(json::parse(example_config("bounds"))).task ==
          ParsedConfig::Task::bounds);
    CHECK(parse_config_json(json::parse(example_config("distance"))).task ==
          ParsedConfig::Task::distance);
    CHECK_THROWS_AS(example_config("nonsense"), ConfigError);
}

TEST_CASE("network and distribution serialization round-trips") {
    NetworkSpec spec({2, 3, 1}, {1.5, 0.5}, {Activation::leaky(0.2)});
    const NetworkSpec back = network_spec_from_json(network_spec_to_json(spec), "spec");
    CHECK(back.layer_dims == spec.layer_dims);
    CHECK(back.norm_bounds == spec.norm_bounds);
    CHECK(back.activations[0].name() == "leaky_relu(0.2)");

    WeightAssignment w{{Matrix(2, 1, {0.25, -0.5}), Matrix(1, 2, {1.0, 0.0})}};
    const WeightAssignment wback = weights_from_json(weights_to_json(w), "w");
    REQUIRE(wback.matrices.size() == 2);
    CHECK(wback.matrices[0].values == w.matrices[0].values);
    CHECK(wback.matrices[1].rows == 1);

    const DistributionSpec push = DistributionSpec::pushforward(
        NetworkSpec({1, 2}, {1.0}, {}), WeightAssignment{{Matrix(2, 1, {0.3, 0.4})}},
        DistributionSpec::uniform_cube(1, 0.75));
    const DistributionSpec dback = distribution_from_json(distribution_to_json(push), "d");
    CHECK(dback.kind() == DistributionSpec::Kind::pushforward);
    CHECK(dback.norm_radius() == doctest::Approx(push.norm_radius()));
}

TEST_CASE("distance configs validate sample requirements") {
    json j = json::parse(example_config("distance"));
    j["variant"] = "empirical_mn";
    CHECK_THROWS_AS(parse_config_json(j), ConfigError);  // needs n and m
    j["n"] = 10;
    j["m"] = 10;
    CHECK_NOTHROW(parse_config_json(j));
}

TEST_CASE("stable hash is platform-independent bytes arithmetic") {
    CHECK(stable_hash_hex("") == "cbf29ce484222325");
    CHECK(stable_hash_hex("a") == stable_hash_hex("a"));
    CHECK(stable_hash_hex("a") != stable_hash_hex("b"));
}
