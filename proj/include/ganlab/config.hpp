#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "ganlab/experiment.hpp"

namespace ganlab {

/// One distance query: evaluate the sup-distance at an explicit theta.
struct DistanceRequest {
    NetworkSpec fspec;
    NetworkSpec gspec;
    MeasuringFunction phi = MeasuringFunction::identity();
    bool abs_mode = true;
    Variant variant = Variant::population;
    WeightAssignment theta;
    DistributionSpec target = DistributionSpec::uniform_ball(1, 1.0);
    DistributionSpec base = DistributionSpec::uniform_ball(1, 1.0);
    long n = 0;  // sample sizes for the empirical variants
    long m = 0;
    long n_pop = 100000;
    Method method = Method::pgd;
    std::uint64_t master_seed = 0;
    GridOptions grid;
    PgdOptions pgd;
    PopulationMethod population_method = PopulationMethod::automatic;
};

struct BoundsRequest {
    NetworkSpec fspec;
    NetworkSpec gspec;
    MeasuringFunction phi = MeasuringFunction::identity();
    double b_x = 1.0;
    double b_z = 1.0;
    std::optional<WeightAssignment> weights_f;  // actual nonzero counts when given
    std::optional<WeightAssignment> weights_g;
};

/// A fully validated config file: one of the three request kinds plus the
/// canonicalized config (defaults applied, keys sorted) and its stable hash.
struct ParsedConfig {
    enum class Task { experiment, bounds, distance };
    Task task = Task::experiment;
    ExperimentConfig experiment;
    BoundsRequest bounds;
    DistanceRequest distance;
    nlohmann::json canonical;
    std::string config_hash;  // 16 hex digits, stable across platforms
};

/// Parses and validates a config file. Unknown keys are errors, missing
/// required fields name themselves, defaults are applied and echoed into the
/// canonical form. Experiment and distance configs run the envelope precheck,
/// so inadmissible measuring functions are rejected here.
ParsedConfig parse_config(const std::string& path);
ParsedConfig parse_config_json(const nlohmann::json& j);

/// Serialization helpers shared by the CLI and the bindings.
nlohmann::json network_spec_to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json weights_to_json(const WeightAssignment& w);
WeightAssignment weights_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json distribution_to_json(const DistributionSpec& d);
DistributionSpec distribution_from_json(const nlohmann::json& j, const std::string& where);

/// 64-bit FNV-1a over the canonical config bytes, as 16 hex digits.
std::string stable_hash_hex(const std::string& bytes);

/// A valid config template for each error kind, plus "bounds" and "distance".
std::string example_config(const std::string& kind);

}  // namespace ganlab
