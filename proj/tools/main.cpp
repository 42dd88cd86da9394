#include <clocale>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ganlab/config.hpp"
#include "ganlab/emit.hpp"
#include "ganlab/errors.hpp"
#include "ganlab/verify.hpp"
#include "ganlab/version.hpp"

namespace {

using ganlab::ConfigError;
using ganlab::IoError;
using ganlab::NumericError;
using nlohmann::json;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> sup_method;
    std::optional<std::string> abs_mode;
    std::optional<int> threads;
};

json load_config_json(const std::string& path, const Overrides& ov) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not well-formed: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");
    if (ov.seed) j["master_seed"] = *ov.seed;
    if (ov.sup_method) {
        j["sup_method"] = *ov.sup_method;
        if (j.value("task", "") == "distance") {
            j.erase("sup_method");
            j["method"] = *ov.sup_method;
        }
    }
    if (ov.abs_mode) j["abs_mode"] = *ov.abs_mode;
    if (ov.threads) j["threads"] = *ov.threads;
    return j;
}

ganlab::ParsedConfig parse_for_task(const std::string& path, const Overrides& ov,
                                    ganlab::ParsedConfig::Task expected, const char* subcommand) {
    json j = load_config_json(path, ov);
    ganlab::ParsedConfig cfg = ganlab::parse_config_json(j);
    if (cfg.task != expected) {
        throw ConfigError(std::string("config task does not match the '") + subcommand +
                          "' subcommand");
    }
    return cfg;
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

void ensure_out_dir(const std::string& dir) {
    if (dir.empty() || dir == ".") return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

ganlab::RunManifest start_manifest(const ganlab::ParsedConfig& cfg, std::uint64_t seed,
                                   const std::string& out_dir,
                                   std::vector<std::string> planned_files) {
    ganlab::RunManifest m;
    m.config_hash = cfg.config_hash;
    m.tool_version = ganlab::kVersion;
    m.master_seed = seed;
    m.started_at = ganlab::iso8601_utc_now();
    m.output_files = std::move(planned_files);
    m.effective_config = cfg.canonical;
    ganlab::write_manifest_json(join_path(out_dir, "manifest.json"), m);
    return m;
}

void finish_manifest(ganlab::RunManifest& m, const std::string& out_dir) {
    m.finished_at = ganlab::iso8601_utc_now();
    m.status = "complete";
    ganlab::write_manifest_json(join_path(out_dir, "manifest.json"), m);
}

int run_bounds(const std::string& config_path, const Overrides& ov, const std::string& out_dir) {
    ensure_out_dir(out_dir);
    ganlab::ParsedConfig cfg =
        parse_for_task(config_path, ov, ganlab::ParsedConfig::Task::bounds, "bounds");
    const ganlab::BoundsRequest& b = cfg.bounds;
    ganlab::RunManifest manifest =
        start_manifest(cfg, 0, out_dir, {"bound_report.json", "manifest.json"});
    const ganlab::BoundReport report = ganlab::compute_bound_report(
        b.fspec, b.gspec, b.phi, b.b_x, b.b_z, b.weights_f ? &*b.weights_f : nullptr,
        b.weights_g ? &*b.weights_g : nullptr);
    ganlab::write_bound_report_json(join_path(out_dir, "bound_report.json"), report,
                                    b.phi.name());
    std::cout << ganlab::bound_report_to_json(report, b.phi.name()).dump(2) << "\n";
    finish_manifest(manifest, out_dir);
    return 0;
}

int run_distance(const std::string& config_path, const Overrides& ov,
                 const std::string& out_dir) {
    ensure_out_dir(out_dir);
    ganlab::ParsedConfig cfg =
        parse_for_task(config_path, ov, ganlab::ParsedConfig::Task::distance, "distance");
    const ganlab::DistanceRequest& d = cfg.distance;
    ganlab::RunManifest manifest = start_manifest(
        cfg, d.master_seed, out_dir,
        {"distance_result.json", "bound_report.json", "manifest.json"});

    const ganlab::ObjectiveInstance inst{d.fspec, d.gspec, d.phi, d.abs_mode};
    const std::uint64_t data_seed = ganlab::derive_seed(d.master_seed, {2});
    const std::uint64_t pop_seed = ganlab::derive_seed(d.master_seed, {1});

    std::optional<ganlab::ObjectiveEvaluator> ev;
    std::string x_method = "samples", z_method = "samples";
    if (d.variant == ganlab::Variant::empirical_mn) {
        const ganlab::SampleSet data = ganlab::draw_samples(d.target, d.base, d.n, d.m, data_seed);
        ev.emplace(ganlab::ObjectiveEvaluator::from_samples(inst, data));
    } else if (d.variant == ganlab::Variant::half_empirical) {
        const ganlab::SampleSet data = ganlab::draw_samples(d.target, d.base, d.n, 0, data_seed);
        auto sides = ganlab::make_population_sides(inst, d.target, d.base, d.n_pop, pop_seed,
                                                   d.population_method);
        z_method = ganlab::side_method_name(sides.second.method);
        ev.emplace(ganlab::ObjectiveEvaluator::half(inst, data, std::move(sides.second)));
    } else {
        auto sides = ganlab::make_population_sides(inst, d.target, d.base, d.n_pop, pop_seed,
                                                   d.population_method);
        x_method = ganlab::side_method_name(sides.first.method);
        z_method = ganlab::side_method_name(sides.second.method);
        ev.emplace(ganlab::ObjectiveEvaluator::population(inst, std::move(sides.first),
                                                          std::move(sides.second)));
    }

    ganlab::OptimOptions opt;
    opt.method = d.method;
    opt.grid = d.grid;
    opt.pgd = d.pgd;
    opt.seed = ganlab::derive_seed(d.master_seed, {3});
    const ganlab::SupResult sup = ganlab::sup_over_w(*ev, d.theta, opt);

    json result{{"value", sup.value},
                {"variant", ganlab::variant_name(d.variant)},
                {"method", ganlab::method_name(sup.method)},
                {"abs_mode", d.abs_mode ? "on" : "off"},
                {"measuring_function", d.phi.name()},
                {"master_seed", d.master_seed},
                {"n", d.n},
                {"m", d.m},
                {"n_pop", d.n_pop},
                {"x_population_method", x_method},
                {"z_population_method", z_method},
                {"argmax_weights", ganlab::weights_to_json(sup.argmax)},
                {"diagnostics",
                 {{"restarts_used", sup.diagnostics.restarts_used},
                  {"iterations", sup.diagnostics.iterations},
                  {"best_restart", sup.diagnostics.best_restart},
                  {"converged", sup.diagnostics.converged},
                  {"grid_points", sup.diagnostics.grid_points}}}};
    {
        std::ofstream out(join_path(out_dir, "distance_result.json"),
                          std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + join_path(out_dir, "distance_result.json") + "'");
        out << result.dump(2) << "\n";
    }
    const ganlab::BoundReport report = ganlab::compute_bound_report(
        d.fspec, d.gspec, d.phi, d.target.norm_radius(), d.base.norm_radius());
    ganlab::write_bound_report_json(join_path(out_dir, "bound_report.json"), report,
                                    d.phi.name());
    std::cout << result.dump(2) << "\n";
    finish_manifest(manifest, out_dir);
    return 0;
}

int run_experiment(const std::string& config_path, const Overrides& ov,
                   const std::string& out_dir) {
    ensure_out_dir(out_dir);
    ganlab::ParsedConfig cfg =
        parse_for_task(config_path, ov, ganlab::ParsedConfig::Task::experiment, "experiment");
    const ganlab::ExperimentConfig& c = cfg.experiment;
    ganlab::RunManifest manifest = start_manifest(
        cfg, c.master_seed, out_dir,
        {"gaps.csv", "rate_fit.json", "plot_data.csv", "bound_report.json", "manifest.json"});

    const ganlab::ExperimentResult result = ganlab::run_error_experiment(c);
    for (const std::string& note : result.notes) manifest.notes.push_back(note);

    ganlab::write_gaps_csv(join_path(out_dir, "gaps.csv"), cfg.config_hash, result.records);
    const ganlab::BoundReport report = ganlab::compute_bound_report(
        c.fspec, c.gspec, c.phi, c.target.norm_radius(), c.base.norm_radius());
    ganlab::write_bound_report_json(join_path(out_dir, "bound_report.json"), report,
                                    c.phi.name());
    try {
        const bool use_mean = c.error_kind == ganlab::ErrorKind::expectation_liang;
        const ganlab::RateFit fit = ganlab::fit_rate(
            result.records, ganlab::RegressorKind::log_sqrt_logn_over_n, use_mean);
        ganlab::write_rate_fit_json(join_path(out_dir, "rate_fit.json"), fit);
        ganlab::write_plot_data_csv(join_path(out_dir, "plot_data.csv"), fit);
        std::cout << "rate fit: slope=" << ganlab::format_real(fit.slope)
                  << " r_squared=" << ganlab::format_real(fit.r_squared) << "\n";
    } catch (const NumericError& e) {
        manifest.notes.push_back(std::string("rate fit skipped: ") + e.what());
        std::cout << "rate fit skipped: " << e.what() << "\n";
    }
    std::cout << "records: " << result.records.size()
              << ", population inf: " << ganlab::format_real(result.population_inf) << "\n";
    finish_manifest(manifest, out_dir);
    return 0;
}

int run_rate_fit(const std::string& gaps_path, const std::string& regressor, bool use_mean,
                 const std::string& out_dir) {
    ensure_out_dir(out_dir);
    ganlab::RunManifest manifest;
    manifest.tool_version = ganlab::kVersion;
    manifest.started_at = ganlab::iso8601_utc_now();
    manifest.output_files = {"rate_fit.json", "plot_data.csv", "manifest.json"};
    manifest.effective_config = json{{"task", "rate-fit"},
                                     {"gaps", gaps_path},
                                     {"regressor", regressor},
                                     {"use_mean", use_mean}};
    {
        std::ifstream in(gaps_path, std::ios::binary);
        if (!in) throw IoError("cannot open gaps file '" + gaps_path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        manifest.config_hash = ganlab::stable_hash_hex(ss.str());
    }
    ganlab::write_manifest_json(join_path(out_dir, "manifest.json"), manifest);
    const std::vector<ganlab::GapRecord> records = ganlab::read_gaps_csv(gaps_path);
    const ganlab::RateFit fit =
        ganlab::fit_rate(records, ganlab::regressor_from_name(regressor), use_mean);
    ganlab::write_rate_fit_json(join_path(out_dir, "rate_fit.json"), fit);
    ganlab::write_plot_data_csv(join_path(out_dir, "plot_data.csv"), fit);
    std::cout << ganlab::rate_fit_to_json(fit).dump(2) << "\n";
    finish_manifest(manifest, out_dir);
    return 0;
}

int run_verify(int instances, int draws, std::uint64_t seed, const std::string& out_dir) {
    ensure_out_dir(out_dir);
    ganlab::RunManifest manifest;
    manifest.tool_version = ganlab::kVersion;
    manifest.master_seed = seed;
    manifest.started_at = ganlab::iso8601_utc_now();
    manifest.output_files = {"verify_report.json", "manifest.json"};
    manifest.effective_config =
        json{{"task", "verify"}, {"instances", instances}, {"draws", draws}, {"seed", seed}};
    manifest.config_hash = ganlab::stable_hash_hex(manifest.effective_config.dump());
    ganlab::write_manifest_json(join_path(out_dir, "manifest.json"), manifest);

    bool all_ok = true;
    json report;

    const ganlab::EnvelopeSuiteResult env = ganlab::run_envelope_suite(10, draws, seed);
    const bool env_ok = env.total_violations() == 0;
    all_ok = all_ok && env_ok;
    std::cout << (env_ok ? "[PASS]" : "[FAIL]") << " envelope soundness: "
              << env.total_violations() << " violations in " << env.draws
              << " draws, worst ratio " << env.worst_ratio << "\n";
    report["envelope"] = {{"draws", env.draws},
                          {"violations", env.total_violations()},
                          {"worst_ratio", env.worst_ratio},
                          {"pass", env_ok}};

    const ganlab::LipschitzSuiteResult lip = ganlab::run_lipschitz_suite(10, draws, seed + 1);
    const bool lip_ok = lip.violations == 0;
    all_ok = all_ok && lip_ok;
    std::cout << (lip_ok ? "[PASS]" : "[FAIL]") << " lipschitz soundness: " << lip.violations
              << " violations in " << lip.triples << " triples, worst ratio " << lip.worst_ratio
              << "\n";
    report["lipschitz"] = {{"triples", lip.triples},
                           {"violations", lip.violations},
                           {"worst_ratio", lip.worst_ratio},
                           {"pass", lip_ok}};

    const ganlab::OracleSuiteResult oracle =
        ganlab::run_oracle_equivalence_suite(instances, seed + 2);
    const int need = (static_cast<int>(oracle.instances.size()) * 95 + 99) / 100;
    const bool oracle_ok = oracle.within_tolerance >= need &&
                           oracle.within_slack == static_cast<int>(oracle.instances.size());
    all_ok = all_ok && oracle_ok;
    std::cout << (oracle_ok ? "[PASS]" : "[FAIL]") << " oracle equivalence: "
              << oracle.within_tolerance << "/" << oracle.instances.size()
              << " within tolerance, " << oracle.within_slack << " within slack\n";
    report["oracle_equivalence"] = {{"instances", oracle.instances.size()},
                                    {"within_tolerance", oracle.within_tolerance},
                                    {"within_slack", oracle.within_slack},
                                    {"pass", oracle_ok}};

    const ganlab::DecompositionSuiteResult dec =
        ganlab::run_decomposition_suite(instances / 2, seed + 3);
    const bool dec_ok = dec.nonnegative_slack == static_cast<int>(dec.records.size());
    all_ok = all_ok && dec_ok;
    std::cout << (dec_ok ? "[PASS]" : "[FAIL]") << " decomposition inequality: "
              << dec.nonnegative_slack << "/" << dec.records.size()
              << " nonnegative, min slack " << dec.min_slack << "\n";
    report["decomposition"] = {{"instances", dec.records.size()},
                               {"nonnegative_slack", dec.nonnegative_slack},
                               {"min_slack", dec.min_slack},
                               {"pass", dec_ok}};

    std::ofstream out(join_path(out_dir, "verify_report.json"),
                      std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + join_path(out_dir, "verify_report.json") + "'");
    out << report.dump(2) << "\n";
    finish_manifest(manifest, out_dir);
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"numerical laboratory for norm-constrained GAN objectives: closed-form "
                 "constants, sup/inf distances, and generalization-gap rate experiments.\n"
                 "Config defaults: replicates=200, n_pop=100000, abs_mode=on, sup/inf "
                 "method=pgd,\ngrid_points=201, grid_param_cap=3, pgd restarts=20 "
                 "iterations=500 step=0.1 decay=0.99."};
    app.set_version_flag("--version", ganlab::kVersion);

    std::string example_kind;
    app.add_option("--example-config", example_kind,
                   "print a valid config template (theorem1, sup_gap_arora, plugin_zhang, "
                   "plugin_ji, expectation_liang, bounds, distance) and exit");

    std::string config_path, out_dir = ".";
    Overrides ov;
    std::uint64_t seed_val = 0;
    std::string sup_method_val, abs_mode_val;
    int threads_val = 0;

    auto add_common = [&](CLI::App* cmd, bool with_overrides) {
        cmd->add_option("--config", config_path, "config file (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory (default .)");
        if (with_overrides) {
            cmd->add_option("--seed", seed_val, "override master_seed")
                ->each([&](const std::string&) { ov.seed = seed_val; });
            cmd->add_option("--sup-method", sup_method_val, "override sup method (pgd|grid)")
                ->each([&](const std::string&) { ov.sup_method = sup_method_val; });
            cmd->add_option("--abs-mode", abs_mode_val, "override abs mode (on|off)")
                ->each([&](const std::string&) { ov.abs_mode = abs_mode_val; });
            cmd->add_option("--threads", threads_val, "cap parallel task width")
                ->each([&](const std::string&) { ov.threads = threads_val; });
        }
    };

    CLI::App* bounds_cmd = app.add_subcommand(
        "bounds", "closed-form constants for a (discriminator, generator, phi, B_X, B_Z) tuple");
    add_common(bounds_cmd, false);

    CLI::App* distance_cmd =
        app.add_subcommand("distance", "one sup-distance query at an explicit theta");
    add_common(distance_cmd, true);

    CLI::App* experiment_cmd =
        app.add_subcommand("experiment", "full generalization-gap grid run with rate fit");
    add_common(experiment_cmd, true);

    std::string gaps_path, regressor = "log_sqrt_logn_over_n";
    bool use_mean = false;
    CLI::App* ratefit_cmd =
        app.add_subcommand("rate-fit", "fit a convergence rate from an existing gaps.csv");
    ratefit_cmd->add_option("--gaps", gaps_path, "gaps.csv produced by the experiment subcommand")
        ->required();
    ratefit_cmd->add_option("--regressor", regressor, "log_sqrt_logn_over_n (default) or log_n");
    ratefit_cmd->add_flag("--use-mean", use_mean, "summarize replicates by mean instead of median");
    ratefit_cmd->add_option("--out", out_dir, "output directory (default .)");

    int verify_instances = 100;
    int verify_draws = 10000;
    std::uint64_t verify_seed = 20240901;
    CLI::App* verify_cmd = app.add_subcommand(
        "verify", "randomized envelope, lipschitz, oracle-equivalence and decomposition suites");
    verify_cmd->add_option("--instances", verify_instances, "oracle-equivalence instance count");
    verify_cmd->add_option("--draws", verify_draws, "draws per spec for the envelope suites");
    verify_cmd->add_option("--seed", verify_seed, "suite seed");
    verify_cmd->add_option("--out", out_dir, "output directory (default .)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!example_kind.empty()) {
            std::cout << ganlab::example_config(example_kind) << "\n";
            return 0;
        }
        if (bounds_cmd->parsed()) return run_bounds(config_path, ov, out_dir);
        if (distance_cmd->parsed()) return run_distance(config_path, ov, out_dir);
        if (experiment_cmd->parsed()) return run_experiment(config_path, ov, out_dir);
        if (ratefit_cmd->parsed()) return run_rate_fit(gaps_path, regressor, use_mean, out_dir);
        if (verify_cmd->parsed()) {
            return run_verify(verify_instances, verify_draws, verify_seed, out_dir);
        }
        std::cerr << app.help() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
