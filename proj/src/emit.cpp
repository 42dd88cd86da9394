#include "ganlab/emit.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "ganlab/errors.hpp"

namespace ganlab {

std::string iso8601_utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open output file '" + path + "' for writing");
    return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write failed for output file '" + path + "'");
}

}  // namespace

void write_gaps_csv(const std::string& path, const std::string& experiment_id,
                    const std::vector<GapRecord>& records) {
    if (records.empty()) {
        throw NumericError("refusing to write an empty gaps.csv: no records were produced");
    }
    std::ofstream out = open_output(path);
    out << "experiment_id,error_kind,n,m,replicate,gap,abs_mode,sup_method,seed\n";
    for (const GapRecord& r : records) {
        out << experiment_id << ',' << error_kind_name(r.error_kind) << ',' << r.n << ',' << r.m
            << ',' << r.replicate << ',' << format_real(r.gap) << ','
            << (r.abs_mode ? "on" : "off") << ',' << method_name(r.sup_method) << ',' << r.seed
            << '\n';
    }
    finish_output(out, path);
}

std::vector<GapRecord> read_gaps_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open gaps file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("gaps file '" + path + "' is empty");
    if (line.rfind("experiment_id,", 0) != 0) {
        throw IoError("gaps file '" + path + "' has an unexpected header: " + line);
    }
    std::vector<GapRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 9) {
            throw IoError("gaps file '" + path + "' has a malformed row: " + line);
        }
        GapRecord r;
        r.error_kind = error_kind_from_name(fields[1]);
        r.n = std::stol(fields[2]);
        r.m = std::stol(fields[3]);
        r.replicate = std::stoi(fields[4]);
        r.gap = std::stod(fields[5]);
        r.abs_mode = fields[6] == "on";
        r.sup_method = method_from_name(fields[7]);
        r.seed = std::stoull(fields[8]);
        records.push_back(r);
    }
    return records;
}

nlohmann::json gap_record_to_json(const GapRecord& r) {
    return nlohmann::json{{"error_kind", error_kind_name(r.error_kind)},
                          {"n", r.n},
                          {"m", r.m},
                          {"replicate", r.replicate},
                          {"gap", r.gap},
                          {"abs_mode", r.abs_mode ? "on" : "off"},
                          {"sup_method", method_name(r.sup_method)},
                          {"inf_method", method_name(r.inf_method)},
                          {"seed", r.seed},
                          {"flagged_negative", r.flagged_negative}};
}

nlohmann::json rate_fit_to_json(const RateFit& fit) {
    nlohmann::json points = nlohmann::json::array();
    for (const RatePoint& p : fit.points) {
        points.push_back({{"n", p.n},
                          {"summary_gap", p.summary_gap},
                          {"q25", p.q25},
                          {"q75", p.q75},
                          {"predicted", p.predicted},
                          {"excluded", p.excluded}});
    }
    return nlohmann::json{{"slope", fit.slope},
                          {"intercept", fit.intercept},
                          {"r_squared", fit.r_squared},
                          {"regressor", regressor_name(fit.regressor)},
                          {"points_used", fit.points_used},
                          {"points", points}};
}

void write_rate_fit_json(const std::string& path, const RateFit& fit) {
    std::ofstream out = open_output(path);
    out << rate_fit_to_json(fit).dump(2) << '\n';
    finish_output(out, path);
}

void write_plot_data_csv(const std::string& path, const RateFit& fit) {
    if (fit.points.empty()) {
        throw NumericError("refusing to write an empty plot_data.csv");
    }
    std::ofstream out = open_output(path);
    out << "n,median_gap,q25,q75,predicted_gap_from_fit\n";
    for (const RatePoint& p : fit.points) {
        out << p.n << ',' << format_real(p.summary_gap) << ',' << format_real(p.q25) << ','
            << format_real(p.q75) << ',' << format_real(p.predicted) << '\n';
    }
    finish_output(out, path);
}

nlohmann::json bound_report_to_json(const BoundReport& r, const std::string& phi_name) {
    return nlohmann::json{{"u_w", r.u_w},
                          {"u_v", r.u_v},
                          {"k1", r.k1},
                          {"k2", r.k2},
                          {"k3", r.k3},
                          {"k4", r.k4},
                          {"layers_f", r.layers_f},
                          {"layers_g", r.layers_g},
                          {"weight_count_f", r.weight_count_f},
                          {"weight_count_g", r.weight_count_g},
                          {"vc_f", r.vc_f},
                          {"vc_fg", r.vc_fg},
                          {"b_x", r.b_x},
                          {"b_z", r.b_z},
                          {"measuring_function", phi_name}};
}

void write_bound_report_json(const std::string& path, const BoundReport& report,
                             const std::string& phi_name) {
    std::ofstream out = open_output(path);
    out << bound_report_to_json(report, phi_name).dump(2) << '\n';
    finish_output(out, path);
}

void write_manifest_json(const std::string& path, const RunManifest& m) {
    nlohmann::json j{{"config_hash", m.config_hash},
                     {"tool_version", m.tool_version},
                     {"master_seed", m.master_seed},
                     {"started_at", m.started_at},
                     {"finished_at", m.finished_at},
                     {"status", m.status},
                     {"output_files", m.output_files},
                     {"effective_config", m.effective_config},
                     {"notes", m.notes}};
    std::ofstream out = open_output(path);
    out << j.dump(2) << '\n';
    finish_output(out, path);
}

}  // namespace ganlab
