#include "socl/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace socl {

std::vector<double> default_width_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(std::pow(2.0, -i));
    return grid;
}

namespace {

std::string fmt_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void append_real_array(std::string& out, const Eigen::VectorXd& v) {
    out += '[';
    for (int i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt_real(v[i]);
    }
    out += ']';
}

}  // namespace

std::string round_record_to_json(const RoundRecord& r) {
    std::string out;
    out.reserve(512);
    out += "{\"t\":" + std::to_string(r.t);
    if (r.finite) {
        out += ",\"action\":" + std::to_string(r.action_index);
        out += ",\"recommended_distribution\":{\"support\":[";
        for (std::size_t i = 0; i < r.rec_support.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(r.rec_support[i]);
        }
        out += "],\"probs\":[";
        for (std::size_t i = 0; i < r.rec_probs.size(); ++i) {
            if (i) out += ',';
            out += fmt_real(r.rec_probs[i]);
        }
        out += "]}";
    } else {
        out += ",\"action\":";
        append_real_array(out, r.action);
        out += ",\"pre_map_action\":";
        append_real_array(out, r.pre_map_action);
    }
    out += ",\"gamma\":" + fmt_real(r.gamma);
    out += ",\"width_at_action\":" + fmt_real(r.width_at_action);
    out += ",\"prediction\":" + fmt_real(r.prediction);
    out += ",\"constraint_value\":" + fmt_real(r.constraint_value);
    out += ",\"violated\":";
    out += r.violated ? "true" : "false";
    out += ",\"cumulative_regret_proxy\":" + fmt_real(r.cumulative_regret_proxy);
    out += ",\"mapping_id\":\"" + mapping_name(r.mapping_id) + "\"";
    out += ",\"pre_map_width\":" + fmt_real(r.pre_map_width);
    out += ",\"loss_value\":" + fmt_real(r.loss_value);
    out += ",\"loss_gap\":" + fmt_real(r.loss_gap);
    out += ",\"expected_width\":" + fmt_real(r.expected_width);
    out += ",\"fstar_in_space\":";
    out += r.fstar_in_space ? "true" : "false";
    if (r.oracle_center.size() > 0) {
        out += ",\"oracle_center\":";
        append_real_array(out, r.oracle_center);
    }
    out += '}';
    return out;
}

void write_trace_jsonl(const std::vector<RoundRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open trace file for writing: " + path);
    for (const auto& r : records) {
        out << round_record_to_json(r);
        out << '\n';
    }
}

std::string summary_csv_header() {
    return "seed,T,regret,violations,violation_mag_sum,width_sum,runtime_ms";
}

std::string summary_csv_row(const RegretLedger& ledger) {
    std::string out = std::to_string(ledger.seed);
    out += ',' + std::to_string(ledger.horizon);
    out += ',' + fmt_real(ledger.regret);
    out += ',' + std::to_string(ledger.violations);
    out += ',' + fmt_real(ledger.violation_magnitude_sum);
    out += ',' + fmt_real(ledger.width_sum);
    out += ',' + fmt_real(ledger.runtime_ms);
    return out;
}

void write_summary_csv(const std::vector<RegretLedger>& ledgers, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open summary file for writing: " + path);
    out << summary_csv_header() << '\n';
    for (const auto& ledger : ledgers) out << summary_csv_row(ledger) << '\n';
}

std::vector<TraceRow> read_trace_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    std::vector<TraceRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(line);
        TraceRow row;
        row.t = obj.value("t", 0L);
        row.width_at_action = obj.value("width_at_action", 0.0);
        row.constraint_value = obj.value("constraint_value", 0.0);
        row.gamma = obj.value("gamma", 1.0);
        row.pre_map_width = obj.value("pre_map_width", 0.0);
        row.loss_gap = obj.value("loss_gap", 0.0);
        row.expected_width = obj.value("expected_width", 0.0);
        row.fstar_in_space = obj.value("fstar_in_space", true);
        row.violated = obj.value("violated", false);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace socl
