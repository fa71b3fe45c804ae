#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "socl/mappings.hpp"

namespace socl {

// Full per-round record. The first block mirrors the trace schema; the
// diagnostics block carries environment-side quantities used by the analysis
// checkers (the learner never sees them).
struct RoundRecord {
    long t = 0;
    bool finite = false;
    Eigen::VectorXd action;          // continuous coordinates
    int action_index = -1;           // finite index
    Eigen::VectorXd pre_map_action;  // sampled recommendation before mapping
    std::vector<int> rec_support;    // finite recommendation support
    std::vector<double> rec_probs;
    double gamma = 1.0;
    double width_at_action = 0.0;
    double prediction = 0.0;
    double constraint_value = 0.0;
    bool violated = false;
    double cumulative_regret_proxy = 0.0;
    MappingKind mapping_id = MappingKind::Identity;

    // diagnostics
    double pre_map_width = 0.0;   // width at the pre-map action
    double loss_value = 0.0;      // normalized realized loss
    double loss_gap = 0.0;        // mapping loss gap, raw units
    double expected_width = 0.0;  // expected width under the played distribution
    bool fstar_in_space = true;   // coverage flag
    Eigen::VectorXd oracle_center;  // regression state dump (diagnostics flag only)
};

struct RegretLedger {
    double learner_cum_loss = 0.0;  // normalized
    double hindsight_safe_opt_loss = 0.0;
    double regret = 0.0;
    long violations = 0;
    double violation_magnitude_sum = 0.0;
    double signed_violation_sum = 0.0;
    double width_sum = 0.0;
    std::vector<double> width_grid;         // epsilon grid, 2^0 .. 2^-10
    std::vector<long> width_exceed_counts;  // rounds with width > epsilon
    double loss_scale = 1.0;
    double radius_beta = 0.0;
    bool coverage_all_rounds = true;
    double runtime_ms = 0.0;
    long horizon = 0;
    std::uint64_t seed = 0;
};

std::vector<double> default_width_grid();

// JSON-lines trace, one object per round, snake_case keys, reals with
// 17 significant digits.
std::string round_record_to_json(const RoundRecord& r);
void write_trace_jsonl(const std::vector<RoundRecord>& records, const std::string& path);

// Summary CSV row: seed,T,regret,violations,violation_mag_sum,width_sum,runtime_ms
std::string summary_csv_header();
std::string summary_csv_row(const RegretLedger& ledger);
void write_summary_csv(const std::vector<RegretLedger>& ledgers, const std::string& path);

// Minimal reader used by the report/checker CLI path: pulls the numeric fields
// the checkers need back out of a trace file.
struct TraceRow {
    long t = 0;
    double width_at_action = 0.0;
    double constraint_value = 0.0;
    double gamma = 1.0;
    double pre_map_width = 0.0;
    double loss_gap = 0.0;
    double expected_width = 0.0;
    bool fstar_in_space = true;
    bool violated = false;
};
std::vector<TraceRow> read_trace_jsonl(const std::string& path);

}  // namespace socl
