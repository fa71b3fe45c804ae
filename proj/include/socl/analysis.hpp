#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "socl/engine.hpp"

namespace socl {

struct EluderResult {
    int dimension = 0;
    bool exact = true;  // false when the search budget ran out; value is a lower bound
    long nodes = 0;
};

// Exact eluder dimension of a finite class over a finite action set by
// exhaustive search: the longest sequence of actions, each eps'-independent of
// its predecessors for some eps' > eps. Candidate thresholds are enumerated
// from the pairwise value differences and their subset sums, between which
// every comparison outcome is constant.
EluderResult eluder_dimension_finite(const Eigen::MatrixXd& table, double epsilon,
                                     long node_budget = 50000000);

// Eluder dimension at every grid scale in one sweep (thresholds and sequence
// searches are shared across scales).
std::vector<EluderResult> eluder_dimension_profile(const Eigen::MatrixXd& table,
                                                   const std::vector<double>& eps_grid,
                                                   long node_budget = 200000000);

// Proxy for the d-dimensional linear class: c_eluder * d * ln(1/eps), floored
// at d (orthonormal directions witness a sequence of length d at every scale
// below the value range, so the floor keeps the proxy below the true value).
double linear_eluder_proxy(int dim, double epsilon, double c_eluder = 4.0);

struct BoundCheckRow {
    double epsilon = 0.0;
    long count = 0;
    double eluder = 0.0;
    double bound_statement = 0.0;  // (4 beta / eps^2 + 1) E
    double bound_proof = 0.0;      // (20 beta / eps^2 + 1) E
    bool pass_statement = true;
    bool pass_proof = true;
};

struct ViolationCountReport {
    std::vector<BoundCheckRow> rows;
    bool all_pass_statement = true;
    bool all_pass_proof = true;  // the proof's constant is the acceptance verdict
};

ViolationCountReport check_violation_count_bound(
    const std::vector<double>& widths, double beta, const std::vector<double>& grid,
    const std::function<double(double)>& eluder);

struct WidthSumReport {
    double width_sum = 0.0;
    double best_bound = 0.0;
    double best_alpha = 0.0;
    bool pass = true;
    std::vector<std::pair<double, double>> alpha_bounds;
};

WidthSumReport check_width_sum_bound(const std::vector<double>& widths, double beta,
                                     const std::vector<double>& grid,
                                     const std::function<double(double)>& eluder,
                                     long horizon);

struct RegretCertificate {
    double realized_regret = 0.0;  // normalized units
    double kappa_star_raw = 0.0;   // lemma bound in raw loss units
    double kappa_star = 0.0;       // normalized
    double width_term = 0.0;       // min_alpha { alpha T + 20 beta E(alpha) / alpha }
    double reg_ol = 0.0;           // learning-oracle bound, normalized
    double deviation_term = 0.0;   // sqrt(2 T ln(1/delta))
    double bound = 0.0;
    bool pass = true;
    double max_round_ratio = 0.0;  // max_t (loss gap)/(expected width), raw units
    bool ratio_pass = true;
};

struct MissingHindsight : std::runtime_error {
    MissingHindsight() : std::runtime_error("run has no hindsight optimum; finalize first") {}
};

// Theorem-style certificate for one completed run. `c_eluder` feeds the linear
// proxy; finite classes use the exact brute-force eluder dimension.
RegretCertificate certify_regret(const RunResult& run, double delta, double c_eluder = 4.0);

// Least-squares slope of log(regret) against log(T).
double regret_loglog_slope(const std::vector<std::pair<long, double>>& regret_by_horizon);

// Per-run kappa* bound for the run's environment, raw loss units.
double kappa_star_bound_raw(const Environment& env);

struct ReportSummary {
    long runs = 0;
    double regret_mean = 0.0, regret_std = 0.0;
    double violations_mean = 0.0, violations_std = 0.0;
    double violation_mag_mean = 0.0, violation_mag_std = 0.0;
    double width_sum_mean = 0.0, width_sum_std = 0.0;
    double runtime_ms_mean = 0.0, runtime_ms_std = 0.0;
};

// Aggregates every summary.csv under `input_dir` and emits report_summary.csv
// plus two-column curve files (t vs cumulative regret proxy, t vs width,
// t vs cumulative violations) for each trace found.
ReportSummary report_directory(const std::string& input_dir);

std::vector<double> widths_from_records(const std::vector<RoundRecord>& records);

}  // namespace socl
