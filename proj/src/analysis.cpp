#include "socl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "socl/learning.hpp"

namespace socl {

namespace {

// Longest sequence, each element eps'-independent of its predecessor set, for
// one fixed threshold. Masks are explored breadth-first; a mask extends by
// action `a` when some pair has in-budget prefix disagreement yet differs by
// more than eps' at `a`.
int longest_independent_sequence(const std::vector<std::vector<double>>& pair_values,
                                 int num_actions, double eps_prime, long& nodes,
                                 long node_budget, bool& budget_ok) {
    const int P = static_cast<int>(pair_values.size());
    const int masks = 1 << num_actions;
    const double eps_sq = eps_prime * eps_prime;

    // per-pair squared prefix sums over subsets, filled along the BFS
    std::vector<std::vector<float>> sums(P, std::vector<float>(masks, 0.0f));
    std::vector<char> reachable(masks, 0);
    reachable[0] = 1;
    int best = 0;
    for (int mask = 0; mask < masks; ++mask) {
        if (!reachable[mask]) continue;
        best = std::max(best, __builtin_popcount(static_cast<unsigned>(mask)));
        for (int a = 0; a < num_actions; ++a) {
            if (mask & (1 << a)) continue;
            if (++nodes > node_budget) {
                budget_ok = false;
                return best;
            }
            bool independent = false;
            for (int p = 0; p < P; ++p) {
                if (sums[p][mask] <= eps_sq + 1e-15 && pair_values[p][a] > eps_prime) {
                    independent = true;
                    break;
                }
            }
            if (!independent) continue;
            const int grown = mask | (1 << a);
            if (!reachable[grown]) {
                reachable[grown] = 1;
                for (int p = 0; p < P; ++p) {
                    const double w = pair_values[p][a];
                    sums[p][grown] = sums[p][mask] + static_cast<float>(w * w);
                }
            }
        }
    }
    return best;
}

}  // namespace

namespace {

// Shared sweep: longest independent sequence at every critical threshold above
// `floor_eps`. Returns (threshold, length) pairs sorted by threshold.
std::vector<std::pair<double, int>> eluder_threshold_sweep(const Eigen::MatrixXd& table,
                                                           double floor_eps,
                                                           long node_budget, long& nodes,
                                                           bool& budget_ok) {
    const int F = static_cast<int>(table.rows());
    const int K = static_cast<int>(table.cols());
    std::vector<std::pair<double, int>> out;
    if (F <= 1) return out;  // a single function admits no independent pair
    if (K > 20) throw std::invalid_argument("eluder brute force supports up to 20 actions");

    std::vector<std::vector<double>> pair_values;
    for (int i = 0; i < F; ++i)
        for (int j = i + 1; j < F; ++j) {
            std::vector<double> w(K);
            for (int a = 0; a < K; ++a) w[a] = std::abs(table(i, a) - table(j, a));
            pair_values.push_back(std::move(w));
        }

    // Critical values: pair differences and square roots of their subset sums.
    std::set<double> critical;
    double max_diff = 0.0;
    for (const auto& w : pair_values) {
        for (int a = 0; a < K; ++a) {
            critical.insert(w[a]);
            max_diff = std::max(max_diff, w[a]);
        }
        std::vector<double> subset_sums(1 << K, 0.0);
        for (int mask = 1; mask < (1 << K); ++mask) {
            const int low = mask & (-mask);
            const int a = __builtin_ctz(static_cast<unsigned>(mask));
            subset_sums[mask] = subset_sums[mask ^ low] + w[a] * w[a];
            critical.insert(std::sqrt(subset_sums[mask]));
        }
    }
    if (max_diff <= floor_eps) return out;

    // Between consecutive critical values every comparison outcome is constant;
    // evaluate at midpoints of the gaps inside (floor_eps, max_diff).
    std::vector<double> thresholds;
    double prev = floor_eps;
    for (double v : critical) {
        if (v <= floor_eps) continue;
        if (v > prev + 1e-15) {
            thresholds.push_back(0.5 * (prev + v));
            prev = v;
        }
    }
    for (double eps_prime : thresholds) {
        if (eps_prime >= max_diff) break;
        const int len = longest_independent_sequence(pair_values, K, eps_prime, nodes,
                                                     node_budget, budget_ok);
        out.emplace_back(eps_prime, len);
        if (!budget_ok) break;
    }
    return out;
}

}  // namespace

EluderResult eluder_dimension_finite(const Eigen::MatrixXd& table, double epsilon,
                                     long node_budget) {
    EluderResult res;
    bool budget_ok = true;
    const auto sweep = eluder_threshold_sweep(table, epsilon, node_budget, res.nodes, budget_ok);
    for (const auto& [eps_prime, len] : sweep) res.dimension = std::max(res.dimension, len);
    res.exact = budget_ok;
    return res;
}

std::vector<EluderResult> eluder_dimension_profile(const Eigen::MatrixXd& table,
                                                   const std::vector<double>& eps_grid,
                                                   long node_budget) {
    double floor_eps = std::numeric_limits<double>::infinity();
    for (double eps : eps_grid) floor_eps = std::min(floor_eps, eps);
    long nodes = 0;
    bool budget_ok = true;
    const auto sweep = eluder_threshold_sweep(table, floor_eps, node_budget, nodes, budget_ok);
    std::vector<EluderResult> out;
    for (double eps : eps_grid) {
        EluderResult res;
        res.nodes = nodes;
        res.exact = budget_ok;
        for (const auto& [eps_prime, len] : sweep)
            if (eps_prime > eps) res.dimension = std::max(res.dimension, len);
        out.push_back(res);
    }
    return out;
}

double linear_eluder_proxy(int dim, double epsilon, double c_eluder) {
    const double d = static_cast<double>(dim);
    return d * std::max(1.0, c_eluder * std::log(1.0 / epsilon));
}

ViolationCountReport check_violation_count_bound(
    const std::vector<double>& widths, double beta, const std::vector<double>& grid,
    const std::function<double(double)>& eluder) {
    ViolationCountReport report;
    for (double eps : grid) {
        BoundCheckRow row;
        row.epsilon = eps;
        for (double w : widths)
            if (w > eps) ++row.count;
        row.eluder = eluder(eps);
        row.bound_statement = (4.0 * beta / (eps * eps) + 1.0) * row.eluder;
        row.bound_proof = (20.0 * beta / (eps * eps) + 1.0) * row.eluder;
        row.pass_statement = static_cast<double>(row.count) <= row.bound_statement;
        row.pass_proof = static_cast<double>(row.count) <= row.bound_proof;
        report.all_pass_statement = report.all_pass_statement && row.pass_statement;
        report.all_pass_proof = report.all_pass_proof && row.pass_proof;
        report.rows.push_back(row);
    }
    return report;
}

WidthSumReport check_width_sum_bound(const std::vector<double>& widths, double beta,
                                     const std::vector<double>& grid,
                                     const std::function<double(double)>& eluder,
                                     long horizon) {
    WidthSumReport report;
    for (double w : widths) report.width_sum += w;
    report.best_bound = std::numeric_limits<double>::infinity();
    for (double alpha : grid) {
        const double bound = alpha * static_cast<double>(horizon) +
                             20.0 * beta * eluder(alpha) / alpha;
        report.alpha_bounds.emplace_back(alpha, bound);
        if (bound < report.best_bound) {
            report.best_bound = bound;
            report.best_alpha = alpha;
        }
    }
    report.pass = report.width_sum <= report.best_bound;
    return report;
}

double kappa_star_bound_raw(const Environment& env) {
    const double dl = env.adversary.bound;
    const double da = env.action_bound;
    switch (env.kind) {
        case ConstraintKind::Linear:
        case ConstraintKind::Polytopic:
            return dl * da / env.offset_b;
        case ConstraintKind::Glm:
            return env.link.ratio() * dl * da / (env.offset_b * env.link.c_lower);
        case ConstraintKind::FiniteTable: {
            const double delta0 = finite_separation(env);
            return 1.0 / delta0;
        }
    }
    return 0.0;
}

RegretCertificate certify_regret(const RunResult& run, double delta, double c_eluder) {
    if (run.ledger.horizon == 0) throw MissingHindsight();
    const Environment& env = run.environment;
    const long T = run.ledger.horizon;
    RegretCertificate cert;
    cert.realized_regret = run.ledger.regret;
    cert.kappa_star_raw = kappa_star_bound_raw(env);
    cert.kappa_star = cert.kappa_star_raw * run.ledger.loss_scale;

    std::function<double(double)> eluder;
    if (env.finite()) {
        auto* table = &env.table;
        eluder = [table](double eps) {
            return static_cast<double>(eluder_dimension_finite(*table, eps).dimension);
        };
    } else {
        const int d = env.dimension;
        eluder = [d, c_eluder](double eps) { return linear_eluder_proxy(d, eps, c_eluder); };
    }
    double best = std::numeric_limits<double>::infinity();
    for (double alpha : default_width_grid()) {
        const double val = alpha * static_cast<double>(T) +
                           20.0 * run.radius_beta * eluder(alpha) / alpha;
        best = std::min(best, val);
    }
    cert.width_term = best;

    const double t = static_cast<double>(T);
    if (env.finite()) {
        const double k = static_cast<double>(env.num_actions);
        cert.reg_ol = std::sqrt(0.5 * t * std::log(std::max(k, 2.0)));
    } else {
        // linear-loss OGD oracle: 4 D_f D_a sqrt(T log(2/delta)), normalized
        cert.reg_ol = 4.0 * env.adversary.bound * env.action_bound *
                      std::sqrt(t * std::log(2.0 / delta)) * run.ledger.loss_scale;
    }
    cert.deviation_term = std::sqrt(2.0 * t * std::log(1.0 / delta));
    cert.bound = cert.kappa_star * cert.width_term + cert.reg_ol + cert.deviation_term;
    cert.pass = cert.realized_regret <= cert.bound;

    // per-round loss-inflation / width ratio against the lemma's kappa*
    cert.max_round_ratio = 0.0;
    cert.ratio_pass = true;
    for (const auto& rec : run.records) {
        if (rec.loss_gap <= 1e-12) continue;
        if (rec.expected_width <= 1e-15) {
            cert.ratio_pass = false;
            cert.max_round_ratio = std::numeric_limits<double>::infinity();
            continue;
        }
        const double ratio = rec.loss_gap / rec.expected_width;
        cert.max_round_ratio = std::max(cert.max_round_ratio, ratio);
        if (ratio > cert.kappa_star_raw + 1e-6) cert.ratio_pass = false;
    }
    return cert;
}

double regret_loglog_slope(const std::vector<std::pair<long, double>>& regret_by_horizon) {
    double sx = 0, sy = 0, sxy = 0, sxx = 0;
    const double n = static_cast<double>(regret_by_horizon.size());
    for (const auto& [T, regret] : regret_by_horizon) {
        const double x = std::log(static_cast<double>(T));
        const double y = std::log(std::max(regret, 1e-12));
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> widths_from_records(const std::vector<RoundRecord>& records) {
    std::vector<double> widths;
    widths.reserve(records.size());
    for (const auto& r : records) widths.push_back(r.width_at_action);
    return widths;
}

namespace {

struct Welford {
    long n = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double x) {
        ++n;
        const double d1 = x - mean;
        mean += d1 / static_cast<double>(n);
        m2 += d1 * (x - mean);
    }
    double std() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0; }
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

ReportSummary report_directory(const std::string& input_dir) {
    namespace fs = std::filesystem;
    ReportSummary summary;
    Welford regret, violations, vmag, wsum, runtime;

    std::vector<fs::path> csvs, traces;
    if (fs::exists(input_dir)) {
        for (const auto& entry : fs::directory_iterator(input_dir)) {
            if (!entry.is_regular_file()) continue;
            const auto& p = entry.path();
            if (p.extension() == ".csv" && p.filename().string().rfind("report_", 0) != 0)
                csvs.push_back(p);
            if (p.extension() == ".jsonl") traces.push_back(p);
        }
    }
    std::sort(csvs.begin(), csvs.end());
    std::sort(traces.begin(), traces.end());

    for (const auto& path : csvs) {
        std::ifstream in(path);
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (header) {
                header = false;
                continue;
            }
            const auto cells = split_csv(line);
            if (cells.size() < 7) continue;
            ++summary.runs;
            regret.add(std::stod(cells[2]));
            violations.add(std::stod(cells[3]));
            vmag.add(std::stod(cells[4]));
            wsum.add(std::stod(cells[5]));
            runtime.add(std::stod(cells[6]));
        }
    }
    summary.regret_mean = regret.mean;
    summary.regret_std = regret.std();
    summary.violations_mean = violations.mean;
    summary.violations_std = violations.std();
    summary.violation_mag_mean = vmag.mean;
    summary.violation_mag_std = vmag.std();
    summary.width_sum_mean = wsum.mean;
    summary.width_sum_std = wsum.std();
    summary.runtime_ms_mean = runtime.mean;
    summary.runtime_ms_std = runtime.std();

    const fs::path out_path = fs::path(input_dir) / "report_summary.csv";
    std::ofstream out(out_path);
    out << "metric,mean,std\n";
    out << "regret," << summary.regret_mean << ',' << summary.regret_std << '\n';
    out << "violations," << summary.violations_mean << ',' << summary.violations_std << '\n';
    out << "violation_mag_sum," << summary.violation_mag_mean << ',' << summary.violation_mag_std
        << '\n';
    out << "width_sum," << summary.width_sum_mean << ',' << summary.width_sum_std << '\n';
    out << "runtime_ms," << summary.runtime_ms_mean << ',' << summary.runtime_ms_std << '\n';

    for (const auto& trace_path : traces) {
        const auto rows = read_trace_jsonl(trace_path.string());
        const std::string stem = (fs::path(input_dir) / trace_path.stem()).string();
        std::ofstream regret_curve(stem + "_regret_curve.csv");
        std::ofstream width_curve(stem + "_width_curve.csv");
        std::ofstream violation_curve(stem + "_violation_curve.csv");
        regret_curve.precision(17);
        width_curve.precision(17);
        regret_curve << "t,cumulative_regret_proxy\n";
        width_curve << "t,width\n";
        violation_curve << "t,cumulative_violations\n";
        long cumulative_violations = 0;
        for (const auto& row : rows) {
            // the reader keeps only checker fields; widths and violations suffice here
            if (row.violated) ++cumulative_violations;
            width_curve << row.t << ',' << row.width_at_action << '\n';
            violation_curve << row.t << ',' << cumulative_violations << '\n';
        }
        // regret proxy needs the full record; re-read leniently
        std::ifstream in(trace_path);
        std::string line;
        while (std::getline(in, line)) {
            const auto pos = line.find("\"t\":");
            const auto rpos = line.find("\"cumulative_regret_proxy\":");
            if (pos == std::string::npos || rpos == std::string::npos) continue;
            const long t = std::stol(line.substr(pos + 4));
            const double value = std::stod(line.substr(line.find(':', rpos) + 1));
            regret_curve << t << ',' << value << '\n';
        }
    }
    return summary;
}

}  // namespace socl
