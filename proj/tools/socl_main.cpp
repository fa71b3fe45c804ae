#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "socl/analysis.hpp"
#include "socl/engine.hpp"

namespace fs = std::filesystem;

namespace {

void ensure_parent(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

int cmd_run(const std::string& config_path, bool long_term) {
    socl::ExperimentConfig cfg = socl::ExperimentConfig::from_json_file(config_path);
    socl::RunResult result = long_term ? socl::run_long_term(cfg) : socl::run_safe_learning(cfg);

    if (!cfg.trace_path.empty()) {
        ensure_parent(cfg.trace_path);
        socl::write_trace_jsonl(result.records, cfg.trace_path);
    }
    if (!cfg.summary_path.empty()) {
        ensure_parent(cfg.summary_path);
        socl::write_summary_csv({result.ledger}, cfg.summary_path);
    }
    std::cout << socl::summary_csv_header() << '\n'
              << socl::summary_csv_row(result.ledger) << '\n';

    socl::RegretCertificate cert = socl::certify_regret(result, cfg.delta);
    std::cout << "regret " << cert.realized_regret << " <= bound " << cert.bound
              << (cert.pass ? "  [ok]" : "  [exceeded]") << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, int seeds, int threads, bool long_term) {
    socl::ExperimentConfig cfg = socl::ExperimentConfig::from_json_file(config_path);
    const auto results = socl::run_sweep(cfg, seeds, threads, long_term, false);
    std::vector<socl::RegretLedger> ledgers;
    ledgers.reserve(results.size());
    for (const auto& r : results) ledgers.push_back(r.ledger);
    if (!cfg.summary_path.empty()) {
        ensure_parent(cfg.summary_path);
        socl::write_summary_csv(ledgers, cfg.summary_path);
        std::cout << "wrote " << cfg.summary_path << '\n';
    }
    long total_violations = 0;
    double total_regret = 0.0;
    for (const auto& l : ledgers) {
        total_violations += l.violations;
        total_regret += l.regret;
    }
    std::cout << "seeds " << seeds << "  mean regret "
              << total_regret / static_cast<double>(seeds) << "  total violations "
              << total_violations << '\n';
    return 0;
}

int cmd_report(const std::string& input_dir) {
    const socl::ReportSummary summary = socl::report_directory(input_dir);
    std::cout << "runs " << summary.runs << '\n';
    std::cout << "regret mean " << summary.regret_mean << " std " << summary.regret_std << '\n';
    std::cout << "violations mean " << summary.violations_mean << '\n';
    std::cout << "width_sum mean " << summary.width_sum_mean << '\n';
    std::cout << "wrote " << (fs::path(input_dir) / "report_summary.csv").string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"safe online learning under unknown constraints"};
    app.require_subcommand(1);

    std::string config_path;
    std::string input_dir;
    int seeds = 10;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    bool long_term = false;

    CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_flag("--long-term", long_term, "use the long-term-constraint variant");

    CLI::App* sweep = app.add_subcommand("sweep", "run an experiment across seeds");
    sweep->add_option("--config", config_path, "JSON config file")->required();
    sweep->add_option("--seeds", seeds, "number of seeds");
    sweep->add_option("--threads", threads, "worker threads");
    sweep->add_flag("--long-term", long_term, "use the long-term-constraint variant");

    CLI::App* report = app.add_subcommand("report", "aggregate summaries and emit curve files");
    report->add_option("--input", input_dir, "directory with summaries/traces")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, long_term);
        if (sweep->parsed()) return cmd_sweep(config_path, seeds, threads, long_term);
        if (report->parsed()) return cmd_report(input_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
