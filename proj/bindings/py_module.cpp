#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "socl/analysis.hpp"
#include "socl/engine.hpp"

namespace py = pybind11;

namespace {

py::dict ledger_to_dict(const socl::RegretLedger& ledger) {
    py::dict d;
    d["learner_cum_loss"] = ledger.learner_cum_loss;
    d["hindsight_safe_opt_loss"] = ledger.hindsight_safe_opt_loss;
    d["regret"] = ledger.regret;
    d["violations"] = ledger.violations;
    d["violation_magnitude_sum"] = ledger.violation_magnitude_sum;
    d["signed_violation_sum"] = ledger.signed_violation_sum;
    d["width_sum"] = ledger.width_sum;
    d["loss_scale"] = ledger.loss_scale;
    d["radius_beta"] = ledger.radius_beta;
    d["coverage_all_rounds"] = ledger.coverage_all_rounds;
    d["runtime_ms"] = ledger.runtime_ms;
    d["horizon"] = ledger.horizon;
    d["seed"] = ledger.seed;
    d["width_grid"] = ledger.width_grid;
    d["width_exceed_counts"] = ledger.width_exceed_counts;
    return d;
}

py::dict record_to_dict(const socl::RoundRecord& r) {
    py::dict d;
    d["t"] = r.t;
    if (r.finite) {
        d["action"] = r.action_index;
        d["rec_support"] = r.rec_support;
        d["rec_probs"] = r.rec_probs;
    } else {
        d["action"] = std::vector<double>(r.action.data(), r.action.data() + r.action.size());
        d["pre_map_action"] = std::vector<double>(
            r.pre_map_action.data(), r.pre_map_action.data() + r.pre_map_action.size());
    }
    d["gamma"] = r.gamma;
    d["width_at_action"] = r.width_at_action;
    d["prediction"] = r.prediction;
    d["constraint_value"] = r.constraint_value;
    d["violated"] = r.violated;
    d["cumulative_regret_proxy"] = r.cumulative_regret_proxy;
    d["mapping_id"] = socl::mapping_name(r.mapping_id);
    d["pre_map_width"] = r.pre_map_width;
    d["loss_value"] = r.loss_value;
    d["loss_gap"] = r.loss_gap;
    d["expected_width"] = r.expected_width;
    d["fstar_in_space"] = r.fstar_in_space;
    if (r.oracle_center.size() > 0)
        d["oracle_center"] = std::vector<double>(
            r.oracle_center.data(), r.oracle_center.data() + r.oracle_center.size());
    return d;
}

py::dict certificate_to_dict(const socl::RegretCertificate& cert) {
    py::dict d;
    d["realized_regret"] = cert.realized_regret;
    d["kappa_star"] = cert.kappa_star;
    d["kappa_star_raw"] = cert.kappa_star_raw;
    d["width_term"] = cert.width_term;
    d["reg_ol"] = cert.reg_ol;
    d["deviation_term"] = cert.deviation_term;
    d["bound"] = cert.bound;
    d["pass"] = cert.pass;
    d["max_round_ratio"] = cert.max_round_ratio;
    d["ratio_pass"] = cert.ratio_pass;
    return d;
}

Eigen::MatrixXd table_from_lists(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("table must be nonempty");
    Eigen::MatrixXd table(rows.size(), rows[0].size());
    for (std::size_t f = 0; f < rows.size(); ++f) {
        if (rows[f].size() != rows[0].size())
            throw std::invalid_argument("table rows must have equal length");
        for (std::size_t a = 0; a < rows[f].size(); ++a)
            table(static_cast<int>(f), static_cast<int>(a)) = rows[f][a];
    }
    return table;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "safe online learning under unknown constraints";

    py::class_<socl::RunResult>(m, "RunResult")
        .def_property_readonly("ledger",
                               [](const socl::RunResult& r) { return ledger_to_dict(r.ledger); })
        .def_property_readonly("records",
                               [](const socl::RunResult& r) {
                                   py::list out;
                                   for (const auto& rec : r.records)
                                       out.append(record_to_dict(rec));
                                   return out;
                               })
        .def_property_readonly("radius_beta",
                               [](const socl::RunResult& r) { return r.radius_beta; })
        .def("widths",
             [](const socl::RunResult& r) { return socl::widths_from_records(r.records); })
        .def("certify",
             [](const socl::RunResult& r, double delta, double c_eluder) {
                 return certificate_to_dict(socl::certify_regret(r, delta, c_eluder));
             },
             py::arg("delta") = 0.05, py::arg("c_eluder") = 4.0)
        .def("write_trace",
             [](const socl::RunResult& r, const std::string& path) {
                 socl::write_trace_jsonl(r.records, path);
             })
        .def("trace_lines", [](const socl::RunResult& r) {
            py::list out;
            for (const auto& rec : r.records) out.append(socl::round_record_to_json(rec));
            return out;
        });

    m.def(
        "run_safe_learning",
        [](const std::string& config_json, bool keep_records) {
            socl::RunOptions opts;
            opts.keep_records = keep_records;
            return socl::run_safe_learning(socl::ExperimentConfig::from_json_string(config_json),
                                           opts);
        },
        py::arg("config_json"), py::arg("keep_records") = true,
        "Run the round-by-round safe learning protocol from a JSON config string.");

    m.def(
        "run_long_term",
        [](const std::string& config_json, bool keep_records) {
            socl::RunOptions opts;
            opts.keep_records = keep_records;
            return socl::run_long_term(socl::ExperimentConfig::from_json_string(config_json),
                                       opts);
        },
        py::arg("config_json"), py::arg("keep_records") = true,
        "Run the long-term-constraint variant (plays the optimistic recommendation directly).");

    m.def(
        "run_pessimistic_greedy",
        [](const std::string& config_json, bool keep_records) {
            socl::RunOptions opts;
            opts.keep_records = keep_records;
            return socl::run_pessimistic_greedy(
                socl::ExperimentConfig::from_json_string(config_json), opts);
        },
        py::arg("config_json"), py::arg("keep_records") = true,
        "Reference policy: cumulative-loss argmin over the pessimistic lattice.");

    m.def(
        "sweep",
        [](const std::string& config_json, int seeds, int threads, bool long_term) {
            const auto results = socl::run_sweep(
                socl::ExperimentConfig::from_json_string(config_json), seeds, threads, long_term,
                false);
            py::list out;
            for (const auto& r : results) out.append(ledger_to_dict(r.ledger));
            return out;
        },
        py::arg("config_json"), py::arg("seeds"), py::arg("threads") = 2,
        py::arg("long_term") = false,
        "Run consecutive seeds concurrently; returns one ledger dict per seed.");

    m.def(
        "eluder_dimension_finite",
        [](const std::vector<std::vector<double>>& table, double epsilon) {
            const auto res = socl::eluder_dimension_finite(table_from_lists(table), epsilon);
            py::dict d;
            d["dimension"] = res.dimension;
            d["exact"] = res.exact;
            return d;
        },
        py::arg("table"), py::arg("epsilon"),
        "Exact eluder dimension of a finite class (rows = functions, cols = actions).");

    m.def("linear_eluder_proxy", &socl::linear_eluder_proxy, py::arg("dim"), py::arg("epsilon"),
          py::arg("c_eluder") = 4.0);

    m.def(
        "check_violation_count_bound",
        [](const std::vector<double>& widths, double beta, int dim, double c_eluder) {
            auto eluder = [dim, c_eluder](double eps) {
                return socl::linear_eluder_proxy(dim, eps, c_eluder);
            };
            const auto report = socl::check_violation_count_bound(
                widths, beta, socl::default_width_grid(), eluder);
            py::list rows;
            for (const auto& row : report.rows) {
                py::dict d;
                d["epsilon"] = row.epsilon;
                d["count"] = row.count;
                d["eluder"] = row.eluder;
                d["bound_statement"] = row.bound_statement;
                d["bound_proof"] = row.bound_proof;
                d["pass_statement"] = row.pass_statement;
                d["pass_proof"] = row.pass_proof;
                rows.append(d);
            }
            py::dict out;
            out["rows"] = rows;
            out["all_pass_proof"] = report.all_pass_proof;
            out["all_pass_statement"] = report.all_pass_statement;
            return out;
        },
        py::arg("widths"), py::arg("beta"), py::arg("dim"), py::arg("c_eluder") = 4.0);

    m.def(
        "check_width_sum_bound",
        [](const std::vector<double>& widths, double beta, int dim, long horizon,
           double c_eluder) {
            auto eluder = [dim, c_eluder](double eps) {
                return socl::linear_eluder_proxy(dim, eps, c_eluder);
            };
            const auto report = socl::check_width_sum_bound(widths, beta,
                                                            socl::default_width_grid(), eluder,
                                                            horizon);
            py::dict out;
            out["width_sum"] = report.width_sum;
            out["best_bound"] = report.best_bound;
            out["best_alpha"] = report.best_alpha;
            out["pass"] = report.pass;
            return out;
        },
        py::arg("widths"), py::arg("beta"), py::arg("dim"), py::arg("horizon"),
        py::arg("c_eluder") = 4.0);

    m.def("report_directory",
          [](const std::string& dir) {
              const auto s = socl::report_directory(dir);
              py::dict d;
              d["runs"] = s.runs;
              d["regret_mean"] = s.regret_mean;
              d["regret_std"] = s.regret_std;
              d["violations_mean"] = s.violations_mean;
              d["width_sum_mean"] = s.width_sum_mean;
              return d;
          },
          py::arg("input_dir"));

    m.attr("__version__") = "0.1.0";
}
