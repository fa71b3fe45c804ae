#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "socl/environments.hpp"
#include "socl/mappings.hpp"

namespace socl {

// Declarative description of one experiment. See README for the JSON schema.
struct ExperimentConfig {
    long horizon = 1000;
    double delta = 0.05;
    std::uint64_t seed = 0;

    // environment
    std::string preset = "linear_ball";
    int dimension = 2;
    std::optional<double> offset_b;
    std::optional<double> noise_std;
    std::optional<Eigen::VectorXd> constraint;  // explicit f* override (continuous)
    std::optional<std::string> loss_kind;       // fixed | iid | switching
    std::optional<Eigen::VectorXd> loss_vector;
    double loss_bound = 1.0;  // D_ell

    // regression oracle
    double lambda = 1.0;
    double radius_scale = 1.0;  // calibration scalar c_cal

    // learning oracle (continuous path)
    int grid_resolution = 33;

    // mapping
    std::optional<std::string> mapping;  // default depends on the action space
    double kappa = 1.0;

    // output
    std::string trace_path;
    std::string summary_path;
    bool diagnostics = false;  // dump regression-oracle state into the trace

    void validate() const;
    Environment build_environment() const;
    MappingKind mapping_kind() const;

    static ExperimentConfig from_json_string(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json_string() const;
};

}  // namespace socl
