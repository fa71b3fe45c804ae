#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

#include "socl/config.hpp"
#include "socl/environments.hpp"
#include "socl/trace.hpp"
#include "socl/version_space.hpp"

namespace socl {

// The configured environment's constraint fell outside the model class; only
// detectable when the version space empties out.
struct ModelMismatch : std::runtime_error {
    ModelMismatch() : std::runtime_error("version space is empty: constraint outside the model class") {}
};

struct NoSafeAction : std::runtime_error {
    NoSafeAction() : std::runtime_error("the true safe set is empty; invalid environment") {}
};

struct RunResult {
    std::vector<RoundRecord> records;
    RegretLedger ledger;
    Environment environment;         // environment as instantiated for the run
    double radius_beta = 0.0;        // version-space radius used
    Eigen::VectorXd cumulative_loss; // summed loss descriptors (d- or K-vector)
};

struct RunOptions {
    bool keep_records = true;
    // per-round inspection hooks for property tests; called once the round's
    // version space exists, before the action is drawn
    std::function<void(long, const ContinuousVersionSpace&, const Environment&)> continuous_probe;
    std::function<void(long, const FiniteVersionSpace&)> finite_probe;
};

// Round-by-round protocol: version space from the regression history, optimistic
// recommendation, mapping into the pessimistic set, play, feedback, oracle
// updates. Deterministic given config + seed.
RunResult run_safe_learning(const ExperimentConfig& cfg, const RunOptions& opts = {});

// Long-term-constraint variant: plays the learning oracle's output over O_t
// directly; the ledger accumulates the signed and positive violation sums.
RunResult run_long_term(const ExperimentConfig& cfg, const RunOptions& opts = {});

// Reference policy for harness comparisons: always plays the cumulative-loss
// argmin over the pessimistic set (probe lattice).
RunResult run_pessimistic_greedy(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct HindsightResult {
    Eigen::VectorXd action;       // continuous optimum
    int action_index = -1;        // finite optimum
    double raw_value = 0.0;       // cumulative raw loss of the optimum
    double normalized_cum_loss = 0.0;
    bool stationarity_verified = true;  // KKT-style fixed-point check (continuous)
};

HindsightResult hindsight_best_safe_continuous(const Environment& env,
                                               const Eigen::VectorXd& cumulative_loss,
                                               long horizon);
HindsightResult hindsight_best_safe_finite(const Environment& env,
                                           const Eigen::VectorXd& cumulative_losses,
                                           long horizon);

// Runs `num_seeds` independent runs with seeds base.seed, base.seed+1, ...;
// runs share no mutable state and may execute on several threads.
std::vector<RunResult> run_sweep(const ExperimentConfig& base, int num_seeds, int threads,
                                 bool long_term = false, bool keep_records = false);

// Version-space radius the engine will use for this config.
double engine_radius(const ExperimentConfig& cfg, const Environment& env);

}  // namespace socl
