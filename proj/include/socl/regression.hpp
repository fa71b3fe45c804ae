#pragma once

#include <Eigen/Dense>

namespace socl {

// Vovk-Azoury-Warmuth forecaster state. `predict` is pure; `update` is the
// only mutator. The forecaster regresses on the raw linear part f . a; offsets
// are handled by the version-space layer.
struct VawState {
    Eigen::MatrixXd gram;    // V_t = lambda I + sum_s a_s a_s^T
    Eigen::VectorXd moment;  // m_t = sum_s z_s a_s
    double lambda = 1.0;
    long count = 0;

    static VawState create(int dim, double lambda = 1.0);

    // z_hat = a^T (V + a a^T)^{-1} m
    double predict(const Eigen::VectorXd& a) const;
    void update(const Eigen::VectorXd& a, double z);
};

// Online regression over a finite class: per-function cumulative squared error
// against the raw feedback; predictions follow the lowest-index function whose
// excess error over the running best is within the survival budget.
struct FiniteRegressionState {
    Eigen::MatrixXd table;     // |F| x K function values
    Eigen::VectorXd sq_error;  // per-function cumulative squared error
    double survival_budget = 1e-9;
    long count = 0;

    static FiniteRegressionState create(const Eigen::MatrixXd& table, double budget);

    int leader() const;  // lowest-index in-budget function
    double predict(int action) const;
    void update(int action, double z);
};

// Excess-error budget for the finite oracle: wrong leaders must die quickly
// while the realizable function survives noise fluctuations.
double finite_oracle_budget(double noise_std, int num_functions, long horizon, double delta);

}  // namespace socl
