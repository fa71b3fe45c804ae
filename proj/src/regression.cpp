#include "socl/regression.hpp"

#include <cmath>
#include <stdexcept>

namespace socl {

VawState VawState::create(int dim, double lambda) {
    if (lambda <= 0.0) throw std::invalid_argument("lambda must be > 0");
    VawState s;
    s.gram = lambda * Eigen::MatrixXd::Identity(dim, dim);
    s.moment = Eigen::VectorXd::Zero(dim);
    s.lambda = lambda;
    s.count = 0;
    return s;
}

double VawState::predict(const Eigen::VectorXd& a) const {
    if (moment.isZero(0.0)) return 0.0;
    Eigen::MatrixXd augmented = gram + a * a.transpose();
    Eigen::VectorXd theta = augmented.llt().solve(moment);
    return a.dot(theta);
}

void VawState::update(const Eigen::VectorXd& a, double z) {
    if (!std::isfinite(z)) throw std::invalid_argument("feedback must be finite");
    gram.noalias() += a * a.transpose();
    moment.noalias() += z * a;
    ++count;
}

FiniteRegressionState FiniteRegressionState::create(const Eigen::MatrixXd& table,
                                                    double budget) {
    FiniteRegressionState s;
    s.table = table;
    s.sq_error = Eigen::VectorXd::Zero(table.rows());
    s.survival_budget = budget;
    s.count = 0;
    return s;
}

int FiniteRegressionState::leader() const {
    const double best = sq_error.minCoeff();
    for (int f = 0; f < sq_error.size(); ++f)
        if (sq_error[f] <= best + survival_budget) return f;
    return 0;
}

double FiniteRegressionState::predict(int action) const {
    return table(leader(), action);
}

void FiniteRegressionState::update(int action, double z) {
    if (!std::isfinite(z)) throw std::invalid_argument("feedback must be finite");
    for (int f = 0; f < table.rows(); ++f) {
        const double diff = table(f, action) - z;
        sq_error[f] += diff * diff;
    }
    ++count;
}

double finite_oracle_budget(double noise_std, int num_functions, long horizon, double delta) {
    const double t = static_cast<double>(std::max<long>(horizon, 2));
    const double base = 2.0 * noise_std * noise_std *
                        std::log(static_cast<double>(num_functions) * t / delta);
    return std::max(base, 1e-9);
}

}  // namespace socl
