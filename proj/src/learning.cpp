#include "socl/learning.hpp"

#include <cmath>

#include "socl/geometry.hpp"

namespace socl {

OgdOracle::OgdOracle(Eigen::MatrixXd lattice, double eta, double grad_bound,
                     double projection_tolerance, int max_projection_iterations)
    : lattice_(std::move(lattice)),
      eta_(eta),
      grad_bound_(grad_bound),
      tolerance_(projection_tolerance),
      max_iterations_(max_projection_iterations) {
    anchor_ = Eigen::VectorXd::Zero(lattice_.rows());
    last_gradient_ = Eigen::VectorXd::Zero(lattice_.rows());
}

OgdRecommendation OgdOracle::recommend(
    const std::vector<char>& lattice_alive,
    const std::function<bool(const Eigen::VectorXd&)>& in_optimistic) {
    const int d = static_cast<int>(lattice_.rows());
    const int n = static_cast<int>(lattice_.cols());

    // Refresh the pool: lattice columns still optimistic plus carried support
    // points that survived, appended after the lattice block.
    std::vector<Eigen::VectorXd> carried_alive;
    for (const auto& p : carried_)
        if (in_optimistic(p)) carried_alive.push_back(p);

    std::vector<int> active;
    active.reserve(n + carried_alive.size());
    for (int j = 0; j < n; ++j)
        if (lattice_alive[j]) active.push_back(j);
    Eigen::MatrixXd pool(d, n + static_cast<int>(carried_alive.size()));
    pool.leftCols(n) = lattice_;
    for (int k = 0; k < static_cast<int>(carried_alive.size()); ++k) {
        pool.col(n + k) = carried_alive[k];
        active.push_back(n + k);
    }
    if (active.empty()) throw EmptyCandidatePool(n);

    const Eigen::VectorXd target = anchor_ - eta_ * last_gradient_;
    HullProjectionResult proj =
        project_to_hull(pool, target, tolerance_, max_iterations_, &active);

    anchor_ = proj.point;
    carried_.clear();
    for (int idx : proj.support) carried_.push_back(pool.col(idx));

    OgdRecommendation rec;
    rec.support.resize(d, static_cast<int>(proj.support.size()));
    for (int k = 0; k < static_cast<int>(proj.support.size()); ++k)
        rec.support.col(k) = pool.col(proj.support[k]);
    rec.weights = proj.weights;
    rec.anchor = anchor_;
    rec.projection_converged = proj.converged;
    rec.projection_iterations = proj.iterations;
    return rec;
}

void OgdOracle::update(const Eigen::VectorXd& gradient) {
    if (gradient.norm() > grad_bound_ + 1e-9) throw GradientTooLarge();
    last_gradient_ = gradient;
}

SleepingHedge::SleepingHedge(int num_actions, double eta)
    : log_weights_(Eigen::VectorXd::Zero(num_actions)), eta_(eta) {}

Eigen::VectorXd SleepingHedge::recommend(const std::vector<char>& awake) const {
    const int k = static_cast<int>(log_weights_.size());
    double max_awake = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
        if (awake[i]) max_awake = std::max(max_awake, log_weights_[i]);
    if (!std::isfinite(max_awake)) throw NoAwakeAction();

    Eigen::VectorXd probs = Eigen::VectorXd::Zero(k);
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        if (!awake[i]) continue;
        probs[i] = std::exp(log_weights_[i] - max_awake);
        total += probs[i];
    }
    probs /= total;
    return probs;
}

void SleepingHedge::update(const Eigen::VectorXd& losses, const std::vector<char>& awake,
                           const Eigen::VectorXd& probs) {
    const double expected = probs.dot(losses);
    for (int i = 0; i < log_weights_.size(); ++i) {
        const double charged = awake[i] ? losses[i] : expected;
        log_weights_[i] -= eta_ * charged;
    }
    // keep the scale bounded; shifting all log-weights is observationally neutral
    const double shift = log_weights_.maxCoeff();
    log_weights_.array() -= shift;
}

}  // namespace socl
