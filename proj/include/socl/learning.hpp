#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

namespace socl {

struct EmptyCandidatePool : std::runtime_error {
    explicit EmptyCandidatePool(int resolution)
        : std::runtime_error("candidate pool is empty; probe lattice resolution " +
                             std::to_string(resolution) + " too coarse for the optimistic set") {}
};

struct GradientTooLarge : std::runtime_error {
    GradientTooLarge() : std::runtime_error("gradient norm exceeds the configured bound") {}
};

struct NoAwakeAction : std::runtime_error {
    NoAwakeAction() : std::runtime_error("no awake action to recommend over") {}
};

struct OgdRecommendation {
    Eigen::MatrixXd support;   // d x m support points, m <= d+1
    Eigen::VectorXd weights;   // convex weights; expectation equals `anchor`
    Eigen::VectorXd anchor;    // projected OGD iterate
    bool projection_converged = true;
    int projection_iterations = 0;
};

// Projected online gradient descent over Conv(O_t), represented by a fixed
// probe lattice filtered by optimistic membership plus previously used
// support points. The projection of the iterate is decomposed into a convex
// combination of at most d+1 pool members for unbiased sampling.
class OgdOracle {
public:
    OgdOracle(Eigen::MatrixXd lattice, double eta, double grad_bound,
              double projection_tolerance = 1e-9, int max_projection_iterations = 10000);

    // `lattice_alive[j]` marks lattice column j as a member of O_t this round;
    // `in_optimistic` re-checks carried support points.
    OgdRecommendation recommend(const std::vector<char>& lattice_alive,
                                const std::function<bool(const Eigen::VectorXd&)>& in_optimistic);

    void update(const Eigen::VectorXd& gradient);

    const Eigen::MatrixXd& lattice() const { return lattice_; }
    const Eigen::VectorXd& anchor() const { return anchor_; }
    double eta() const { return eta_; }

private:
    Eigen::MatrixXd lattice_;
    std::vector<Eigen::VectorXd> carried_;  // support points from earlier rounds
    Eigen::VectorXd anchor_;
    Eigen::VectorXd last_gradient_;
    double eta_;
    double grad_bound_;
    double tolerance_;
    int max_iterations_;
};

// OGD step size from the regret analysis of the linear-loss oracle.
inline double ogd_step_size(double action_bound, double grad_bound, long horizon) {
    return 2.0 * action_bound /
           (grad_bound * std::sqrt(static_cast<double>(std::max<long>(horizon, 1))));
}

// Sleeping-experts Hedge over K arms. Asleep arms are charged the
// distribution's expected loss, so the comparator guarantee holds against any
// arm that is awake on every round.
class SleepingHedge {
public:
    SleepingHedge(int num_actions, double eta);

    Eigen::VectorXd recommend(const std::vector<char>& awake) const;
    void update(const Eigen::VectorXd& losses, const std::vector<char>& awake,
                const Eigen::VectorXd& probs);

    const Eigen::VectorXd& log_weights() const { return log_weights_; }
    double eta() const { return eta_; }

private:
    Eigen::VectorXd log_weights_;
    double eta_;
};

inline double hedge_learning_rate(int num_actions, long horizon) {
    return std::sqrt(8.0 * std::log(static_cast<double>(std::max(num_actions, 2))) /
                     static_cast<double>(std::max<long>(horizon, 1)));
}

}  // namespace socl
