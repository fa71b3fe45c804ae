#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "socl/rng.hpp"

namespace socl {

enum class ConstraintKind { Linear, Glm, Polytopic, FiniteTable };
enum class LossKind { Fixed, Iid, Switching };
enum class SafeSetKind { Ball, Origin, FiniteList };

// Monotone differentiable link with sigma(0) = 0, evaluated on a clamped
// pre-link range. Derivative extremes are taken numerically on a grid at
// construction.
struct GlmLink {
    std::string name = "tanh";
    double clamp_bound = 2.0;
    double c_lower = 0.0;  // min sigma' on the clamped range
    double c_upper = 0.0;  // max sigma' on the clamped range

    double value(double u) const;
    double derivative(double u) const;
    double inverse(double v) const;
    void calibrate(int grid_points = 10000);
    double ratio() const { return c_upper / c_lower; }
};

// Loss adversary. Descriptors are vectors: a loss direction for linear losses,
// a per-arm loss table for finite action spaces. The switching adversary
// conditions only on the learner's played actions.
struct LossAdversary {
    LossKind kind = LossKind::Fixed;
    Eigen::VectorXd fixed;     // fixed descriptor
    double bound = 1.0;        // D_ell
    bool finite_actions = false;

    // accumulated play statistics for the switching heuristic
    Eigen::VectorXd play_sum;
    long plays = 0;

    Eigen::VectorXd next(Rng& rng) const;
    void observe_play(const Eigen::VectorXd& continuous_action, int finite_action);
};

struct Environment {
    ConstraintKind kind = ConstraintKind::Linear;
    int dimension = 2;            // continuous paths
    int num_actions = 0;          // finite path (K)
    double offset_b = 0.5;        // known offset (>= 0; zero only for the stuck preset)
    double noise_std = 0.1;
    double action_bound = 1.0;    // D_a

    Eigen::VectorXd fstar;        // linear / glm parameter
    Eigen::MatrixXd fstar_rows;   // polytopic rows (m x d)
    Eigen::MatrixXd table;        // finite classes: |F| x K values in [-1, 1]
    int true_function = 0;        // finite: index of f* in the table
    GlmLink link;

    SafeSetKind safe_set_kind = SafeSetKind::Ball;
    double safe_ball_radius = 0.5;
    std::vector<int> safe_indices;  // finite path initial safe actions

    LossAdversary adversary;

    bool finite() const { return kind == ConstraintKind::FiniteTable; }
    int constraint_rows() const {
        return kind == ConstraintKind::Polytopic ? static_cast<int>(fstar_rows.rows()) : 1;
    }

    // f*(a); for polytopic constraints the scalar value is the worst row.
    double constraint_eval(const Eigen::VectorXd& a) const;
    double constraint_eval_finite(int a) const;
    Eigen::VectorXd constraint_rows_eval(const Eigen::VectorXd& a) const;

    // z_t = f*(a_t) + noise; vector-valued for polytopic constraints.
    Eigen::VectorXd feedback_draw(const Eigen::VectorXd& a, Rng& rng) const;
    double feedback_draw_finite(int a, Rng& rng) const;

    bool in_initial_safe_set(const Eigen::VectorXd& a) const;
    bool in_initial_safe_set_finite(int a) const;

    // raw loss of an action under a descriptor
    double loss_eval(const Eigen::VectorXd& descriptor, const Eigen::VectorXd& a) const;
    double loss_eval_finite(const Eigen::VectorXd& descriptor, int a) const;

    // losses are normalized to [0, 1] for the ledger; linear losses rescale by
    // 1/(2 D_ell D_a), finite loss tables are already in [0, 1]
    double loss_scale() const;
    double loss_normalize(double raw) const;

    void validate() const;
};

// Named presets: linear_ball, glm_tanh, polytopic_m3, finite_k10, stuck_origin.
Environment make_preset(const std::string& name, int dimension);

// Separation of the finite class on the initial safe actions (Assumption-3
// style Delta_0); environment-side knowledge used by the analysis module.
double finite_separation(const Environment& env);

}  // namespace socl
