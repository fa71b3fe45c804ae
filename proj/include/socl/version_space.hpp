#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <variant>
#include <vector>

#include "socl/environments.hpp"

namespace socl {

enum class SetMembership { Neither, Optimistic, Pessimistic };

struct ActionNotOptimistic : std::runtime_error {
    ActionNotOptimistic() : std::runtime_error("gamma_scale: action is not optimistic") {}
};

// Confidence ellipsoid {f : ||f - center||_V^2 <= radius} for a linear
// constraint f . a - b. Queries use the closed forms
//   f_min(a) = center.a - sqrt(radius) ||a||_{V^-1} - b
//   f_max(a) = center.a + sqrt(radius) ||a||_{V^-1} - b
// which drop the F0 unit-ball intersection; that direction is conservative
// (optimistic sets grow, pessimistic sets shrink).
class EllipsoidVersionSpace {
public:
    EllipsoidVersionSpace() = default;
    EllipsoidVersionSpace(Eigen::VectorXd center, const Eigen::MatrixXd& gram,
                          double radius, double offset_b, double ball_bound = 1.0);

    double f_min(const Eigen::VectorXd& a) const { return raw_lo(a) - offset_b_; }
    double f_max(const Eigen::VectorXd& a) const { return raw_hi(a) - offset_b_; }
    double width(const Eigen::VectorXd& a) const { return 2.0 * root_radius_ * vnorm(a); }
    SetMembership membership(const Eigen::VectorXd& a) const;

    // Largest gamma in [0, 1] with gamma * a pessimistic; exact because the
    // pessimistic constraint scales linearly along the ray.
    double gamma_scale(const Eigen::VectorXd& a) const;

    // f.a without the offset; raw_hi(a) = f_max(a) + b
    double raw_lo(const Eigen::VectorXd& a) const { return center_.dot(a) - root_radius_ * vnorm(a); }
    double raw_hi(const Eigen::VectorXd& a) const { return center_.dot(a) + root_radius_ * vnorm(a); }

    // columns of `pts`; writes f_min / f_max per column
    void batch_bounds(const Eigen::MatrixXd& pts, Eigen::VectorXd& fmin,
                      Eigen::VectorXd& fmax) const;

    bool contains_parameter(const Eigen::VectorXd& f) const {
        Eigen::VectorXd diff = f - center_;
        return diff.dot(gram_ * diff) <= radius_ + 1e-12;
    }

    const Eigen::VectorXd& center() const { return center_; }
    const Eigen::MatrixXd& gram() const { return gram_; }
    double radius() const { return radius_; }
    double offset_b() const { return offset_b_; }
    double ball_bound() const { return ball_bound_; }

private:
    double vnorm(const Eigen::VectorXd& a) const {
        return chol_.matrixL().solve(a).norm();
    }

    Eigen::VectorXd center_;
    Eigen::MatrixXd gram_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    double radius_ = 1.0;
    double root_radius_ = 1.0;
    double offset_b_ = 0.5;
    double ball_bound_ = 1.0;
};

// Finite class version space: survivors are the functions whose cumulative
// squared deviation from the recorded oracle predictions stays within the
// radius. Rebuilt each round from the running deviation sums.
class FiniteVersionSpace {
public:
    FiniteVersionSpace() = default;
    FiniteVersionSpace(const Eigen::MatrixXd& table, const std::vector<int>& initial_ids,
                       const Eigen::VectorXd& deviation_sums, double radius);

    bool empty() const { return survivors_.empty(); }
    const std::vector<int>& survivors() const { return survivors_; }
    const Eigen::MatrixXd& table() const { return *table_; }

    double f_min(int a) const;
    double f_max(int a) const;
    double width(int a) const { return f_max(a) - f_min(a); }
    SetMembership membership(int a) const;
    int width_argmax(const std::vector<int>& candidates) const;

private:
    const Eigen::MatrixXd* table_ = nullptr;
    std::vector<int> survivors_;
};

// Generalized linear wrap: the link is applied to the pre-link ellipsoid
// extremes; gamma scaling acts on the pre-link quantity (sigma(0) = 0 and
// monotonicity carry it through the link).
class GlmVersionSpace {
public:
    GlmVersionSpace() = default;
    GlmVersionSpace(EllipsoidVersionSpace inner, GlmLink link)
        : inner_(std::move(inner)), link_(std::move(link)) {}

    double f_min(const Eigen::VectorXd& a) const { return link_.value(inner_.f_min(a)); }
    double f_max(const Eigen::VectorXd& a) const { return link_.value(inner_.f_max(a)); }
    double width(const Eigen::VectorXd& a) const { return f_max(a) - f_min(a); }
    double pre_link_width(const Eigen::VectorXd& a) const { return inner_.width(a); }
    SetMembership membership(const Eigen::VectorXd& a) const;
    double gamma_scale(const Eigen::VectorXd& a) const;

    void batch_bounds(const Eigen::MatrixXd& pts, Eigen::VectorXd& fmin,
                      Eigen::VectorXd& fmax) const;

    const EllipsoidVersionSpace& inner() const { return inner_; }
    const GlmLink& link() const { return link_; }

private:
    EllipsoidVersionSpace inner_;
    GlmLink link_;
};

// One ellipsoid per constraint row; width is the row maximum, membership is
// the row intersection, gamma is the row minimum.
class ProductVersionSpace {
public:
    ProductVersionSpace() = default;
    explicit ProductVersionSpace(std::vector<EllipsoidVersionSpace> rows)
        : rows_(std::move(rows)) {}

    int rows() const { return static_cast<int>(rows_.size()); }
    const EllipsoidVersionSpace& row(int i) const { return rows_[i]; }

    Eigen::VectorXd f_min_rows(const Eigen::VectorXd& a) const;
    Eigen::VectorXd f_max_rows(const Eigen::VectorXd& a) const;
    double width(const Eigen::VectorXd& a) const;
    SetMembership membership(const Eigen::VectorXd& a) const;
    double gamma_scale(const Eigen::VectorXd& a) const;

    void batch_bounds(const Eigen::MatrixXd& pts, Eigen::VectorXd& fmin,
                      Eigen::VectorXd& fmax) const;

private:
    std::vector<EllipsoidVersionSpace> rows_;
};

using ContinuousVersionSpace =
    std::variant<EllipsoidVersionSpace, GlmVersionSpace, ProductVersionSpace>;

double vs_f_min(const ContinuousVersionSpace& vs, const Eigen::VectorXd& a);
double vs_f_max(const ContinuousVersionSpace& vs, const Eigen::VectorXd& a);
double vs_width(const ContinuousVersionSpace& vs, const Eigen::VectorXd& a);
SetMembership vs_membership(const ContinuousVersionSpace& vs, const Eigen::VectorXd& a);
double vs_gamma_scale(const ContinuousVersionSpace& vs, const Eigen::VectorXd& a);
void vs_batch_bounds(const ContinuousVersionSpace& vs, const Eigen::MatrixXd& pts,
                     Eigen::VectorXd& fmin, Eigen::VectorXd& fmax);

// The per-round (O_t, P_t) pair. The initial safe set is promised safe under
// the whole class, so it is unioned into both predicates; this keeps
// A0 subset-of P_t even though the closed-form ellipsoid queries drop the
// F0 ball intersection.
struct SafeSets {
    const ContinuousVersionSpace* vs = nullptr;
    const Environment* env = nullptr;

    bool pessimistic(const Eigen::VectorXd& a) const {
        return vs_membership(*vs, a) == SetMembership::Pessimistic ||
               env->in_initial_safe_set(a);
    }
    bool optimistic(const Eigen::VectorXd& a) const {
        return vs_membership(*vs, a) != SetMembership::Neither ||
               env->in_initial_safe_set(a);
    }
};

// Version-space radius beta(T, delta). Linear paths use the calibrated
// d log(1 + T D_a^2 / d) + log(1/delta) form; finite classes budget for the
// lowest-index oracle's worst case of one wrong leader per class member.
double linear_radius(long horizon, double delta, int dim, double action_bound,
                     double calibration);
double finite_radius(long horizon, double delta, int num_functions, double noise_std,
                     double calibration);

}  // namespace socl
