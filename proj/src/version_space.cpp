#include "socl/version_space.hpp"

#include <cmath>

namespace socl {

namespace {
constexpr double kTiny = 1e-12;
}

EllipsoidVersionSpace::EllipsoidVersionSpace(Eigen::VectorXd center,
                                             const Eigen::MatrixXd& gram, double radius,
                                             double offset_b, double ball_bound)
    : center_(std::move(center)),
      gram_(gram),
      radius_(radius),
      offset_b_(offset_b),
      ball_bound_(ball_bound) {
    if (radius <= 0.0) throw std::invalid_argument("version-space radius must be > 0");
    chol_.compute(gram_);
    if (chol_.info() != Eigen::Success)
        throw std::invalid_argument("version-space gram must be positive definite");
    root_radius_ = std::sqrt(radius_);
}

SetMembership EllipsoidVersionSpace::membership(const Eigen::VectorXd& a) const {
    if (f_max(a) <= 0.0) return SetMembership::Pessimistic;
    if (f_min(a) <= 0.0) return SetMembership::Optimistic;
    return SetMembership::Neither;
}

double EllipsoidVersionSpace::gamma_scale(const Eigen::VectorXd& a) const {
    if (f_min(a) > 0.0) throw ActionNotOptimistic();
    const double hi = raw_hi(a);  // f_max(a) + b
    if (hi <= 0.0) return 1.0;    // the whole ray is pessimistic
    double gamma = std::min(1.0, offset_b_ / std::max(hi, kTiny));
    // guarantee gamma * a in P_t under rounding; the shave is a few ulps
    for (int guard = 0; guard < 8 && f_max(gamma * a) > 0.0; ++guard)
        gamma *= 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
    return gamma;
}

void EllipsoidVersionSpace::batch_bounds(const Eigen::MatrixXd& pts, Eigen::VectorXd& fmin,
                                         Eigen::VectorXd& fmax) const {
    Eigen::VectorXd mid = pts.transpose() * center_;
    Eigen::MatrixXd whitened = chol_.matrixL().solve(pts);
    Eigen::VectorXd spread = whitened.colwise().norm().transpose() * root_radius_;
    fmin = mid - spread - Eigen::VectorXd::Constant(pts.cols(), offset_b_);
    fmax = mid + spread - Eigen::VectorXd::Constant(pts.cols(), offset_b_);
}

FiniteVersionSpace::FiniteVersionSpace(const Eigen::MatrixXd& table,
                                       const std::vector<int>& initial_ids,
                                       const Eigen::VectorXd& deviation_sums, double radius)
    : table_(&table) {
    for (int f : initial_ids)
        if (deviation_sums[f] <= radius) survivors_.push_back(f);
}

double FiniteVersionSpace::f_min(int a) const {
    double lo = std::numeric_limits<double>::infinity();
    for (int f : survivors_) lo = std::min(lo, (*table_)(f, a));
    return lo;
}

double FiniteVersionSpace::f_max(int a) const {
    double hi = -std::numeric_limits<double>::infinity();
    for (int f : survivors_) hi = std::max(hi, (*table_)(f, a));
    return hi;
}

SetMembership FiniteVersionSpace::membership(int a) const {
    if (f_max(a) <= 0.0) return SetMembership::Pessimistic;
    if (f_min(a) <= 0.0) return SetMembership::Optimistic;
    return SetMembership::Neither;
}

int FiniteVersionSpace::width_argmax(const std::vector<int>& candidates) const {
    int best = candidates.front();
    double best_width = -1.0;
    for (int a : candidates) {
        const double w = width(a);
        if (w > best_width + 1e-15) {  // ties break toward the lowest index
            best_width = w;
            best = a;
        }
    }
    return best;
}

SetMembership GlmVersionSpace::membership(const Eigen::VectorXd& a) const {
    if (f_max(a) <= 0.0) return SetMembership::Pessimistic;
    if (f_min(a) <= 0.0) return SetMembership::Optimistic;
    return SetMembership::Neither;
}

double GlmVersionSpace::gamma_scale(const Eigen::VectorXd& a) const {
    // identical scaling on the pre-link quantity; sigma is monotone with
    // sigma(0) = 0, so gamma * a stays pessimistic through the link
    if (f_min(a) > 0.0) throw ActionNotOptimistic();
    const double hi = inner_.raw_hi(a);
    if (hi <= 0.0) return 1.0;
    double gamma = std::min(1.0, inner_.offset_b() / std::max(hi, kTiny));
    for (int guard = 0; guard < 8 && inner_.f_max(gamma * a) > 0.0; ++guard)
        gamma *= 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
    return gamma;
}

void GlmVersionSpace::batch_bounds(const Eigen::MatrixXd& pts, Eigen::VectorXd& fmin,
                                   Eigen::VectorXd& fmax) const {
    inner_.batch_bounds(pts, fmin, fmax);
    for (int j = 0; j < fmin.size(); ++j) {
        fmin[j] = link_.value(fmin[j]);
        fmax[j] = link_.value(fmax[j]);
    }
}

Eigen::VectorXd ProductVersionSpace::f_min_rows(const Eigen::VectorXd& a) const {
    Eigen::VectorXd out(rows());
    for (int i = 0; i < rows(); ++i) out[i] = rows_[i].f_min(a);
    return out;
}

Eigen::VectorXd ProductVersionSpace::f_max_rows(const Eigen::VectorXd& a) const {
    Eigen::VectorXd out(rows());
    for (int i = 0; i < rows(); ++i) out[i] = rows_[i].f_max(a);
    return out;
}

double ProductVersionSpace::width(const Eigen::VectorXd& a) const {
    double w = 0.0;
    for (const auto& row : rows_) w = std::max(w, row.width(a));
    return w;
}

SetMembership ProductVersionSpace::membership(const Eigen::VectorXd& a) const {
    bool all_pessimistic = true;
    bool all_optimistic = true;
    for (const auto& row : rows_) {
        const SetMembership m = row.membership(a);
        if (m != SetMembership::Pessimistic) all_pessimistic = false;
        if (m == SetMembership::Neither) all_optimistic = false;
    }
    if (all_pessimistic) return SetMembership::Pessimistic;
    if (all_optimistic) return SetMembership::Optimistic;
    return SetMembership::Neither;
}

double ProductVersionSpace::gamma_scale(const Eigen::VectorXd& a) const {
    if (membership(a) == SetMembership::Neither) throw ActionNotOptimistic();
    double gamma = 1.0;
    for (const auto& row : rows_) {
        const double hi = row.raw_hi(a);
        if (hi <= 0.0) continue;
        gamma = std::min(gamma, row.offset_b() / std::max(hi, kTiny));
    }
    for (int guard = 0; guard < 8 && membership(gamma * a) != SetMembership::Pessimistic;
         ++guard)
        gamma *= 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
    return gamma;
}

void ProductVersionSpace::batch_bounds(const Eigen::MatrixXd& pts, Eigen::VectorXd& fmin,
                                       Eigen::VectorXd& fmax) const {
    Eigen::VectorXd lo, hi;
    rows_[0].batch_bounds(pts, fmin, fmax);
    for (std::size_t i = 1; i < rows_.size(); ++i) {
        rows_[i].batch_bounds(pts, lo, hi);
        fmin = fmin.cwiseMax(lo);  // optimistic needs every row's minimum <= 0
        fmax = fmax.cwiseMax(hi);  // pessimistic needs every row's maximum <= 0
    }
}

double vs_f_min(const ContinuousVersionSpace& vs, const Eigen::VectorXd& a) {
    return std::visit([&](const auto& v) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, ProductVersionSpace>)
            return v.f_min_rows(a).maxCoeff();
        else
            return v.f_min(a);
    }, vs);
}

double vs_f_max(const ContinuousVersionSpace& vs, const Eigen::VectorXd& a) {
    return std::visit([&](const auto& v) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, ProductVersionSpace>)
            return v.f_max_rows(a).maxCoeff();
        else
            return v.f_max(a);
    }, vs);
}

double vs_width(const ContinuousVersionSpace& vs, const Eigen::VectorXd& a) {
    return std::visit([&](const auto& v) { return v.width(a); }, vs);
}

SetMembership vs_membership(const ContinuousVersionSpace& vs, const Eigen::VectorXd& a) {
    return std::visit([&](const auto& v) { return v.membership(a); }, vs);
}

double vs_gamma_scale(const ContinuousVersionSpace& vs, const Eigen::VectorXd& a) {
    return std::visit([&](const auto& v) { return v.gamma_scale(a); }, vs);
}

void vs_batch_bounds(const ContinuousVersionSpace& vs, const Eigen::MatrixXd& pts,
                     Eigen::VectorXd& fmin, Eigen::VectorXd& fmax) {
    std::visit([&](const auto& v) { v.batch_bounds(pts, fmin, fmax); }, vs);
}

double linear_radius(long horizon, double delta, int dim, double action_bound,
                     double calibration) {
    const double t = static_cast<double>(std::max<long>(horizon, 1));
    const double d = static_cast<double>(dim);
    return calibration *
           (d * std::log(1.0 + t * action_bound * action_bound / d) + std::log(1.0 / delta));
}

double finite_radius(long horizon, double delta, int num_functions, double noise_std,
                     double calibration) {
    // One wrong leader per class member costs at most the squared value range
    // before the oracle drops it; the noise term covers the stochastic case.
    const double t = static_cast<double>(std::max<long>(horizon, 2));
    const double f = static_cast<double>(num_functions);
    return calibration * (4.0 * (f - 1.0) +
                          8.0 * noise_std * noise_std * std::log(f * t / delta) +
                          std::log(1.0 / delta));
}

}  // namespace socl
