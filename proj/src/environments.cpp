#include "socl/environments.hpp"

#include <cmath>
#include <stdexcept>

namespace socl {

double GlmLink::value(double u) const {
    const double clamped = std::clamp(u, -clamp_bound, clamp_bound);
    if (name == "tanh") return std::tanh(clamped);
    throw std::invalid_argument("unknown link: " + name);
}

double GlmLink::derivative(double u) const {
    const double clamped = std::clamp(u, -clamp_bound, clamp_bound);
    if (name == "tanh") {
        const double t = std::tanh(clamped);
        return 1.0 - t * t;
    }
    throw std::invalid_argument("unknown link: " + name);
}

double GlmLink::inverse(double v) const {
    if (name == "tanh") {
        const double lo = std::tanh(-clamp_bound);
        const double hi = std::tanh(clamp_bound);
        const double clamped = std::clamp(v, lo + 1e-12, hi - 1e-12);
        return std::atanh(clamped);
    }
    throw std::invalid_argument("unknown link: " + name);
}

void GlmLink::calibrate(int grid_points) {
    c_lower = std::numeric_limits<double>::infinity();
    c_upper = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double u = -clamp_bound +
                         2.0 * clamp_bound * static_cast<double>(i) /
                             static_cast<double>(grid_points - 1);
        const double s = derivative(u);
        c_lower = std::min(c_lower, s);
        c_upper = std::max(c_upper, s);
    }
    if (!(c_lower > 0.0)) throw std::runtime_error("link derivative not bounded away from 0");
}

Eigen::VectorXd LossAdversary::next(Rng& rng) const {
    switch (kind) {
        case LossKind::Fixed:
            return fixed;
        case LossKind::Iid: {
            Eigen::VectorXd out(fixed.size());
            if (finite_actions) {
                for (int i = 0; i < out.size(); ++i) out[i] = rng.uniform();
            } else {
                for (int i = 0; i < out.size(); ++i) out[i] = rng.gaussian();
                const double n = out.norm();
                if (n > 0.0) out *= bound / n;
            }
            return out;
        }
        case LossKind::Switching: {
            // Penalize the learner's empirical play profile.
            if (finite_actions) {
                if (plays == 0) return Eigen::VectorXd::Zero(fixed.size());
                Eigen::VectorXd freq = play_sum / static_cast<double>(plays);
                return freq.cwiseMin(1.0).cwiseMax(0.0);
            }
            if (plays == 0 || play_sum.norm() < 1e-12) {
                Eigen::VectorXd e = Eigen::VectorXd::Zero(fixed.size());
                e[0] = bound;
                return e;
            }
            return Eigen::VectorXd(play_sum * (bound / play_sum.norm()));
        }
    }
    return fixed;
}

void LossAdversary::observe_play(const Eigen::VectorXd& continuous_action, int finite_action) {
    if (finite_actions) {
        if (play_sum.size() != fixed.size()) play_sum = Eigen::VectorXd::Zero(fixed.size());
        if (finite_action >= 0 && finite_action < play_sum.size()) play_sum[finite_action] += 1.0;
    } else {
        if (play_sum.size() != continuous_action.size())
            play_sum = Eigen::VectorXd::Zero(continuous_action.size());
        play_sum += continuous_action;
    }
    ++plays;
}

double Environment::constraint_eval(const Eigen::VectorXd& a) const {
    switch (kind) {
        case ConstraintKind::Linear:
            return fstar.dot(a) - offset_b;
        case ConstraintKind::Glm:
            return link.value(fstar.dot(a) - offset_b);
        case ConstraintKind::Polytopic:
            return constraint_rows_eval(a).maxCoeff();
        case ConstraintKind::FiniteTable:
            throw std::logic_error("constraint_eval: finite environment takes an index");
    }
    return 0.0;
}

double Environment::constraint_eval_finite(int a) const {
    return table(true_function, a);
}

Eigen::VectorXd Environment::constraint_rows_eval(const Eigen::VectorXd& a) const {
    if (kind != ConstraintKind::Polytopic)
        throw std::logic_error("constraint_rows_eval is polytopic-only");
    return fstar_rows * a - Eigen::VectorXd::Constant(fstar_rows.rows(), offset_b);
}

Eigen::VectorXd Environment::feedback_draw(const Eigen::VectorXd& a, Rng& rng) const {
    if (kind == ConstraintKind::Polytopic) {
        Eigen::VectorXd z = constraint_rows_eval(a);
        for (int i = 0; i < z.size(); ++i) z[i] += rng.gaussian(noise_std);
        return z;
    }
    Eigen::VectorXd z(1);
    z[0] = constraint_eval(a) + rng.gaussian(noise_std);
    return z;
}

double Environment::feedback_draw_finite(int a, Rng& rng) const {
    return constraint_eval_finite(a) + rng.gaussian(noise_std);
}

bool Environment::in_initial_safe_set(const Eigen::VectorXd& a) const {
    switch (safe_set_kind) {
        case SafeSetKind::Ball:
            return a.norm() <= safe_ball_radius + 1e-12;
        case SafeSetKind::Origin:
            return a.norm() <= 1e-12;
        case SafeSetKind::FiniteList:
            return false;
    }
    return false;
}

bool Environment::in_initial_safe_set_finite(int a) const {
    for (int idx : safe_indices)
        if (idx == a) return true;
    return false;
}

double Environment::loss_eval(const Eigen::VectorXd& descriptor, const Eigen::VectorXd& a) const {
    return descriptor.dot(a);
}

double Environment::loss_eval_finite(const Eigen::VectorXd& descriptor, int a) const {
    return descriptor[a];
}

double Environment::loss_scale() const {
    if (finite()) return 1.0;
    return 1.0 / (2.0 * adversary.bound * action_bound);
}

double Environment::loss_normalize(double raw) const {
    if (finite()) return raw;
    return (raw + adversary.bound * action_bound) * loss_scale();
}

void Environment::validate() const {
    if (offset_b < 0.0) throw std::invalid_argument("offset b must be >= 0");
    if (noise_std < 0.0) throw std::invalid_argument("noise std must be >= 0");
    switch (kind) {
        case ConstraintKind::Linear:
        case ConstraintKind::Glm:
            if (fstar.size() != dimension) throw std::invalid_argument("constraint dimension mismatch");
            if (fstar.norm() > 1.0 + 1e-12) throw std::invalid_argument("||f*|| must be <= 1");
            break;
        case ConstraintKind::Polytopic:
            if (fstar_rows.cols() != dimension) throw std::invalid_argument("row dimension mismatch");
            for (int i = 0; i < fstar_rows.rows(); ++i)
                if (fstar_rows.row(i).norm() > 1.0 + 1e-12)
                    throw std::invalid_argument("row norm must be <= 1");
            break;
        case ConstraintKind::FiniteTable:
            if (table.cols() != num_actions || table.rows() < 1)
                throw std::invalid_argument("finite table shape mismatch");
            if (table.cwiseAbs().maxCoeff() > 1.0 + 1e-12)
                throw std::invalid_argument("finite table values must lie in [-1, 1]");
            if (true_function < 0 || true_function >= table.rows())
                throw std::invalid_argument("true function index out of range");
            if (safe_indices.empty())
                throw std::invalid_argument("finite environment needs initial safe actions");
            // The initial safe set must be safe under the whole class.
            for (int f = 0; f < table.rows(); ++f)
                for (int a : safe_indices)
                    if (table(f, a) > 1e-12)
                        throw std::invalid_argument("initial safe action unsafe under class member");
            break;
    }
    if (!finite()) {
        // F0 is the unit ball: a ball of radius b is safe under every member.
        if (safe_set_kind == SafeSetKind::Ball && safe_ball_radius > offset_b + 1e-12)
            throw std::invalid_argument("initial safe ball must have radius <= b");
        if (safe_set_kind == SafeSetKind::Ball && kind == ConstraintKind::Polytopic &&
            safe_ball_radius > offset_b + 1e-12)
            throw std::invalid_argument("initial safe ball must have radius <= b");
    }
}

namespace {

Eigen::VectorXd pattern_vector(int dim, int which) {
    // Fixed deterministic patterns; environments do not depend on the seed.
    static const double base[3][6] = {
        {1.00, 0.60, -0.40, 0.20, -0.10, 0.30},
        {-0.30, 1.00, 0.50, -0.20, 0.40, -0.10},
        {0.50, -0.70, 0.80, 0.30, -0.20, 0.10},
    };
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = base[which % 3][i % 6];
    return v;
}

}  // namespace

Environment make_preset(const std::string& name, int dimension) {
    Environment env;
    env.dimension = dimension;
    if (name == "linear_ball") {
        env.kind = ConstraintKind::Linear;
        env.fstar = pattern_vector(dimension, 0);
        env.fstar *= 0.9 / env.fstar.norm();
        env.offset_b = 0.5;
        env.safe_set_kind = SafeSetKind::Ball;
        env.safe_ball_radius = env.offset_b;
        env.adversary.kind = LossKind::Fixed;
        env.adversary.fixed = -pattern_vector(dimension, 1);
        env.adversary.fixed *= 1.0 / env.adversary.fixed.norm();
        env.adversary.bound = 1.0;
    } else if (name == "glm_tanh") {
        env.kind = ConstraintKind::Glm;
        env.fstar = pattern_vector(dimension, 0);
        env.fstar *= 0.9 / env.fstar.norm();
        env.offset_b = 0.5;
        env.link.name = "tanh";
        env.link.clamp_bound = 1.0 + 1.0;  // 1 + D_a
        env.link.calibrate();
        env.safe_set_kind = SafeSetKind::Ball;
        env.safe_ball_radius = env.offset_b;
        env.adversary.kind = LossKind::Fixed;
        env.adversary.fixed = -pattern_vector(dimension, 1);
        env.adversary.fixed *= 1.0 / env.adversary.fixed.norm();
        env.adversary.bound = 1.0;
    } else if (name == "polytopic_m3") {
        env.kind = ConstraintKind::Polytopic;
        env.fstar_rows.resize(3, dimension);
        for (int i = 0; i < 3; ++i) {
            Eigen::VectorXd row = pattern_vector(dimension, i);
            env.fstar_rows.row(i) = row.transpose() * ((0.9 - 0.05 * i) / row.norm());
        }
        env.offset_b = 0.5;
        env.safe_set_kind = SafeSetKind::Ball;
        env.safe_ball_radius = env.offset_b;
        env.adversary.kind = LossKind::Fixed;
        env.adversary.fixed = -pattern_vector(dimension, 1);
        env.adversary.fixed *= 1.0 / env.adversary.fixed.norm();
        env.adversary.bound = 1.0;
    } else if (name == "stuck_origin") {
        env.kind = ConstraintKind::Linear;
        env.fstar = pattern_vector(dimension, 0);
        env.fstar *= 0.67 / env.fstar.norm();
        env.offset_b = 0.0;  // constraint f*.a <= 0: only the origin is provably safe
        env.safe_set_kind = SafeSetKind::Origin;
        env.safe_ball_radius = 0.0;
        env.adversary.kind = LossKind::Fixed;
        env.adversary.fixed = -pattern_vector(dimension, 1);
        env.adversary.fixed *= 1.0 / env.adversary.fixed.norm();
        env.adversary.bound = 1.0;
    } else if (name == "finite_k10") {
        env.kind = ConstraintKind::FiniteTable;
        env.num_actions = 10;
        env.dimension = 0;
        env.table.resize(5, 10);
        env.table << -0.10, -0.30, 0.50, 0.20, -0.60, 0.40, -0.20, 0.70, 0.10, -0.50,
                     -0.25, -0.35, -0.40, 0.30, -0.55, 0.45, 0.25, 0.65, -0.15, -0.45,
                     -0.40, -0.20, -0.30, -0.10, -0.50, 0.55, 0.30, 0.60, -0.25, 0.35,
                     -0.55, -0.25, 0.45, -0.20, -0.45, 0.50, -0.35, 0.75, 0.05, 0.40,
                     -0.70, -0.40, -0.35, 0.25, -0.65, 0.35, 0.15, 0.55, 0.20, -0.30;
        env.true_function = 2;
        env.safe_set_kind = SafeSetKind::FiniteList;
        env.safe_indices = {0};
        env.adversary.kind = LossKind::Fixed;
        env.adversary.finite_actions = true;
        env.adversary.fixed.resize(10);
        env.adversary.fixed << 0.55, 0.45, 0.35, 0.50, 0.60, 0.05, 0.20, 0.00, 0.40, 0.15;
        env.adversary.bound = 1.0;
        env.offset_b = 0.0;  // offsets live inside the table for finite classes
    } else {
        throw std::invalid_argument("unknown environment preset: " + name);
    }
    env.validate();
    return env;
}

double finite_separation(const Environment& env) {
    if (!env.finite()) throw std::logic_error("finite_separation needs a finite environment");
    const int F = static_cast<int>(env.table.rows());
    double delta0 = std::numeric_limits<double>::infinity();
    for (int f = 0; f < F; ++f) {
        for (int g = f + 1; g < F; ++g) {
            double best = 0.0;
            for (int a : env.safe_indices)
                best = std::max(best, std::abs(env.table(f, a) - env.table(g, a)));
            delta0 = std::min(delta0, best);
        }
    }
    return delta0;
}

}  // namespace socl
