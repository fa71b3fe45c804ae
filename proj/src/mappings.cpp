#include "socl/mappings.hpp"

#include <algorithm>
#include <cmath>

#include "socl/geometry.hpp"

namespace socl {

std::string mapping_name(MappingKind kind) {
    switch (kind) {
        case MappingKind::Scaling: return "scaling";
        case MappingKind::ExploreExploit: return "explore_exploit";
        case MappingKind::Saddle: return "saddle";
        case MappingKind::Exp3Kappa: return "exp3_kappa";
        case MappingKind::Identity: return "identity";
    }
    return "unknown";
}

MappingOutcome scaling_map(const ContinuousVersionSpace& vs, const Eigen::VectorXd& pre_map) {
    MappingOutcome out;
    out.pre_map_action = pre_map;
    out.gamma = vs_gamma_scale(vs, pre_map);
    out.post_map_action = out.gamma * pre_map;
    out.mapping_id = MappingKind::Scaling;
    return out;
}

Eigen::VectorXd explore_exploit_map(const Eigen::VectorXd& p_tilde,
                                    const std::vector<char>& pessimistic_mask,
                                    const FiniteVersionSpace& vs) {
    const int k = static_cast<int>(p_tilde.size());
    std::vector<int> pess;
    for (int a = 0; a < k; ++a)
        if (pessimistic_mask[a]) pess.push_back(a);
    if (pess.empty()) throw EmptyPessimisticSet();

    Eigen::VectorXd p = Eigen::VectorXd::Zero(k);
    if (vs.survivors().size() > 1) {
        p[vs.width_argmax(pess)] = 1.0;
        return p;
    }
    // Identified class: redistribute the recommendation's out-of-set mass
    // uniformly over P_t.
    double outside = 0.0;
    for (int a = 0; a < k; ++a)
        if (!pessimistic_mask[a]) outside += p_tilde[a];
    const double spread = outside / static_cast<double>(pess.size());
    for (int a : pess) p[a] = p_tilde[a] + spread;
    return p;
}

namespace {

// Exact minimizer of sum_a max(p[a] - p_tilde[a], 0) - kappa <p, w> over the
// simplex restricted to `allowed`. Mass below p_tilde is free, mass above
// costs 1 per unit; fill one unit of mass greedily by marginal value.
Eigen::VectorXd segment_fill(double kappa, const Eigen::VectorXd& p_tilde,
                             const std::vector<int>& allowed, const Eigen::VectorXd& w) {
    struct Segment {
        double value;
        double capacity;
        int action;
    };
    std::vector<Segment> segments;
    segments.reserve(2 * allowed.size());
    for (int a : allowed) {
        if (p_tilde[a] > 0.0) segments.push_back({kappa * w[a], p_tilde[a], a});
        segments.push_back({kappa * w[a] - 1.0,
                            std::numeric_limits<double>::infinity(), a});
    }
    std::stable_sort(segments.begin(), segments.end(),
                     [](const Segment& x, const Segment& y) {
                         if (x.value != y.value) return x.value > y.value;
                         return x.action < y.action;
                     });
    Eigen::VectorXd p = Eigen::VectorXd::Zero(p_tilde.size());
    double budget = 1.0;
    for (const auto& seg : segments) {
        if (budget <= 0.0) break;
        const double take = std::min(budget, seg.capacity);
        p[seg.action] += take;
        budget -= take;
    }
    return p;
}

double pair_objective(double kappa, const Eigen::VectorXd& p, const Eigen::VectorXd& p_tilde,
                      const Eigen::VectorXd& w) {
    double obj = 0.0;
    for (int a = 0; a < p.size(); ++a) obj += std::max(p[a] - p_tilde[a], 0.0);
    obj -= kappa * p.dot(w);
    return obj;
}

Eigen::VectorXd project_to_restricted_simplex(const Eigen::VectorXd& v,
                                              const std::vector<int>& allowed) {
    Eigen::VectorXd packed(static_cast<int>(allowed.size()));
    for (int i = 0; i < packed.size(); ++i) packed[i] = v[allowed[i]];
    Eigen::VectorXd proj = project_to_simplex(packed);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
    for (int i = 0; i < packed.size(); ++i) out[allowed[i]] = proj[i];
    return out;
}

}  // namespace

double saddle_objective(double kappa, const Eigen::VectorXd& p,
                        const Eigen::VectorXd& p_tilde,
                        const std::vector<char>& pessimistic_mask,
                        const FiniteVersionSpace& vs) {
    (void)pessimistic_mask;
    const auto& ids = vs.survivors();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i; j < ids.size(); ++j) {
            Eigen::VectorXd w =
                (vs.table().row(ids[i]) - vs.table().row(ids[j])).cwiseAbs().transpose();
            best = std::min(best, pair_objective(kappa, p, p_tilde, w));
        }
    }
    return best;
}

Eigen::VectorXd saddle_map_finite(double kappa, const Eigen::VectorXd& p_tilde,
                                  const std::vector<char>& pessimistic_mask,
                                  const FiniteVersionSpace& vs,
                                  double tolerance, int max_iterations) {
    const int k = static_cast<int>(p_tilde.size());
    std::vector<int> allowed;
    for (int a = 0; a < k; ++a)
        if (pessimistic_mask[a]) allowed.push_back(a);
    if (allowed.empty()) throw EmptyPessimisticSet();

    const auto& ids = vs.survivors();
    Eigen::VectorXd best_p;
    double best_obj = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i; j < ids.size(); ++j) {
            Eigen::VectorXd w =
                (vs.table().row(ids[i]) - vs.table().row(ids[j])).cwiseAbs().transpose();

            // Projected subgradient from the restricted projection of p_tilde,
            // tracking the best iterate.
            Eigen::VectorXd p = project_to_restricted_simplex(p_tilde, allowed);
            Eigen::VectorXd pair_best_p = p;
            double pair_best = pair_objective(kappa, p, p_tilde, w);
            for (int it = 1; it <= max_iterations; ++it) {
                Eigen::VectorXd g = Eigen::VectorXd::Zero(k);
                for (int a : allowed)
                    g[a] = (p[a] > p_tilde[a] ? 1.0 : 0.0) - kappa * w[a];
                const double step =
                    0.5 / (std::max(1.0, kappa * w.maxCoeff()) * std::sqrt(static_cast<double>(it)));
                p = project_to_restricted_simplex(p - step * g, allowed);
                const double obj = pair_objective(kappa, p, p_tilde, w);
                if (obj < pair_best - 1e-15) {
                    pair_best = obj;
                    pair_best_p = p;
                }
            }
            // Exact refinement: the inner problem is a continuous knapsack.
            Eigen::VectorXd exact = segment_fill(kappa, p_tilde, allowed, w);
            const double exact_obj = pair_objective(kappa, exact, p_tilde, w);
            if (exact_obj < pair_best - tolerance * 1e-3) {
                pair_best = exact_obj;
                pair_best_p = exact;
            }
            if (pair_best < best_obj) {
                best_obj = pair_best;
                best_p = pair_best_p;
            }
        }
    }
    return best_p;
}

Exp3Selector::Exp3Selector(int num_arms, long horizon)
    : log_weights_(Eigen::VectorXd::Zero(num_arms)) {
    const double k = static_cast<double>(std::max(num_arms, 2));
    const double t = static_cast<double>(std::max<long>(horizon, 1));
    exploration_ = std::min(1.0, std::sqrt(k * std::log(k) / t));
    eta_ = exploration_ / k;
}

Eigen::VectorXd Exp3Selector::probabilities() const {
    const int k = static_cast<int>(log_weights_.size());
    Eigen::VectorXd w = (log_weights_.array() - log_weights_.maxCoeff()).exp();
    Eigen::VectorXd p = (1.0 - exploration_) * w / w.sum() +
                        exploration_ / static_cast<double>(k) * Eigen::VectorXd::Ones(k);
    return p;
}

int Exp3Selector::sample(Rng& rng) const {
    return static_cast<int>(rng.sample_index(probabilities()));
}

void Exp3Selector::update(int arm, double loss01) {
    const double p_arm = probabilities()[arm];
    const double estimate = std::clamp(loss01, 0.0, 1.0) / std::max(p_arm, 1e-12);
    log_weights_[arm] -= eta_ * estimate;
}

std::vector<double> kappa_grid(long horizon) {
    const int top = std::max(0, static_cast<int>(std::floor(
        std::log2(std::sqrt(static_cast<double>(std::max<long>(horizon, 1)))))));
    std::vector<double> grid;
    for (int i = 0; i <= top; ++i) grid.push_back(std::pow(2.0, i));
    return grid;
}

}  // namespace socl
