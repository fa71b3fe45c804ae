#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "socl/rng.hpp"
#include "socl/version_space.hpp"

namespace socl {

struct EmptyPessimisticSet : std::logic_error {
    EmptyPessimisticSet()
        : std::logic_error("pessimistic set is empty; A0 must always be contained") {}
};

enum class MappingKind { Scaling, ExploreExploit, Saddle, Exp3Kappa, Identity };

std::string mapping_name(MappingKind kind);

struct MappingOutcome {
    Eigen::VectorXd pre_map_action;
    Eigen::VectorXd post_map_action;
    double gamma = 1.0;
    MappingKind mapping_id = MappingKind::Scaling;
};

// Scale the sampled optimistic action toward the origin until it enters the
// pessimistic set; exact for linear and pre-link GLM constraints.
MappingOutcome scaling_map(const ContinuousVersionSpace& vs, const Eigen::VectorXd& pre_map);

// Finite explore-then-exploit mapping: while more than one function survives,
// play the width-maximizing pessimistic action; once the class is identified,
// move the recommendation's out-of-set mass uniformly onto P_t.
Eigen::VectorXd explore_exploit_map(const Eigen::VectorXd& p_tilde,
                                    const std::vector<char>& pessimistic_mask,
                                    const FiniteVersionSpace& vs);

// Finite worst-case-optimal mapping for a given kappa: minimizes
//   sup_l <l, p - p_tilde> - kappa * sum_a p[a] |g(a) - g'(a)|
// over p in Simplex(P_t) and survivor pairs (g, g'). The inner sup is
// sum_a max(p[a] - p_tilde[a], 0); the outer problem is solved by projected
// subgradient refined with an exact segment-fill solve of the same LP.
Eigen::VectorXd saddle_map_finite(double kappa, const Eigen::VectorXd& p_tilde,
                                  const std::vector<char>& pessimistic_mask,
                                  const FiniteVersionSpace& vs,
                                  double tolerance = 1e-6, int max_iterations = 2000);

// Objective value of the saddle problem at p (minimized over survivor pairs).
double saddle_objective(double kappa, const Eigen::VectorXd& p,
                        const Eigen::VectorXd& p_tilde,
                        const std::vector<char>& pessimistic_mask,
                        const FiniteVersionSpace& vs);

// EXP3 over a finite set of arms with losses in [0, 1].
class Exp3Selector {
public:
    Exp3Selector(int num_arms, long horizon);

    Eigen::VectorXd probabilities() const;
    int sample(Rng& rng) const;
    void update(int arm, double loss01);

    double exploration() const { return exploration_; }
    double eta() const { return eta_; }

private:
    Eigen::VectorXd log_weights_;
    double exploration_;
    double eta_;
};

// Candidate kappa grid {2^i} for i = 0 .. log2(sqrt(T)).
std::vector<double> kappa_grid(long horizon);

}  // namespace socl
