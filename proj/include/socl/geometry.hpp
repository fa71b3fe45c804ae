#pragma once

#include <Eigen/Dense>
#include <vector>

namespace socl {

// Euclidean projection onto the probability simplex {w >= 0, sum w = 1}.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

struct HullProjectionResult {
    Eigen::VectorXd point;        // projection of the query onto Conv(columns)
    Eigen::VectorXd weights;      // convex weights over the support columns
    std::vector<int> support;     // column indices with positive weight
    int iterations = 0;
    bool converged = false;
};

// Projects `query` onto the convex hull of the columns of `points` with a
// min-norm-point active-set scheme (Wolfe). The returned support is affinely
// independent, so it has at most d+1 members and the weights are already a
// Caratheodory decomposition of the projected point. When `active` is given,
// only those columns participate; support indices always refer to columns of
// `points`.
HullProjectionResult project_to_hull(const Eigen::MatrixXd& points,
                                     const Eigen::VectorXd& query,
                                     double tolerance = 1e-9,
                                     int max_iterations = 10000,
                                     const std::vector<int>* active = nullptr);

// Reduces a convex combination to at most d+1 atoms by pivoting on the kernel
// of the affine-dependence system. Preserves the represented point exactly.
void caratheodory_reduce(const Eigen::MatrixXd& points,
                         Eigen::VectorXd& weights,
                         std::vector<int>& support);

// Axis-aligned grid over [-bound, bound]^d intersected with the Euclidean ball
// of the same radius; `resolution` points per axis (>= 2). The origin is always
// included. Columns are lattice points.
Eigen::MatrixXd build_ball_lattice(int dim, int resolution, double bound);

// Dykstra's alternating projection onto {||a|| <= radius} intersected with the
// halfspaces rows(G) * a <= c. Returns the projection of `query`.
Eigen::VectorXd project_ball_halfspaces(const Eigen::VectorXd& query,
                                        double radius,
                                        const Eigen::MatrixXd& G,
                                        const Eigen::VectorXd& c,
                                        double tolerance = 1e-12,
                                        int max_iterations = 5000);

}  // namespace socl
