#include "socl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace socl {

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0;
    double tau = 0.0;
    for (int i = 0; i < n; ++i) {
        css += u[i];
        const double candidate = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - candidate > 0.0) tau = candidate;
    }
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = std::max(v[i] - tau, 0.0);
    return w;
}

namespace {

// Affine minimizer of ||P u - x|| subject to sum(u) = 1, u unconstrained in sign.
// P holds the current corral columns. Solved through the KKT system; a complete
// orthogonal decomposition keeps degenerate corrals from blowing up.
Eigen::VectorXd affine_minimizer(const Eigen::MatrixXd& P, const Eigen::VectorXd& x) {
    const int m = static_cast<int>(P.cols());
    Eigen::MatrixXd kkt(m + 1, m + 1);
    kkt.topLeftCorner(m, m) = P.transpose() * P;
    kkt.topRightCorner(m, 1).setOnes();
    kkt.bottomLeftCorner(1, m).setOnes();
    kkt(m, m) = 0.0;
    Eigen::VectorXd rhs(m + 1);
    rhs.head(m) = P.transpose() * x;
    rhs[m] = 1.0;
    Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    return sol.head(m);
}

}  // namespace

HullProjectionResult project_to_hull(const Eigen::MatrixXd& points,
                                     const Eigen::VectorXd& query,
                                     double tolerance,
                                     int max_iterations,
                                     const std::vector<int>* active) {
    const int n = static_cast<int>(points.cols());
    const int d = static_cast<int>(points.rows());
    std::vector<int> all;
    if (active == nullptr) {
        all.resize(n);
        std::iota(all.begin(), all.end(), 0);
        active = &all;
    }
    if (active->empty()) throw std::invalid_argument("project_to_hull: empty point set");

    HullProjectionResult res;

    // Start from the column closest to the query.
    int start = (*active)[0];
    double best = (points.col(start) - query).squaredNorm();
    for (int j : *active) {
        const double dist = (points.col(j) - query).squaredNorm();
        if (dist < best) {
            best = dist;
            start = j;
        }
    }
    std::vector<int> support{start};
    Eigen::VectorXd weights = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd y = points.col(start);

    const double scale = std::max(1.0, query.norm() + points.cwiseAbs().maxCoeff());
    int iter = 0;
    while (iter < max_iterations) {
        ++iter;
        const Eigen::VectorXd grad = y - query;
        // Linear minimization over the active atoms.
        int best_j = (*active)[0];
        double best_val = grad.dot(points.col(best_j));
        for (int j : *active) {
            const double val = grad.dot(points.col(j));
            if (val < best_val) {
                best_val = val;
                best_j = j;
            }
        }
        const double gap = grad.dot(y) - best_val;
        if (gap <= tolerance * scale) {
            res.converged = true;
            break;
        }
        if (std::find(support.begin(), support.end(), best_j) == support.end()) {
            support.push_back(best_j);
            Eigen::VectorXd grown(weights.size() + 1);
            grown.head(weights.size()) = weights;
            grown[weights.size()] = 0.0;
            weights = grown;
        }

        // Minor cycles: move to the affine minimizer, dropping atoms whose
        // weight would cross zero, until the minimizer is a proper convex
        // combination of the corral.
        for (int minor = 0; minor < 4 * (d + 2); ++minor) {
            const int m = static_cast<int>(support.size());
            Eigen::MatrixXd P(d, m);
            for (int j = 0; j < m; ++j) P.col(j) = points.col(support[j]);
            Eigen::VectorXd u = affine_minimizer(P, query);
            if (u.minCoeff() > -1e-14) {
                weights = u.cwiseMax(0.0);
                weights /= weights.sum();
                y = P * weights;
                break;
            }
            double theta = 1.0;
            for (int j = 0; j < m; ++j) {
                if (u[j] < weights[j]) {
                    const double step = weights[j] / (weights[j] - u[j]);
                    theta = std::min(theta, step);
                }
            }
            Eigen::VectorXd blended = (1.0 - theta) * weights + theta * u;
            // Drop every atom whose blended weight hit (numerical) zero.
            std::vector<int> kept_support;
            std::vector<double> kept_weights;
            for (int j = 0; j < m; ++j) {
                if (blended[j] > 1e-13) {
                    kept_support.push_back(support[j]);
                    kept_weights.push_back(blended[j]);
                }
            }
            if (kept_support.empty()) {
                // All mass collapsed; keep the single largest coordinate.
                int arg = 0;
                blended.maxCoeff(&arg);
                kept_support.push_back(support[arg]);
                kept_weights.push_back(1.0);
            }
            support = std::move(kept_support);
            weights = Eigen::Map<Eigen::VectorXd>(kept_weights.data(),
                                                  static_cast<int>(kept_weights.size()));
            weights /= weights.sum();
            Eigen::MatrixXd Pk(d, static_cast<int>(support.size()));
            for (int j = 0; j < static_cast<int>(support.size()); ++j)
                Pk.col(j) = points.col(support[j]);
            y = Pk * weights;
        }
    }

    res.iterations = iter;
    res.point = y;
    res.weights = weights;
    res.support = support;
    if (!res.converged && iter >= max_iterations) res.converged = false;
    if (static_cast<int>(res.support.size()) > d + 1)
        caratheodory_reduce(points, res.weights, res.support);
    return res;
}

void caratheodory_reduce(const Eigen::MatrixXd& points,
                         Eigen::VectorXd& weights,
                         std::vector<int>& support) {
    const int d = static_cast<int>(points.rows());
    while (static_cast<int>(support.size()) > d + 1) {
        const int m = static_cast<int>(support.size());
        // Affine dependence: find v != 0 with sum(v) = 0 and P v = 0.
        Eigen::MatrixXd A(d + 1, m);
        for (int j = 0; j < m; ++j) {
            A.block(0, j, d, 1) = points.col(support[j]);
            A(d, j) = 1.0;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        Eigen::MatrixXd kernel = lu.kernel();
        if (kernel.cols() == 0 || kernel.col(0).cwiseAbs().maxCoeff() < 1e-14) break;
        Eigen::VectorXd v = kernel.col(0);
        // Move along +v until the first weight reaches zero.
        if (v.maxCoeff() <= 0.0) v = -v;
        double t = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            if (v[j] > 1e-15) t = std::min(t, weights[j] / v[j]);
        }
        if (!std::isfinite(t)) break;
        Eigen::VectorXd updated = weights - t * v;
        std::vector<int> kept_support;
        std::vector<double> kept_weights;
        bool dropped = false;
        for (int j = 0; j < m; ++j) {
            double w = updated[j];
            if (w <= 1e-13 && !dropped && v[j] > 1e-15) {
                dropped = true;
                continue;
            }
            kept_support.push_back(support[j]);
            kept_weights.push_back(std::max(w, 0.0));
        }
        support = std::move(kept_support);
        weights = Eigen::Map<Eigen::VectorXd>(kept_weights.data(),
                                              static_cast<int>(kept_weights.size()));
        const double total = weights.sum();
        if (total > 0.0) weights /= total;
    }
}

Eigen::MatrixXd build_ball_lattice(int dim, int resolution, double bound) {
    if (resolution < 2) throw std::invalid_argument("lattice resolution must be >= 2");
    if (dim < 1) throw std::invalid_argument("lattice dimension must be >= 1");
    std::vector<Eigen::VectorXd> kept;
    Eigen::VectorXi idx = Eigen::VectorXi::Zero(dim);
    const double step = 2.0 * bound / static_cast<double>(resolution - 1);
    bool has_origin = false;
    while (true) {
        Eigen::VectorXd pt(dim);
        for (int k = 0; k < dim; ++k) pt[k] = -bound + step * idx[k];
        if (pt.norm() <= bound + 1e-12) {
            kept.push_back(pt);
            if (pt.norm() < 1e-15) has_origin = true;
        }
        int k = 0;
        while (k < dim) {
            if (++idx[k] < resolution) break;
            idx[k] = 0;
            ++k;
        }
        if (k == dim) break;
    }
    if (!has_origin) kept.push_back(Eigen::VectorXd::Zero(dim));
    Eigen::MatrixXd out(dim, static_cast<int>(kept.size()));
    for (int j = 0; j < static_cast<int>(kept.size()); ++j) out.col(j) = kept[j];
    return out;
}

Eigen::VectorXd project_ball_halfspaces(const Eigen::VectorXd& query,
                                        double radius,
                                        const Eigen::MatrixXd& G,
                                        const Eigen::VectorXd& c,
                                        double tolerance,
                                        int max_iterations) {
    const int sets = 1 + static_cast<int>(G.rows());
    Eigen::VectorXd x = query;
    std::vector<Eigen::VectorXd> corrections(
        sets, Eigen::VectorXd::Zero(query.size()));
    for (int iter = 0; iter < max_iterations; ++iter) {
        Eigen::VectorXd previous = x;
        for (int s = 0; s < sets; ++s) {
            Eigen::VectorXd z = x + corrections[s];
            Eigen::VectorXd projected;
            if (s == 0) {
                const double nrm = z.norm();
                projected = (nrm <= radius) ? z : Eigen::VectorXd(z * (radius / nrm));
            } else {
                const int i = s - 1;
                const double g2 = G.row(i).squaredNorm();
                const double viol = G.row(i).dot(z) - c[i];
                projected = (viol <= 0.0 || g2 == 0.0)
                                ? z
                                : Eigen::VectorXd(z - (viol / g2) * G.row(i).transpose());
            }
            corrections[s] = z - projected;
            x = projected;
        }
        if ((x - previous).norm() <= tolerance) break;
    }
    return x;
}

}  // namespace socl
