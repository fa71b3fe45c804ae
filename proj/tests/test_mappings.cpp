#include <doctest.h>

#include <Eigen/Dense>

#include "socl/mappings.hpp"
#include "socl/rng.hpp"

using namespace socl;

namespace {

FiniteVersionSpace make_finite_vs(const Eigen::MatrixXd& table,
                                  const Eigen::VectorXd& dev, double radius) {
    std::vector<int> all;
    for (int f = 0; f < table.rows(); ++f) all.push_back(f);
    return FiniteVersionSpace(table, all, dev, radius);
}

}  // namespace

TEST_CASE("scaling map: singleton-width pessimistic ray is the identity") {
    Eigen::VectorXd center(2);
    center << -0.5, 0.0;
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(2, 2) * 1e8;
    ContinuousVersionSpace vs = EllipsoidVersionSpace(center, V, 1e-6, 0.5);
    Eigen::VectorXd a(2);
    a << 0.6, 0.2;
    auto out = scaling_map(vs, a);
    CHECK(out.gamma == doctest::Approx(1.0));
    CHECK((out.post_map_action - a).norm() < 1e-12);
}

TEST_CASE("scaling map halves the action when the pre-link max is 2b") {
    Eigen::VectorXd center(2);
    center << 0.75, 0.0;
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(2, 2) * 16.0;
    // raw_hi(a) = center.a + sqrt(beta) ||a||_{V^-1}; craft it to equal 2b = 1
    // a = (1, 0): center.a = 0.75, sqrt(beta)/4 = 0.25 -> beta = 1
    ContinuousVersionSpace vs = EllipsoidVersionSpace(center, V, 1.0, 0.5);
    Eigen::VectorXd a(2);
    a << 1.0, 0.0;
    auto out = scaling_map(vs, a);
    CHECK(out.gamma == doctest::Approx(0.5).epsilon(1e-12));
    CHECK((out.post_map_action - 0.5 * a).norm() < 1e-12);
    CHECK(vs_membership(vs, out.post_map_action) == SetMembership::Pessimistic);
    // bisection confirms maximality
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (vs_membership(vs, mid * a) == SetMembership::Pessimistic) lo = mid;
        else hi = mid;
    }
    CHECK(out.gamma == doctest::Approx(lo).epsilon(1e-9));
}

TEST_CASE("scaling map preserves the action direction exactly") {
    Rng rng(3);
    Eigen::VectorXd center(2);
    center << 0.4, 0.3;
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(2, 2) * 2.0;
    ContinuousVersionSpace vs = EllipsoidVersionSpace(center, V, 1.0, 0.5);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::VectorXd a(2);
        a << 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0;
        if (a.norm() > 1.0) a.normalize();
        if (vs_f_min(vs, a) > 0.0) continue;
        auto out = scaling_map(vs, a);
        CHECK((out.post_map_action - out.gamma * a).norm() == 0.0);
        CHECK(out.gamma >= 0.0);
        CHECK(out.gamma <= 1.0);
    }
}

TEST_CASE("explore-exploit: identified class passes the recommendation through") {
    Eigen::MatrixXd table(2, 3);
    table << -0.5, 0.3, -0.2,
             -0.1, 0.4, 0.6;
    Eigen::VectorXd dev(2);
    dev << 0.0, 9.0;  // only function 0 survives
    FiniteVersionSpace vs = make_finite_vs(table, dev, 1.0);
    REQUIRE(vs.survivors().size() == 1);
    std::vector<char> pess{1, 0, 1};  // P_t = {0, 2}
    Eigen::VectorXd p_tilde(3);
    p_tilde << 0.6, 0.0, 0.4;  // already supported in P_t
    auto p = explore_exploit_map(p_tilde, pess, vs);
    CHECK((p - p_tilde).norm() < 1e-15);
}

TEST_CASE("explore-exploit: width-maximizing action gets the point mass") {
    Eigen::MatrixXd table(2, 4);
    table << -0.1, -0.3, -0.2, -0.15,
             -0.1, -0.3, -0.9, -0.15;  // maximal disagreement at index 2
    Eigen::VectorXd dev = Eigen::VectorXd::Zero(2);
    FiniteVersionSpace vs = make_finite_vs(table, dev, 1.0);
    REQUIRE(vs.survivors().size() == 2);
    std::vector<char> pess{1, 1, 1, 1};
    Eigen::VectorXd p_tilde = Eigen::VectorXd::Constant(4, 0.25);
    auto p = explore_exploit_map(p_tilde, pess, vs);
    CHECK(p[2] == doctest::Approx(1.0));
}

TEST_CASE("explore-exploit: outside mass is spread uniformly over P_t") {
    Eigen::MatrixXd table(1, 4);
    table << -0.5, -0.1, 0.2, 0.4;
    Eigen::VectorXd dev = Eigen::VectorXd::Zero(1);
    FiniteVersionSpace vs = make_finite_vs(table, dev, 1.0);
    std::vector<char> pess{1, 1, 0, 0};  // |P_t| = 2
    Eigen::VectorXd p_tilde(4);
    p_tilde << 0.3, 0.2, 0.5, 0.0;  // half the mass sits outside
    auto p = explore_exploit_map(p_tilde, pess, vs);
    CHECK(p[0] == doctest::Approx(0.3 + 0.25));
    CHECK(p[1] == doctest::Approx(0.2 + 0.25));
    CHECK(p[2] == 0.0);
    CHECK(p.sum() == doctest::Approx(1.0));
}

TEST_CASE("explore-exploit: empty pessimistic set is an internal failure") {
    Eigen::MatrixXd table(1, 2);
    table << -0.5, -0.1;
    Eigen::VectorXd dev = Eigen::VectorXd::Zero(1);
    FiniteVersionSpace vs = make_finite_vs(table, dev, 1.0);
    std::vector<char> pess{0, 0};
    Eigen::VectorXd p_tilde = Eigen::VectorXd::Constant(2, 0.5);
    CHECK_THROWS_AS((void)explore_exploit_map(p_tilde, pess, vs), EmptyPessimisticSet);
}

TEST_CASE("saddle map: kappa 0 with a feasible recommendation is a no-op") {
    Eigen::MatrixXd table(2, 3);
    table << -0.5, 0.3, -0.2,
             -0.4, 0.2, -0.3;
    Eigen::VectorXd dev = Eigen::VectorXd::Zero(2);
    FiniteVersionSpace vs = make_finite_vs(table, dev, 1.0);
    std::vector<char> pess{1, 0, 1};
    Eigen::VectorXd p_tilde(3);
    p_tilde << 0.7, 0.0, 0.3;
    auto p = saddle_map_finite(0.0, p_tilde, pess, vs);
    CHECK(saddle_objective(0.0, p, p_tilde, pess, vs) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK((p - p_tilde).norm() < 1e-6);
}

TEST_CASE("saddle map: forced point mass when P_t is a singleton") {
    Eigen::MatrixXd table(1, 2);
    table << -0.5, 0.5;
    Eigen::VectorXd dev = Eigen::VectorXd::Zero(1);
    FiniteVersionSpace vs = make_finite_vs(table, dev, 1.0);
    std::vector<char> pess{1, 0};
    Eigen::VectorXd p_tilde(2);
    p_tilde << 0.0, 1.0;
    for (double kappa : {0.0, 1.0, 8.0}) {
        auto p = saddle_map_finite(kappa, p_tilde, pess, vs);
        CHECK(p[0] == doctest::Approx(1.0));
        CHECK(p[1] == doctest::Approx(0.0));
        CHECK(saddle_objective(kappa, p, p_tilde, pess, vs) == doctest::Approx(1.0));
    }
}

TEST_CASE("saddle map matches a brute-force simplex grid search") {
    Rng rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd table(3, 3);
        for (int f = 0; f < 3; ++f)
            for (int a = 0; a < 3; ++a) table(f, a) = 2.0 * rng.uniform() - 1.0;
        Eigen::VectorXd dev = Eigen::VectorXd::Zero(3);
        FiniteVersionSpace vs = make_finite_vs(table, dev, 10.0);
        std::vector<char> pess{1, 1, 1};
        Eigen::VectorXd p_tilde(3);
        p_tilde << rng.uniform(), rng.uniform(), rng.uniform();
        p_tilde /= p_tilde.sum();
        const double kappa = 2.0 * rng.uniform();

        auto p = saddle_map_finite(kappa, p_tilde, pess, vs);
        const double ours = saddle_objective(kappa, p, p_tilde, pess, vs);

        double grid_best = std::numeric_limits<double>::infinity();
        const int R = 100;  // resolution 1e-2 over the simplex
        for (int i = 0; i <= R; ++i) {
            for (int j = 0; j + i <= R; ++j) {
                Eigen::VectorXd q(3);
                q << static_cast<double>(i) / R, static_cast<double>(j) / R,
                    static_cast<double>(R - i - j) / R;
                grid_best = std::min(grid_best, saddle_objective(kappa, q, p_tilde, pess, vs));
            }
        }
        CHECK(ours <= grid_best + 1e-2);
    }
}

TEST_CASE("exp3: one arm is degenerate") {
    Exp3Selector selector(1, 100);
    Rng rng(1);
    for (int i = 0; i < 5; ++i) CHECK(selector.sample(rng) == 0);
}

TEST_CASE("exp3: weight update matches hand-computed exponential arithmetic") {
    Exp3Selector selector(2, 10000);
    const double gamma = selector.exploration();
    const double eta = selector.eta();
    // both arms start uniform: p = 0.5
    Eigen::VectorXd p0 = selector.probabilities();
    CHECK(p0[0] == doctest::Approx(0.5));
    selector.update(0, 0.8);
    const double estimate = 0.8 / 0.5;
    // log weights: arm0 = -eta * estimate, arm1 = 0
    const double w0 = std::exp(-eta * estimate), w1 = 1.0;
    const double expect0 = (1.0 - gamma) * w0 / (w0 + w1) + gamma / 2.0;
    Eigen::VectorXd p1 = selector.probabilities();
    CHECK(p1[0] == doctest::Approx(expect0).epsilon(1e-12));
}

TEST_CASE("exp3 concentrates on the better arm") {
    const long T = 10000;
    Exp3Selector selector(2, T);
    Rng rng(123);
    long good_pulls = 0;
    for (long t = 0; t < T; ++t) {
        const int arm = selector.sample(rng);
        const double loss = arm == 0 ? 0.0 : 1.0;
        if (arm == 0) ++good_pulls;
        selector.update(arm, loss);
    }
    CHECK(static_cast<double>(good_pulls) / static_cast<double>(T) >= 0.9);
}

TEST_CASE("kappa grid spans powers of two up to sqrt(T)") {
    auto grid = kappa_grid(10000);
    REQUIRE(!grid.empty());
    CHECK(grid.front() == 1.0);
    CHECK(grid.back() <= 100.0 + 1e-9);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] == 2.0 * grid[i - 1]);
}

TEST_CASE("mapping outputs conserve probability mass") {
    Rng rng(29);
    Eigen::MatrixXd table(3, 5);
    for (int f = 0; f < 3; ++f)
        for (int a = 0; a < 5; ++a) table(f, a) = 2.0 * rng.uniform() - 1.0;
    Eigen::VectorXd dev = Eigen::VectorXd::Zero(3);
    FiniteVersionSpace vs = make_finite_vs(table, dev, 10.0);
    std::vector<char> pess{1, 0, 1, 1, 0};
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd p_tilde(5);
        for (int a = 0; a < 5; ++a) p_tilde[a] = rng.uniform();
        p_tilde /= p_tilde.sum();
        auto p1 = explore_exploit_map(p_tilde, pess, vs);
        auto p2 = saddle_map_finite(1.0, p_tilde, pess, vs);
        CHECK(p1.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p2.sum() == doctest::Approx(1.0).epsilon(1e-12));
        for (int a = 0; a < 5; ++a) {
            if (!pess[a]) {
                if (vs.survivors().size() == 1) CHECK(p1[a] == 0.0);
                CHECK(p2[a] == 0.0);
            }
        }
    }
}
