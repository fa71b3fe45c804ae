#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "socl/geometry.hpp"
#include "socl/learning.hpp"
#include "socl/rng.hpp"

using namespace socl;

namespace {

std::vector<char> all_alive(int n) { return std::vector<char>(n, 1); }

bool always_optimistic(const Eigen::VectorXd&) { return true; }

}  // namespace

TEST_CASE("ogd: zero gradient keeps the anchor fixed after the first projection") {
    Eigen::MatrixXd lattice = build_ball_lattice(2, 9, 1.0);
    OgdOracle ogd(lattice, 0.1, 1.0);
    auto rec1 = ogd.recommend(all_alive(lattice.cols()), always_optimistic);
    CHECK(rec1.anchor.norm() < 1e-10);  // starts at the origin
    ogd.update(Eigen::VectorXd::Zero(2));
    auto rec2 = ogd.recommend(all_alive(lattice.cols()), always_optimistic);
    CHECK((rec2.anchor - rec1.anchor).norm() < 1e-10);
    // point mass on the anchor when it is a pool member
    CHECK(rec2.weights.size() == 1);
    CHECK(rec2.weights[0] == doctest::Approx(1.0));
}

TEST_CASE("ogd: interior step moves exactly by -eta * gradient") {
    Eigen::MatrixXd lattice = build_ball_lattice(2, 33, 1.0);
    const double eta = 0.05;
    OgdOracle ogd(lattice, eta, 1.0);
    (void)ogd.recommend(all_alive(lattice.cols()), always_optimistic);
    Eigen::VectorXd g(2);
    g << 0.6, -0.8;
    ogd.update(g);
    auto rec = ogd.recommend(all_alive(lattice.cols()), always_optimistic);
    CHECK((rec.anchor - (-eta * g)).norm() < 1e-8);  // interior of the hull
}

TEST_CASE("ogd: two-round anchors match a hand-rolled recursion") {
    Eigen::MatrixXd lattice = build_ball_lattice(2, 65, 1.0);
    const double eta = 0.03;
    OgdOracle ogd(lattice, eta, 1.0);
    (void)ogd.recommend(all_alive(lattice.cols()), always_optimistic);
    Eigen::VectorXd g1(2), g2(2);
    g1 << 0.5, 0.1;
    g2 << -0.2, 0.7;
    ogd.update(g1);
    auto rec1 = ogd.recommend(all_alive(lattice.cols()), always_optimistic);
    ogd.update(g2);
    auto rec2 = ogd.recommend(all_alive(lattice.cols()), always_optimistic);
    // interior steps: anchor_t = anchor_{t-1} - eta g_t
    Eigen::VectorXd expect1 = -eta * g1;
    Eigen::VectorXd expect2 = expect1 - eta * g2;
    CHECK((rec1.anchor - expect1).norm() < 1e-10);
    CHECK((rec2.anchor - expect2).norm() < 1e-10);
}

TEST_CASE("ogd: distribution expectation equals the projected anchor") {
    Rng rng(77);
    Eigen::MatrixXd lattice = build_ball_lattice(2, 17, 1.0);
    OgdOracle ogd(lattice, 0.4, 1.0);
    for (int round = 0; round < 20; ++round) {
        Eigen::VectorXd g(2);
        g << 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0;
        g *= 0.9 / std::max(1.0, g.norm());
        ogd.update(g);
        auto rec = ogd.recommend(all_alive(lattice.cols()), always_optimistic);
        Eigen::VectorXd mean = rec.support * rec.weights;
        CHECK((mean - rec.anchor).norm() <= 1e-9);
        CHECK(rec.support.cols() <= 3);  // d + 1
        CHECK(rec.weights.minCoeff() >= -1e-12);
    }
}

TEST_CASE("ogd: support members always come from the alive pool") {
    Eigen::MatrixXd lattice = build_ball_lattice(2, 9, 1.0);
    std::vector<char> alive(lattice.cols(), 0);
    // only the right half plane stays alive
    for (int j = 0; j < lattice.cols(); ++j) alive[j] = lattice(0, j) >= -1e-12 ? 1 : 0;
    auto right_half = [](const Eigen::VectorXd& p) { return p[0] >= -1e-12; };
    OgdOracle ogd(lattice, 0.3, 1.0);
    Eigen::VectorXd g(2);
    g << 1.0, 0.0;  // pushes toward the dead half
    for (int round = 0; round < 10; ++round) {
        auto rec = ogd.recommend(alive, right_half);
        for (int k = 0; k < rec.support.cols(); ++k)
            CHECK(rec.support(0, k) >= -1e-9);
        ogd.update(g);
    }
}

TEST_CASE("ogd: empty pool reports a configuration error") {
    Eigen::MatrixXd lattice = build_ball_lattice(2, 5, 1.0);
    OgdOracle ogd(lattice, 0.1, 1.0);
    std::vector<char> none(lattice.cols(), 0);
    CHECK_THROWS_AS((void)ogd.recommend(none, [](const Eigen::VectorXd&) { return false; }),
                    EmptyCandidatePool);
}

TEST_CASE("ogd: oversized gradients are rejected") {
    Eigen::MatrixXd lattice = build_ball_lattice(2, 5, 1.0);
    OgdOracle ogd(lattice, 0.1, 1.0);
    Eigen::VectorXd g(2);
    g << 3.0, 0.0;
    CHECK_THROWS_AS(ogd.update(g), GradientTooLarge);
}

TEST_CASE("ogd regret against the pool comparator on adversarial linear losses") {
    // fixed announced sets; bound 4 D_f D_a sqrt(T log(2/delta)) from the
    // oracle analysis, checked across seeds
    const long T = 2000;
    const double delta = 0.05;
    const double Df = 1.0, Da = 1.0;
    const double bound = 4.0 * Df * Da * std::sqrt(static_cast<double>(T) * std::log(2.0 / delta));
    Eigen::MatrixXd pool = build_ball_lattice(2, 9, 1.0);
    const auto alive = all_alive(pool.cols());

    int failures = 0;
    int concentration_failures = 0;
    const double hoeffding =
        std::sqrt(2.0 * static_cast<double>(T) * Df * Df * Da * Da * std::log(2.0 / delta));
    const int seeds = 40;
    for (int seed = 0; seed < seeds; ++seed) {
        Rng rng(9000 + seed);
        OgdOracle ogd(pool, ogd_step_size(Da, Df, T), Df);
        Eigen::VectorXd cumulative = Eigen::VectorXd::Zero(2);
        double learner = 0.0;
        double anchor_loss = 0.0;
        for (long t = 0; t < T; ++t) {
            auto rec = ogd.recommend(alive, always_optimistic);
            const std::size_t pick = rng.sample_index(rec.weights);
            const Eigen::VectorXd played = rec.support.col(static_cast<int>(pick));
            Eigen::VectorXd g(2);
            g << 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0;
            g *= Df / std::max(1.0, g.norm());
            learner += g.dot(played);
            anchor_loss += g.dot(rec.anchor);
            cumulative += g;
            ogd.update(g);
        }
        double comparator = std::numeric_limits<double>::infinity();
        for (int j = 0; j < pool.cols(); ++j)
            comparator = std::min(comparator, cumulative.dot(pool.col(j)));
        if (learner - comparator > bound) ++failures;
        // sampling concentration: realized play vs the anchor expectation
        if (std::abs(learner - anchor_loss) > hoeffding) ++concentration_failures;
    }
    CHECK(failures <= seeds / 20);                // >= 95% of seeds
    CHECK(concentration_failures <= seeds / 20);  // Hoeffding term
}

TEST_CASE("hedge: uniform weights over all-awake arms give the uniform distribution") {
    SleepingHedge hedge(4, 0.5);
    auto p = hedge.recommend(all_alive(4));
    for (int i = 0; i < 4; ++i) CHECK(p[i] == doctest::Approx(0.25));
}

TEST_CASE("hedge: a single awake arm takes all the mass") {
    SleepingHedge hedge(3, 0.5);
    std::vector<char> awake{0, 1, 0};
    auto p = hedge.recommend(awake);
    CHECK(p[1] == doctest::Approx(1.0));
    CHECK(p[0] == 0.0);
    CHECK(p[2] == 0.0);
}

TEST_CASE("hedge: no awake arm is an error") {
    SleepingHedge hedge(3, 0.5);
    std::vector<char> awake{0, 0, 0};
    CHECK_THROWS_AS((void)hedge.recommend(awake), NoAwakeAction);
}

TEST_CASE("hedge: two crafted rounds match hand-computed specialists arithmetic") {
    const double eta = 0.5;
    SleepingHedge hedge(3, eta);
    Eigen::VectorXd loss1(3), loss2(3);
    loss1 << 0.2, 0.8, 0.5;
    loss2 << 0.9, 0.1, 0.4;
    std::vector<char> awake1{1, 1, 1};
    std::vector<char> awake2{1, 1, 0};  // arm 2 sleeps in round 2

    auto p1 = hedge.recommend(awake1);
    hedge.update(loss1, awake1, p1);
    // hand-rolled: w_i = -eta * loss1_i, shifted by the max
    double w0 = -eta * 0.2, w1 = -eta * 0.8, w2 = -eta * 0.5;
    const double shift1 = std::max({w0, w1, w2});
    w0 -= shift1; w1 -= shift1; w2 -= shift1;

    auto p2 = hedge.recommend(awake2);
    const double e0 = std::exp(w0), e1 = std::exp(w1);
    CHECK(p2[0] == doctest::Approx(e0 / (e0 + e1)).epsilon(1e-12));
    CHECK(p2[1] == doctest::Approx(e1 / (e0 + e1)).epsilon(1e-12));
    CHECK(p2[2] == 0.0);

    hedge.update(loss2, awake2, p2);
    const double expected2 = p2[0] * 0.9 + p2[1] * 0.1;  // asleep arm charged this
    double v0 = w0 - eta * 0.9, v1 = w1 - eta * 0.1, v2 = w2 - eta * expected2;
    const double shift2 = std::max({v0, v1, v2});
    CHECK(hedge.log_weights()[0] == doctest::Approx(v0 - shift2).epsilon(1e-12));
    CHECK(hedge.log_weights()[1] == doctest::Approx(v1 - shift2).epsilon(1e-12));
    CHECK(hedge.log_weights()[2] == doctest::Approx(v2 - shift2).epsilon(1e-12));
}

TEST_CASE("hedge: sleeping charge keeps asleep arms' relative weight unchanged") {
    SleepingHedge hedge(2, 0.7);
    Eigen::VectorXd loss(2);
    loss << 1.0, 0.3;
    std::vector<char> only_first{1, 0};
    auto p = hedge.recommend(only_first);
    const double before_gap = hedge.log_weights()[1] - hedge.log_weights()[0];
    hedge.update(loss, only_first, p);
    // arm 0 was charged its loss 1.0; arm 1 charged the expected loss 1.0 as well
    const double after_gap = hedge.log_weights()[1] - hedge.log_weights()[0];
    CHECK(after_gap == doctest::Approx(before_gap).epsilon(1e-12));
}
