#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>

#include "socl/analysis.hpp"
#include "socl/engine.hpp"
#include "socl/geometry.hpp"
#include "socl/rng.hpp"

using namespace socl;

namespace {

ExperimentConfig linear_config(long T, std::uint64_t seed, int dim = 2) {
    ExperimentConfig cfg;
    cfg.preset = "linear_ball";
    cfg.dimension = dim;
    cfg.horizon = T;
    cfg.delta = 0.05;
    cfg.seed = seed;
    return cfg;
}

Eigen::MatrixXd probe_points(int dim, int count, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd pts(dim, count);
    for (int j = 0; j < count; ++j) {
        Eigen::VectorXd p(dim);
        for (int i = 0; i < dim; ++i) p[i] = 2.0 * rng.uniform() - 1.0;
        if (p.norm() > 1.0) p /= p.norm();
        pts.col(j) = p;
    }
    return pts;
}

}  // namespace

TEST_CASE("stuck preset: pessimistic set is the origin and nothing is learned") {
    ExperimentConfig cfg;
    cfg.preset = "stuck_origin";
    cfg.dimension = 2;
    cfg.horizon = 1000;
    cfg.seed = 3;

    Eigen::MatrixXd probes = probe_points(2, 50, 99);
    std::vector<double> first_widths, last_widths;
    long pessimistic_probes = 0;
    RunOptions opts;
    opts.continuous_probe = [&](long t, const ContinuousVersionSpace& vs, const Environment&) {
        for (int j = 0; j < probes.cols(); ++j) {
            if (t == 1) first_widths.push_back(vs_width(vs, probes.col(j)));
            if (t == 1000) last_widths.push_back(vs_width(vs, probes.col(j)));
            if (probes.col(j).norm() > 1e-9 &&
                vs_membership(vs, probes.col(j)) == SetMembership::Pessimistic)
                ++pessimistic_probes;
        }
    };
    RunResult res = run_safe_learning(cfg, opts);

    for (const auto& rec : res.records) CHECK(rec.action.norm() == 0.0);
    CHECK(pessimistic_probes == 0);  // P_t = {0} on every round
    REQUIRE(first_widths.size() == last_widths.size());
    for (std::size_t j = 0; j < first_widths.size(); ++j)
        CHECK(last_widths[j] == first_widths[j]);  // F_t never shrinks
    CHECK(res.ledger.violations == 0);
}

TEST_CASE("finite path with a singleton class is pure pass-through") {
    Environment env = make_preset("finite_k10", 0);
    Eigen::MatrixXd single = env.table.row(env.true_function);
    Eigen::VectorXd dev = Eigen::VectorXd::Zero(1);
    FiniteVersionSpace vs(single, {0}, dev, 1.0);
    std::vector<char> pess(env.num_actions);
    int safe_count = 0;
    for (int a = 0; a < env.num_actions; ++a) {
        pess[a] = vs.membership(a) == SetMembership::Pessimistic ? 1 : 0;
        const bool truly_safe = env.table(env.true_function, a) <= 0.0;
        CHECK(static_cast<bool>(pess[a]) == truly_safe);  // O_1 = P_1 = true safe set
        safe_count += pess[a];
    }
    CHECK(safe_count == 6);
    Eigen::VectorXd p_tilde = Eigen::VectorXd::Zero(env.num_actions);
    p_tilde[0] = 0.5;
    p_tilde[2] = 0.5;
    Eigen::VectorXd mapped = explore_exploit_map(p_tilde, pess, vs);
    CHECK((mapped - p_tilde).norm() == 0.0);  // gamma-free identity
}

TEST_CASE("baseline comparison: the engine beats pessimistic-greedy on seed 7") {
    ExperimentConfig cfg = linear_config(2000, 7);
    RunOptions opts;
    opts.keep_records = false;
    RunResult engine = run_safe_learning(cfg, opts);
    RunResult greedy = run_pessimistic_greedy(cfg, opts);
    CHECK(engine.ledger.violations == 0);
    CHECK(greedy.ledger.violations == 0);
    CHECK(engine.ledger.regret < greedy.ledger.regret);
}

TEST_CASE("identical config and seed reproduce a bit-identical trace") {
    ExperimentConfig cfg = linear_config(200, 42);
    RunResult a = run_safe_learning(cfg);
    RunResult b = run_safe_learning(cfg);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i)
        CHECK(round_record_to_json(a.records[i]) == round_record_to_json(b.records[i]));
}

TEST_CASE("a0 is contained in the pessimistic set on every round") {
    ExperimentConfig cfg = linear_config(300, 11);
    Eigen::MatrixXd inner = probe_points(2, 30, 123);
    long checked = 0, inside = 0;
    RunOptions opts;
    opts.keep_records = false;
    opts.continuous_probe = [&](long, const ContinuousVersionSpace& vs, const Environment& env) {
        SafeSets sets{&vs, &env};
        for (int j = 0; j < inner.cols(); ++j) {
            Eigen::VectorXd p = inner.col(j);
            if (p.norm() > 0.0) p *= env.safe_ball_radius * 0.999 / std::max(p.norm(), 1e-12);
            ++checked;
            if (sets.pessimistic(p)) ++inside;
        }
    };
    (void)run_safe_learning(cfg, opts);
    CHECK(checked > 0);
    CHECK(inside == checked);
}

TEST_CASE("safety containment on probe actions whenever the truth is in the space") {
    ExperimentConfig cfg = linear_config(400, 17, 2);
    Eigen::MatrixXd probes = probe_points(2, 200, 7);
    long bad = 0;
    RunOptions opts;
    opts.keep_records = false;
    opts.continuous_probe = [&](long, const ContinuousVersionSpace& vs, const Environment& env) {
        const auto& ell = std::get<EllipsoidVersionSpace>(vs);
        if (!ell.contains_parameter(env.fstar)) return;
        SafeSets sets{&vs, &env};
        for (int j = 0; j < probes.cols(); ++j) {
            const Eigen::VectorXd p = probes.col(j);
            const bool truly_safe = env.constraint_eval(p) <= 0.0;
            if (sets.pessimistic(p) && !truly_safe) ++bad;  // P_t subset of safe
            if (truly_safe && !sets.optimistic(p)) ++bad;   // safe subset of O_t
        }
    };
    (void)run_safe_learning(cfg, opts);
    CHECK(bad == 0);
}

TEST_CASE("widths on a probe set never grow (no-context runs)") {
    ExperimentConfig cfg = linear_config(300, 19);
    Eigen::MatrixXd probes = probe_points(2, 40, 55);
    std::vector<double> previous(probes.cols(), std::numeric_limits<double>::infinity());
    long monotonicity_breaks = 0;
    RunOptions opts;
    opts.keep_records = false;
    opts.continuous_probe = [&](long, const ContinuousVersionSpace& vs, const Environment&) {
        for (int j = 0; j < probes.cols(); ++j) {
            const double w = vs_width(vs, probes.col(j));
            if (w > previous[j] + 1e-12) ++monotonicity_breaks;
            previous[j] = w;
        }
    };
    (void)run_safe_learning(cfg, opts);
    CHECK(monotonicity_breaks == 0);
}

TEST_CASE("finite version space is nested: survivors only ever leave") {
    ExperimentConfig cfg;
    cfg.preset = "finite_k10";
    cfg.horizon = 2000;
    cfg.seed = 23;
    std::vector<int> last_survivors;
    bool nested = true;
    bool truth_always_in = true;
    RunOptions opts;
    opts.keep_records = false;
    opts.finite_probe = [&](long, const FiniteVersionSpace& vs) {
        const auto& current = vs.survivors();
        if (!last_survivors.empty()) {
            for (int f : current)
                if (std::find(last_survivors.begin(), last_survivors.end(), f) ==
                    last_survivors.end())
                    nested = false;
        }
        if (std::find(current.begin(), current.end(), 2) == current.end())
            truth_always_in = false;
        last_survivors = current;
    };
    RunResult res = run_safe_learning(cfg, opts);
    CHECK(nested);
    CHECK(truth_always_in);
    CHECK(res.ledger.violations == 0);
    CHECK(last_survivors.size() == 1);  // the class is identified well before T=2000
}

TEST_CASE("hindsight finite: exhaustive argmin over the safe arms") {
    Environment env = make_preset("finite_k10", 0);
    Eigen::VectorXd cum(10);
    cum << 3.0, 1.0, 2.0, 9.0, 9.0, 9.0, 9.0, 9.0, 9.0, 9.0;
    Environment env2 = env;
    env2.table(env.true_function, 1) = 0.2;  // best-loss arm made unsafe
    HindsightResult res = hindsight_best_safe_finite(env2, cum, 3);
    CHECK(res.action_index == 2);
    CHECK(res.raw_value == doctest::Approx(2.0));
}

TEST_CASE("hindsight continuous: matches a dense grid search") {
    Environment env = make_preset("linear_ball", 2);
    env.fstar << 1.0, 0.0;
    env.offset_b = 0.5;
    env.safe_ball_radius = 0.5;
    Eigen::VectorXd L(2);
    L << -1.0, 0.0;
    HindsightResult res = hindsight_best_safe_continuous(env, L, 1);
    CHECK(res.stationarity_verified);
    double best = std::numeric_limits<double>::infinity();
    for (double x = -1.0; x <= 1.0; x += 1e-3) {
        for (double y = -1.0; y <= 1.0; y += 1e-3) {
            if (x * x + y * y > 1.0) continue;
            if (x > 0.5) continue;  // the f* halfspace
            best = std::min(best, L[0] * x + L[1] * y);
        }
    }
    CHECK(res.raw_value == doctest::Approx(best).epsilon(1e-3));
    CHECK(res.raw_value == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("hindsight continuous: unconstrained optimum when the constraint is slack") {
    Environment env = make_preset("linear_ball", 2);
    env.fstar << 0.0, 0.9;
    Eigen::VectorXd L(2);
    L << 5.0, 0.0;
    HindsightResult res = hindsight_best_safe_continuous(env, L, 1);
    CHECK(res.action[0] == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(res.raw_value == doctest::Approx(-5.0).epsilon(1e-5));
}

TEST_CASE("single safe arm: hindsight returns it with its cumulative loss") {
    Environment env = make_preset("finite_k10", 0);
    Environment env2 = env;
    for (int a = 1; a < 10; ++a) env2.table(env.true_function, a) = 0.5;
    Eigen::VectorXd cum = Eigen::VectorXd::Constant(10, 4.0);
    cum[0] = 3.5;
    HindsightResult res = hindsight_best_safe_finite(env2, cum, 8);
    CHECK(res.action_index == 0);
    CHECK(res.raw_value == doctest::Approx(3.5));
}

TEST_CASE("ledger closes the books: regret equals learner minus hindsight") {
    ExperimentConfig cfg = linear_config(250, 29);
    RunResult res = run_safe_learning(cfg);
    CHECK(res.ledger.regret ==
          doctest::Approx(res.ledger.learner_cum_loss - res.ledger.hindsight_safe_opt_loss));
    CHECK(res.ledger.violation_magnitude_sum >= 0.0);
    CHECK(res.ledger.width_sum >= 0.0);
    std::vector<long> recount(res.ledger.width_grid.size(), 0);
    for (const auto& rec : res.records)
        for (std::size_t i = 0; i < res.ledger.width_grid.size(); ++i)
            if (rec.width_at_action > res.ledger.width_grid[i]) ++recount[i];
    for (std::size_t i = 0; i < recount.size(); ++i)
        CHECK(recount[i] == res.ledger.width_exceed_counts[i]);
}

TEST_CASE("long-term variant plays the recommendation and bounds violations by widths") {
    ExperimentConfig cfg = linear_config(1500, 31);
    RunResult res = run_long_term(cfg);
    for (const auto& rec : res.records) {
        CHECK(rec.gamma == 1.0);
        CHECK((rec.action - rec.pre_map_action).norm() == 0.0);
        if (rec.fstar_in_space)
            CHECK(rec.constraint_value <= rec.width_at_action + 1e-9);
    }
    CHECK(res.ledger.signed_violation_sum <= res.ledger.width_sum + 1e-9);
}

TEST_CASE("glm and polytopic paths run clean end to end") {
    ExperimentConfig cfg;
    cfg.preset = "glm_tanh";
    cfg.dimension = 2;
    cfg.horizon = 400;
    cfg.seed = 41;
    RunResult glm = run_safe_learning(cfg);
    CHECK(glm.ledger.violations == 0);
    CHECK(glm.ledger.coverage_all_rounds);

    cfg.preset = "polytopic_m3";
    cfg.seed = 43;
    RunResult poly = run_safe_learning(cfg);
    CHECK(poly.ledger.violations == 0);
    CHECK(poly.ledger.coverage_all_rounds);
}

TEST_CASE("played actions are safe whenever the truth is in the space") {
    ExperimentConfig cfg = linear_config(300, 47);
    RunResult res = run_safe_learning(cfg);
    for (const auto& rec : res.records) {
        if (!rec.fstar_in_space) continue;
        CHECK(rec.constraint_value <= 1e-9);
    }
}

TEST_CASE("finite saddle and exp3 mappings run safe end to end") {
    for (const char* mapping : {"saddle", "exp3_kappa"}) {
        ExperimentConfig cfg;
        cfg.preset = "finite_k10";
        cfg.horizon = 600;
        cfg.delta = 0.05;
        cfg.seed = 53;
        cfg.mapping = mapping;
        cfg.kappa = 4.0;
        RunResult res = run_safe_learning(cfg);
        CHECK(res.ledger.violations == 0);
        // played action always lands in P_t: the environment-side constraint
        // value must be nonpositive whenever the truth survived
        for (const auto& rec : res.records)
            if (rec.fstar_in_space) CHECK(rec.constraint_value <= 1e-12);
    }
}

TEST_CASE("hindsight with an empty safe set reports the invalid environment") {
    Environment env = make_preset("finite_k10", 0);
    Environment env2 = env;
    for (int a = 0; a < 10; ++a) env2.table(env.true_function, a) = 0.5;
    Eigen::VectorXd cum = Eigen::VectorXd::Zero(10);
    CHECK_THROWS_AS((void)hindsight_best_safe_finite(env2, cum, 1), NoSafeAction);
}

TEST_CASE("diagnostics flag dumps the oracle state into the trace") {
    ExperimentConfig cfg = linear_config(20, 3);
    cfg.diagnostics = true;
    RunResult res = run_safe_learning(cfg);
    REQUIRE(res.records.back().oracle_center.size() == 2);
    const std::string line = round_record_to_json(res.records.back());
    CHECK(line.find("oracle_center") != std::string::npos);
    // without the flag the key is absent
    cfg.diagnostics = false;
    RunResult plain = run_safe_learning(cfg);
    CHECK(round_record_to_json(plain.records.back()).find("oracle_center") ==
          std::string::npos);
}

TEST_CASE("config validation") {
    ExperimentConfig cfg = linear_config(100, 1);
    cfg.delta = 1.5;
    CHECK_THROWS(cfg.validate());
    cfg = linear_config(0, 1);
    CHECK_THROWS(cfg.validate());
    cfg = linear_config(100, 1);
    cfg.grid_resolution = 1;
    CHECK_THROWS(cfg.validate());
    cfg = linear_config(100, 1);
    cfg.mapping = "not_a_mapping";
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("config json round trip") {
    const std::string text = R"({
        "horizon": 123,
        "delta": 0.1,
        "seed": 9,
        "environment": {"preset": "linear_ball", "dimension": 3, "offset": 0.4,
                        "noise_std": 0.05,
                        "loss": {"kind": "iid", "bound": 0.8}},
        "oracle": {"lambda": 2.0, "radius_scale": 1.5},
        "learning": {"grid_resolution": 17},
        "mapping": {"kind": "scaling"}
    })";
    ExperimentConfig cfg = ExperimentConfig::from_json_string(text);
    CHECK(cfg.horizon == 123);
    CHECK(cfg.dimension == 3);
    CHECK(cfg.offset_b.value() == doctest::Approx(0.4));
    CHECK(cfg.loss_bound == doctest::Approx(0.8));
    CHECK(cfg.lambda == doctest::Approx(2.0));
    CHECK(cfg.grid_resolution == 17);
    ExperimentConfig back = ExperimentConfig::from_json_string(cfg.to_json_string());
    CHECK(back.horizon == cfg.horizon);
    CHECK(back.radius_scale == cfg.radius_scale);
    CHECK(back.grid_resolution == cfg.grid_resolution);
}

TEST_CASE("sweep results are independent of the thread count") {
    ExperimentConfig cfg = linear_config(150, 60);
    auto serial = run_sweep(cfg, 4, 1, false, false);
    auto parallel = run_sweep(cfg, 4, 2, false, false);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].ledger.regret == parallel[i].ledger.regret);
        CHECK(serial[i].ledger.width_sum == parallel[i].ledger.width_sum);
    }
}
