#include "socl/engine.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "socl/geometry.hpp"
#include "socl/learning.hpp"
#include "socl/regression.hpp"
#include "socl/rng.hpp"
#include "socl/version_space.hpp"

namespace socl {

namespace {

enum class Policy { Oracle, Greedy };

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

void tally_width(RegretLedger& ledger, double width) {
    ledger.width_sum += width;
    for (std::size_t i = 0; i < ledger.width_grid.size(); ++i)
        if (width > ledger.width_grid[i]) ++ledger.width_exceed_counts[i];
}

// ---------------------------------------------------------------------------
// continuous paths (linear, glm, polytopic)
// ---------------------------------------------------------------------------

struct ContinuousRunner {
    const ExperimentConfig& cfg;
    Environment env;
    long T;
    int d;
    double beta;
    double b;

    std::vector<VawState> oracles;  // one per constraint row
    Eigen::MatrixXd lattice;
    std::vector<char> a0_mask;        // lattice columns inside the initial safe set
    std::vector<char> true_safe_mask; // environment-side, for the regret proxy
    Eigen::VectorXd ref_cum;          // cumulative raw loss of each lattice column

    explicit ContinuousRunner(const ExperimentConfig& config)
        : cfg(config), env(config.build_environment()) {
        T = cfg.horizon;
        d = env.dimension;
        b = env.offset_b;
        beta = engine_radius(cfg, env);
        const int rows = env.constraint_rows();
        for (int i = 0; i < rows; ++i) oracles.push_back(VawState::create(d, cfg.lambda));
        lattice = build_ball_lattice(d, cfg.grid_resolution, env.action_bound);
        a0_mask.resize(lattice.cols());
        true_safe_mask.resize(lattice.cols());
        for (int j = 0; j < lattice.cols(); ++j) {
            a0_mask[j] = env.in_initial_safe_set(lattice.col(j)) ? 1 : 0;
            true_safe_mask[j] = env.constraint_eval(lattice.col(j)) <= 0.0 ? 1 : 0;
        }
        ref_cum = Eigen::VectorXd::Zero(lattice.cols());
    }

    ContinuousVersionSpace build_version_space() const {
        auto make_row = [&](int i) {
            const VawState& s = oracles[i];
            Eigen::VectorXd center = s.gram.llt().solve(s.moment);
            return EllipsoidVersionSpace(center, s.gram, beta, b, 1.0);
        };
        switch (env.kind) {
            case ConstraintKind::Linear:
                return make_row(0);
            case ConstraintKind::Glm:
                return GlmVersionSpace(make_row(0), env.link);
            case ConstraintKind::Polytopic: {
                std::vector<EllipsoidVersionSpace> rows;
                for (int i = 0; i < env.constraint_rows(); ++i) rows.push_back(make_row(i));
                return ProductVersionSpace(std::move(rows));
            }
            default:
                throw std::logic_error("continuous runner with finite environment");
        }
    }

    bool coverage(const ContinuousVersionSpace& vs) const {
        if (env.kind == ConstraintKind::Polytopic) {
            const auto& product = std::get<ProductVersionSpace>(vs);
            for (int i = 0; i < product.rows(); ++i)
                if (!product.row(i).contains_parameter(env.fstar_rows.row(i).transpose()))
                    return false;
            return true;
        }
        if (env.kind == ConstraintKind::Glm)
            return std::get<GlmVersionSpace>(vs).inner().contains_parameter(env.fstar);
        return std::get<EllipsoidVersionSpace>(vs).contains_parameter(env.fstar);
    }

    double predict_constraint(const Eigen::VectorXd& a) const {
        // pre-update oracle prediction on the constraint-value scale
        if (env.kind == ConstraintKind::Polytopic) {
            double hi = -std::numeric_limits<double>::infinity();
            for (const auto& s : oracles) hi = std::max(hi, s.predict(a) - b);
            return hi;
        }
        const double raw = oracles[0].predict(a);
        if (env.kind == ConstraintKind::Glm) return env.link.value(raw - b);
        return raw - b;
    }

    void update_oracles(const Eigen::VectorXd& a, const Eigen::VectorXd& z) {
        if (env.kind == ConstraintKind::Polytopic) {
            for (int i = 0; i < env.constraint_rows(); ++i)
                oracles[i].update(a, z[i] + b);
            return;
        }
        double target = z[0];
        if (env.kind == ConstraintKind::Glm) target = env.link.inverse(z[0]);
        oracles[0].update(a, target + b);
    }

    RunResult run(Policy policy, bool long_term, const RunOptions& opts) {
        const auto start = std::chrono::steady_clock::now();
        Rng rng(derive_stream_seed(cfg.seed, 0));

        RunResult result;
        result.environment = env;
        result.radius_beta = beta;
        RegretLedger& ledger = result.ledger;
        ledger.width_grid = default_width_grid();
        ledger.width_exceed_counts.assign(ledger.width_grid.size(), 0);
        ledger.loss_scale = env.loss_scale();
        ledger.radius_beta = beta;
        ledger.horizon = T;
        ledger.seed = cfg.seed;

        const double grad_bound = env.adversary.bound;
        OgdOracle ogd(lattice, ogd_step_size(env.action_bound, grad_bound, T), grad_bound);
        LossAdversary adversary = env.adversary;
        Eigen::VectorXd cum_loss = Eigen::VectorXd::Zero(d);
        double learner_cum_raw = 0.0;
        const MappingKind mapping =
            long_term ? MappingKind::Identity : cfg.mapping_kind();

        Eigen::VectorXd fmin, fmax;
        std::vector<char> optimistic_mask(lattice.cols());
        if (opts.keep_records) result.records.reserve(T);

        for (long t = 1; t <= T; ++t) {
            ContinuousVersionSpace vs = build_version_space();
            if (opts.continuous_probe) opts.continuous_probe(t, vs, env);
            vs_batch_bounds(vs, lattice, fmin, fmax);
            for (int j = 0; j < lattice.cols(); ++j)
                optimistic_mask[j] = (fmin[j] <= 0.0 || a0_mask[j]) ? 1 : 0;

            RoundRecord rec;
            rec.t = t;
            rec.mapping_id = mapping;

            Eigen::VectorXd pre_map;
            Eigen::VectorXd action;
            if (policy == Policy::Greedy) {
                // cumulative-loss argmin over the pessimistic lattice columns
                int best = -1;
                double best_val = std::numeric_limits<double>::infinity();
                for (int j = 0; j < lattice.cols(); ++j) {
                    const bool pess = (fmax[j] <= 0.0) || a0_mask[j];
                    if (!pess) continue;
                    if (ref_cum[j] < best_val - 1e-15) {
                        best_val = ref_cum[j];
                        best = j;
                    }
                }
                if (best < 0) throw EmptyPessimisticSet();
                pre_map = lattice.col(best);
                action = pre_map;
                rec.gamma = 1.0;
                rec.mapping_id = MappingKind::Identity;
            } else {
                const auto in_optimistic = [&](const Eigen::VectorXd& p) {
                    return vs_membership(vs, p) != SetMembership::Neither ||
                           env.in_initial_safe_set(p);
                };
                OgdRecommendation recommendation = ogd.recommend(optimistic_mask, in_optimistic);
                const std::size_t pick = rng.sample_index(recommendation.weights);
                pre_map = recommendation.support.col(static_cast<int>(pick));
                if (mapping == MappingKind::Identity) {
                    action = pre_map;
                    rec.gamma = 1.0;
                } else if (mapping == MappingKind::Scaling) {
                    MappingOutcome out = scaling_map(vs, pre_map);
                    action = out.post_map_action;
                    rec.gamma = out.gamma;
                } else {
                    throw std::invalid_argument(
                        "continuous runs support the scaling and identity mappings");
                }
            }

            // adversary reveals the round's loss, then the feedback channel fires
            const Eigen::VectorXd descriptor = adversary.next(rng);
            const Eigen::VectorXd z = env.feedback_draw(action, rng);

            rec.finite = false;
            rec.action = action;
            rec.pre_map_action = pre_map;
            rec.width_at_action = vs_width(vs, action);
            rec.pre_map_width = vs_width(vs, pre_map);
            rec.prediction = predict_constraint(action);
            rec.constraint_value = env.constraint_eval(action);
            rec.violated = rec.constraint_value > 0.0;
            rec.fstar_in_space = coverage(vs);
            rec.expected_width = rec.width_at_action;
            if (cfg.diagnostics) {
                rec.oracle_center.resize(d * static_cast<int>(oracles.size()));
                for (std::size_t i = 0; i < oracles.size(); ++i)
                    rec.oracle_center.segment(static_cast<int>(i) * d, d) =
                        oracles[i].gram.llt().solve(oracles[i].moment);
            }

            const double raw_loss = env.loss_eval(descriptor, action);
            const double raw_pre_loss = env.loss_eval(descriptor, pre_map);
            rec.loss_value = env.loss_normalize(raw_loss);
            rec.loss_gap = raw_loss - raw_pre_loss;

            learner_cum_raw += raw_loss;
            cum_loss += descriptor;
            ref_cum.noalias() += lattice.transpose() * descriptor;

            double proxy_best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < lattice.cols(); ++j)
                if (true_safe_mask[j]) proxy_best = std::min(proxy_best, ref_cum[j]);
            rec.cumulative_regret_proxy = ledger.loss_scale * (learner_cum_raw - proxy_best);

            ledger.learner_cum_loss += rec.loss_value;
            if (rec.violated) ++ledger.violations;
            ledger.violation_magnitude_sum += std::max(rec.constraint_value, 0.0);
            ledger.signed_violation_sum += rec.constraint_value;
            ledger.coverage_all_rounds = ledger.coverage_all_rounds && rec.fstar_in_space;
            tally_width(ledger, rec.width_at_action);

            // oracle updates close the round
            if (policy == Policy::Oracle) ogd.update(descriptor);
            update_oracles(action, z);
            adversary.observe_play(action, -1);

            if (opts.keep_records) result.records.push_back(std::move(rec));
        }

        result.cumulative_loss = cum_loss;
        HindsightResult hindsight = hindsight_best_safe_continuous(env, cum_loss, T);
        ledger.hindsight_safe_opt_loss = hindsight.normalized_cum_loss;
        ledger.regret = ledger.learner_cum_loss - ledger.hindsight_safe_opt_loss;
        ledger.runtime_ms = elapsed_ms(start);
        return result;
    }
};

// ---------------------------------------------------------------------------
// finite action space path
// ---------------------------------------------------------------------------

struct FiniteRunner {
    const ExperimentConfig& cfg;
    Environment env;
    long T;
    int K;
    double beta;

    std::vector<int> f0_ids;

    explicit FiniteRunner(const ExperimentConfig& config)
        : cfg(config), env(config.build_environment()) {
        T = cfg.horizon;
        K = env.num_actions;
        beta = engine_radius(cfg, env);
        for (int f = 0; f < env.table.rows(); ++f) {
            bool ok = true;
            for (int a : env.safe_indices)
                if (env.table(f, a) > 1e-12) ok = false;
            if (ok) f0_ids.push_back(f);
        }
        if (f0_ids.empty()) throw ModelMismatch();
    }

    RunResult run(bool long_term, const RunOptions& opts) {
        const auto start = std::chrono::steady_clock::now();
        Rng rng(derive_stream_seed(cfg.seed, 0));

        RunResult result;
        result.environment = env;
        result.radius_beta = beta;
        RegretLedger& ledger = result.ledger;
        ledger.width_grid = default_width_grid();
        ledger.width_exceed_counts.assign(ledger.width_grid.size(), 0);
        ledger.loss_scale = 1.0;
        ledger.radius_beta = beta;
        ledger.horizon = T;
        ledger.seed = cfg.seed;

        FiniteRegressionState oracle = FiniteRegressionState::create(
            env.table, finite_oracle_budget(env.noise_std, static_cast<int>(env.table.rows()),
                                            T, cfg.delta));
        SleepingHedge hedge(K, hedge_learning_rate(K, T));
        LossAdversary adversary = env.adversary;
        Eigen::VectorXd deviation_sums = Eigen::VectorXd::Zero(env.table.rows());
        const MappingKind mapping = long_term ? MappingKind::Identity : cfg.mapping_kind();

        std::vector<double> kappas = kappa_grid(T);
        Exp3Selector selector(static_cast<int>(kappas.size()), T);

        Eigen::VectorXd cum_loss = Eigen::VectorXd::Zero(K);
        double learner_cum = 0.0;
        if (opts.keep_records) result.records.reserve(T);

        for (long t = 1; t <= T; ++t) {
            FiniteVersionSpace vs(env.table, f0_ids, deviation_sums, beta);
            if (vs.empty()) throw ModelMismatch();
            if (opts.finite_probe) opts.finite_probe(t, vs);

            std::vector<char> awake(K, 0), pess(K, 0);
            for (int a = 0; a < K; ++a) {
                const SetMembership m = vs.membership(a);
                awake[a] = (m != SetMembership::Neither || env.in_initial_safe_set_finite(a)) ? 1 : 0;
                pess[a] = (m == SetMembership::Pessimistic || env.in_initial_safe_set_finite(a)) ? 1 : 0;
            }

            const Eigen::VectorXd p_tilde = hedge.recommend(awake);
            Eigen::VectorXd p;
            RoundRecord rec;
            rec.t = t;
            rec.mapping_id = mapping;
            int arm = -1;
            switch (mapping) {
                case MappingKind::Identity:
                    p = p_tilde;
                    break;
                case MappingKind::ExploreExploit:
                    p = explore_exploit_map(p_tilde, pess, vs);
                    break;
                case MappingKind::Saddle:
                    p = saddle_map_finite(cfg.kappa, p_tilde, pess, vs);
                    break;
                case MappingKind::Exp3Kappa:
                    arm = selector.sample(rng);
                    p = saddle_map_finite(kappas[arm], p_tilde, pess, vs);
                    break;
                default:
                    throw std::invalid_argument("finite runs support explore_exploit, saddle, "
                                                "exp3_kappa and identity mappings");
            }

            const int action = static_cast<int>(rng.sample_index(p));
            const Eigen::VectorXd descriptor = adversary.next(rng);
            const double z = env.feedback_draw_finite(action, rng);

            const double zhat = oracle.predict(action);
            for (int f = 0; f < env.table.rows(); ++f) {
                const double diff = env.table(f, action) - zhat;
                deviation_sums[f] += diff * diff;
            }
            oracle.update(action, z);

            rec.finite = true;
            rec.action_index = action;
            for (int a = 0; a < K; ++a) {
                if (p_tilde[a] > 0.0) {
                    rec.rec_support.push_back(a);
                    rec.rec_probs.push_back(p_tilde[a]);
                }
            }
            rec.gamma = 1.0;
            rec.width_at_action = vs.width(action);
            rec.prediction = zhat;
            rec.constraint_value = env.constraint_eval_finite(action);
            rec.violated = rec.constraint_value > 0.0;
            rec.fstar_in_space =
                std::find(vs.survivors().begin(), vs.survivors().end(), env.true_function) !=
                vs.survivors().end();
            rec.loss_value = descriptor[action];
            rec.loss_gap = descriptor.dot(p - p_tilde);
            double exp_width = 0.0;
            for (int a = 0; a < K; ++a)
                if (p[a] > 0.0) exp_width += p[a] * vs.width(a);
            rec.expected_width = exp_width;
            rec.pre_map_width = 0.0;
            if (cfg.diagnostics) rec.oracle_center = oracle.sq_error;

            learner_cum += rec.loss_value;
            cum_loss += descriptor;
            double proxy_best = std::numeric_limits<double>::infinity();
            for (int a = 0; a < K; ++a)
                if (env.constraint_eval_finite(a) <= 0.0)
                    proxy_best = std::min(proxy_best, cum_loss[a]);
            rec.cumulative_regret_proxy = learner_cum - proxy_best;

            ledger.learner_cum_loss += rec.loss_value;
            if (rec.violated) ++ledger.violations;
            ledger.violation_magnitude_sum += std::max(rec.constraint_value, 0.0);
            ledger.signed_violation_sum += rec.constraint_value;
            ledger.coverage_all_rounds = ledger.coverage_all_rounds && rec.fstar_in_space;
            tally_width(ledger, rec.width_at_action);

            hedge.update(descriptor, awake, p_tilde);
            if (arm >= 0) selector.update(arm, descriptor[action]);
            adversary.observe_play(Eigen::VectorXd(), action);

            if (opts.keep_records) result.records.push_back(std::move(rec));
        }

        result.cumulative_loss = cum_loss;
        HindsightResult hindsight = hindsight_best_safe_finite(env, cum_loss, T);
        ledger.hindsight_safe_opt_loss = hindsight.normalized_cum_loss;
        ledger.regret = ledger.learner_cum_loss - ledger.hindsight_safe_opt_loss;
        ledger.runtime_ms = elapsed_ms(start);
        return result;
    }
};

}  // namespace

double engine_radius(const ExperimentConfig& cfg, const Environment& env) {
    if (env.finite())
        return finite_radius(cfg.horizon, cfg.delta, static_cast<int>(env.table.rows()),
                             env.noise_std, cfg.radius_scale);
    return linear_radius(cfg.horizon, cfg.delta, env.dimension, env.action_bound,
                         cfg.radius_scale);
}

RunResult run_safe_learning(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    Environment env = cfg.build_environment();
    if (env.finite()) return FiniteRunner(cfg).run(false, opts);
    return ContinuousRunner(cfg).run(Policy::Oracle, false, opts);
}

RunResult run_long_term(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    Environment env = cfg.build_environment();
    if (env.finite()) return FiniteRunner(cfg).run(true, opts);
    return ContinuousRunner(cfg).run(Policy::Oracle, true, opts);
}

RunResult run_pessimistic_greedy(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    Environment env = cfg.build_environment();
    if (env.finite()) throw std::invalid_argument("greedy baseline is continuous-only");
    return ContinuousRunner(cfg).run(Policy::Greedy, false, opts);
}

HindsightResult hindsight_best_safe_continuous(const Environment& env,
                                               const Eigen::VectorXd& cumulative_loss,
                                               long horizon) {
    HindsightResult res;
    const int d = env.dimension;
    Eigen::MatrixXd G;
    Eigen::VectorXd c;
    if (env.kind == ConstraintKind::Polytopic) {
        G = env.fstar_rows;
        c = Eigen::VectorXd::Constant(G.rows(), env.offset_b);
    } else {
        // glm constraints reduce to the same halfspace: sigma monotone, sigma(0)=0
        G = env.fstar.transpose();
        c = Eigen::VectorXd::Constant(1, env.offset_b);
    }

    const double L_norm = cumulative_loss.norm();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
    if (L_norm > 0.0) {
        double best_val = std::numeric_limits<double>::infinity();
        Eigen::VectorXd best_x = x;
        for (int k = 1; k <= 2000; ++k) {
            const double step = env.action_bound /
                                (L_norm * std::sqrt(static_cast<double>(k)));
            x = project_ball_halfspaces(x - step * cumulative_loss, env.action_bound, G, c);
            const double val = cumulative_loss.dot(x);
            if (val < best_val) {
                best_val = val;
                best_x = x;
            }
        }
        x = best_x;
        // stationarity: x is a fixed point of a small projected step
        const double probe = 1e-6 * env.action_bound / L_norm;
        const Eigen::VectorXd moved =
            project_ball_halfspaces(x - probe * cumulative_loss, env.action_bound, G, c);
        res.stationarity_verified = (moved - x).norm() <= 1e-6 * std::max(1.0, x.norm());
    }
    res.action = x;
    res.raw_value = cumulative_loss.dot(x);
    res.normalized_cum_loss =
        env.loss_scale() * res.raw_value +
        static_cast<double>(horizon) * env.adversary.bound * env.action_bound * env.loss_scale();
    return res;
}

HindsightResult hindsight_best_safe_finite(const Environment& env,
                                           const Eigen::VectorXd& cumulative_losses,
                                           long horizon) {
    (void)horizon;
    HindsightResult res;
    int best = -1;
    double best_val = std::numeric_limits<double>::infinity();
    for (int a = 0; a < env.num_actions; ++a) {
        if (env.constraint_eval_finite(a) > 0.0) continue;
        if (cumulative_losses[a] < best_val - 1e-15) {
            best_val = cumulative_losses[a];
            best = a;
        }
    }
    if (best < 0) throw NoSafeAction();
    res.action_index = best;
    res.raw_value = best_val;
    res.normalized_cum_loss = best_val;
    return res;
}

std::vector<RunResult> run_sweep(const ExperimentConfig& base, int num_seeds, int threads,
                                 bool long_term, bool keep_records) {
    std::vector<RunResult> results(num_seeds);
    std::atomic<int> next{0};
    const int workers = std::max(1, std::min(threads, num_seeds));
    auto work = [&]() {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= num_seeds) break;
            ExperimentConfig cfg = base;
            cfg.seed = base.seed + static_cast<std::uint64_t>(i);
            RunOptions opts;
            opts.keep_records = keep_records;
            results[i] = long_term ? run_long_term(cfg, opts) : run_safe_learning(cfg, opts);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    return results;
}

}  // namespace socl
