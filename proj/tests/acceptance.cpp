// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Statistical checks run at fixed seeds and print the measured
// quantities next to their thresholds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>
#include <vector>

#include "ib/agent.hpp"
#include "ib/conversion.hpp"
#include "ib/env.hpp"
#include "ib/experiment.hpp"
#include "ib/pamm.hpp"
#include "ib/planner.hpp"
#include "ib/rng.hpp"
#include "ib/scenario_io.hpp"

#ifndef IB_SCENARIO_DIR
#define IB_SCENARIO_DIR "scenarios"
#endif

namespace {

using namespace ib;

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] %2d. %-38s %s (%.1fs)\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

template <typename F>
void criterion(int number, const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(number, name, pass, detail, seconds);
}

IncrementalityParams one_round_params(double beta, double lambda) {
    IncrementalityParams p;
    p.beta = {{beta}};
    p.lambda = {lambda};
    p.bounds = {0.05, 1.0, 0.1, 8.0, 2.0};
    return p;
}

// ---------------------------------------------------------------------------
// 1. window-count means match the closed-form half-window moments
bool poisson_moment_identities(std::string& detail) {
    const int n = 100000;
    int combo = 0;
    double worst_dev = 0.0;
    for (double beta : {0.2, 0.5, 0.9}) {
        for (double lambda : {0.5, 1.0, 2.0}) {
            const auto params = one_round_params(beta, lambda);
            const auto wins = win_records({1});
            auto rng = make_engine(10001, combo++);
            double sx = 0, sxx = 0, sy = 0, syy = 0;
            for (int i = 0; i < n; ++i) {
                const auto times = sample_conversions(wins, params, 2.0, rng);
                const double x = count_in(times, 1.0, 1.5);
                const double y = count_in(times, 1.5, 2.0);
                sx += x;
                sxx += x * x;
                sy += y;
                syy += y * y;
            }
            const double ex = beta * (1.0 - std::exp(-lambda / 2.0));
            const double ey = ex * std::exp(-lambda / 2.0);
            const double se_x = std::sqrt((sxx / n - (sx / n) * (sx / n)) / n);
            const double se_y = std::sqrt((syy / n - (sy / n) * (sy / n)) / n);
            const double dev_x = std::abs(sx / n - ex) / (4.0 * se_x);
            const double dev_y = std::abs(sy / n - ey) / (4.0 * se_y);
            worst_dev = std::max({worst_dev, dev_x, dev_y});
            if (dev_x > 1.0 || dev_y > 1.0) {
                detail = "beta=" + std::to_string(beta) + " lambda=" + std::to_string(lambda) +
                         " outside 4 standard errors";
                return false;
            }
        }
    }
    std::ostringstream d;
    d << "9 (beta,lambda) combos, worst deviation " << worst_dev << " of the 4-SE budget";
    detail = d.str();
    return true;
}

// 2. noiseless moments invert to the exact parameters
bool pamm_exact_inversion(std::string& detail) {
    double worst = 0.0;
    for (double beta : {0.2, 0.5, 0.9}) {
        for (double lambda : {0.5, 1.0, 2.0}) {
            const double mu = beta * (1.0 - std::exp(-lambda / 2.0));
            const double eta = mu * std::exp(-lambda / 2.0);
            worst = std::max(worst, std::abs(invert_lambda(mu, eta) - lambda) / lambda);
            worst = std::max(worst, std::abs(invert_beta(mu, eta) - beta) / beta);
        }
    }
    std::ostringstream d;
    d << "worst relative error " << worst;
    detail = d.str();
    return worst <= 1e-12;
}

// 3. estimation error shrinks at the root-n rate on forced matched pairs
bool pamm_consistency_rate(std::string& detail) {
    IncrementalityParams params;
    params.beta = {{0.5}, {0.5, 0.5}, {0.5, 0.8, 0.5}};
    params.lambda = {2.0, 2.0, 2.0};
    params.bounds = {0.05, 1.0, 0.1, 8.0, 2.0};
    const double true_beta = params.beta[2][1];  // cell (3,2)
    const auto treated = win_records({1, 3});
    const auto control = win_records({1});
    const std::vector<int> sizes{100, 1000, 10000};
    const int reps = 100;

    const auto make_log = [](std::vector<int> wins, std::vector<double> times) {
        EpisodeLog log;
        log.wins = std::move(wins);
        log.conversions = std::move(times);
        return log;
    };

    std::vector<double> medians;
    int hits_at_largest = 0;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        std::vector<double> errs(reps);
        for (int rep = 0; rep < reps; ++rep) {
            auto rng = make_engine(10003 + static_cast<int>(si), rep);
            MatchState state(3);
            for (int i = 0; i < sizes[si]; ++i) {
                // partner first, then the round-3 winner: forced pair at (3,2)
                state.ingest_episode(
                    make_log({1}, sample_conversions(control, params, 4.0, rng)));
                state.ingest_episode(
                    make_log({1, 3}, sample_conversions(treated, params, 4.0, rng)));
            }
            if (state.pair_count(3, 2) != sizes[si]) {
                detail = "forced matching did not pair every episode";
                return false;
            }
            const auto est = estimate_beta(3, 2, state, params.bounds);
            errs[rep] = std::abs(est.value - true_beta);
            if (si + 1 == sizes.size() && errs[rep] <= 0.05) ++hits_at_largest;
        }
        std::nth_element(errs.begin(), errs.begin() + reps / 2, errs.end());
        medians.push_back(errs[reps / 2]);
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double x = std::log(static_cast<double>(sizes[i]));
        const double y = std::log(medians[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double k = static_cast<double>(sizes.size());
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);

    std::ostringstream d;
    d << "slope " << slope << " (want [-0.65,-0.35]), |err|<=0.05 in " << hits_at_largest
      << "/100 at n=10000";
    detail = d.str();
    return slope >= -0.65 && slope <= -0.35 && hits_at_largest >= 95;
}

// 4. backward induction equals brute-force policy enumeration
bool planner_oracle_equivalence(std::string& detail) {
    std::mt19937_64 rng = make_engine(10004, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto grid = BidGrid::uniform(5);
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        BetaTable beta(3);
        for (int h = 1; h <= 3; ++h) {
            beta[h - 1].resize(h);
            for (auto& x : beta[h - 1]) x = 0.1 + 0.8 * u(rng);
        }
        std::vector<HobModel::RoundSpec> specs;
        for (int h = 0; h < 3; ++h) {
            HobModel::RoundSpec s;
            switch (rng() % 3) {
                case 0:
                    s.kind = HobModel::Kind::uniform;
                    break;
                case 1:
                    s.kind = HobModel::Kind::trunc_normal;
                    s.mu = 0.2 + 0.6 * u(rng);
                    s.sigma = 0.1 + 0.3 * u(rng);
                    break;
                default:
                    s.kind = HobModel::Kind::beta_shaped;
                    s.alpha = 0.8 + 2.0 * u(rng);
                    s.beta = 0.8 + 2.0 * u(rng);
            }
            specs.push_back(s);
        }
        const auto hob = HobModel::parametric(std::move(specs));
        const MdpSpec spec{beta, hob, 1.0, grid, AuctionFormat::second_price, 3};
        const double dp = plan(spec).optimal_value;

        // enumerate all 5^6 table policies
        double brute = -std::numeric_limits<double>::infinity();
        Policy p;
        p.table = {{0.0}, {0.0, 0.0}, {0.0, 0.0, 0.0}};
        std::size_t total = 1;
        for (int c = 0; c < 6; ++c) total *= grid.size();
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t c = code;
            for (int h = 1; h <= 3; ++h)
                for (int l = 1; l <= h; ++l) {
                    p.table[h - 1][l - 1] = grid[c % grid.size()];
                    c /= grid.size();
                }
            brute = std::max(brute, evaluate_policy(p, spec));
        }
        worst = std::max(worst, std::abs(dp - brute) / std::max(1e-30, std::abs(brute)));
    }
    std::ostringstream d;
    d << "20 instances, worst relative gap " << worst;
    detail = d.str();
    return worst <= 1e-12;
}

// 5. the exact evaluator predicts the environment's mean realized utility
bool evaluator_vs_environment(std::string& detail) {
    Scenario s = load_scenario(std::string(IB_SCENARIO_DIR) + "/reference.json");
    s.config.episodes = 10;  // irrelevant here
    const MdpSpec truth{s.params.beta, s.hob, s.config.value_per_conversion, s.config.grid,
                        s.config.auction, s.config.rounds};
    std::mt19937_64 rng = make_engine(10005, 0);
    const int n = 100000;
    double worst = 0.0;
    for (int pi = 0; pi < 5; ++pi) {
        Policy p;
        p.table.resize(s.config.rounds);
        for (int h = 1; h <= s.config.rounds; ++h) {
            p.table[h - 1].resize(h);
            for (auto& b : p.table[h - 1]) b = s.config.grid[rng() % s.config.grid.size()];
        }
        const double exact = evaluate_policy(p, truth);
        const auto outcomes = run_batch(p, n, s.hob, s.params, s.config, 20000 + pi);
        double sum = 0, sumsq = 0;
        for (const auto& o : outcomes) {
            sum += o.realized_utility;
            sumsq += o.realized_utility * o.realized_utility;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sumsq / n - mean * mean) / n);
        const double dev = std::abs(mean - exact) / (3.0 * se);
        worst = std::max(worst, dev);
        if (dev > 1.0) {
            std::ostringstream d;
            d << "policy " << pi << ": mean " << mean << " vs exact " << exact << " (3SE "
              << 3.0 * se << ")";
            detail = d.str();
            return false;
        }
    }
    std::ostringstream d;
    d << "5 policies, worst deviation " << worst << " of the 3-SE budget";
    detail = d.str();
    return true;
}

// 6. empirical CDF concentrates at the DKW rate
bool empirical_cdf_dkw(std::string& detail) {
    const double delta = 0.1;
    const int t = 1000;
    const int reps = 200;
    const double band = std::sqrt(std::log(2.0 / delta) / (2.0 * t));
    const auto u = HobModel::uniform(1);
    int hits = 0;
    for (int rep = 0; rep < reps; ++rep) {
        auto rng = make_engine(10006, rep);
        std::vector<double> draws(t);
        for (auto& d : draws) d = u.sample(1, rng);
        std::sort(draws.begin(), draws.end());
        double sup = 0.0;
        for (int i = 0; i < t; ++i) {
            sup = std::max(sup, std::abs((i + 1.0) / t - draws[i]));
            sup = std::max(sup, std::abs(static_cast<double>(i) / t - draws[i]));
        }
        if (sup <= band) ++hits;
    }
    std::ostringstream d;
    d << hits << "/200 within the band (want >= 170)";
    detail = d.str();
    return hits >= 170;
}

// 7. raising any single beta entry never lowers the planned value
bool planner_monotonicity(std::string& detail) {
    std::mt19937_64 rng = make_engine(10007, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto grid = BidGrid::uniform(9);
    const auto hob = HobModel::uniform(4);
    for (int rep = 0; rep < 100; ++rep) {
        BetaTable beta(4);
        for (int h = 1; h <= 4; ++h) {
            beta[h - 1].resize(h);
            for (auto& x : beta[h - 1]) x = 0.1 + 0.8 * u(rng);
        }
        const double before =
            opt_value(beta, hob, 1.0, grid, AuctionFormat::second_price, 4);
        const int h = 1 + static_cast<int>(rng() % 4);
        const int l = 1 + static_cast<int>(rng() % h);
        beta[h - 1][l - 1] = std::min(1.0, beta[h - 1][l - 1] + u(rng) * 0.5);
        const double after =
            opt_value(beta, hob, 1.0, grid, AuctionFormat::second_price, 4);
        if (after < before - 1e-12) {
            std::ostringstream d;
            d << "raising beta(" << h << "," << l << ") dropped value " << before << " -> "
              << after;
            detail = d.str();
            return false;
        }
    }
    detail = "100 random single-entry raises, value never decreased";
    return true;
}

// 8. with theoretical widths the region covers the truth post-exploration
bool confidence_coverage(std::string& detail) {
    Scenario s = load_scenario(std::string(IB_SCENARIO_DIR) + "/reference.json");
    AgentConfig cfg = s.agent;
    cfg.kappa = 1.0;  // theoretical widths
    const int reps = 50;
    long long checks = 0, covered = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const std::uint64_t rep_seed = derive_seed(30000, rep);
        OnlineAgent agent(s.config, cfg);
        for (long long t = 1; t <= s.config.episodes; ++t) {
            const auto d = agent.decide();
            auto rng = make_engine(rep_seed, t);
            const auto out = d.exploring
                                 ? run_episode(d.bids, s.hob, s.params, s.config, rng)
                                 : run_episode(d.policy, s.hob, s.params, s.config, rng);
            agent.update(out.log);
            if (d.exploring) continue;
            const auto est = agent.estimates();
            bool inside = true;
            for (int h = 1; h <= s.config.rounds && inside; ++h) {
                for (int l = 1; l <= h && inside; ++l) {
                    const auto& cell = est.beta[h - 1][l - 1];
                    const double center = cell.available ? cell.value : s.params.bounds.C_beta;
                    inside = std::abs(center - s.params.beta[h - 1][l - 1]) <=
                             agent.confidence_radius(h, l);
                }
            }
            ++checks;
            covered += inside ? 1 : 0;
        }
    }
    const double frac = static_cast<double>(covered) / static_cast<double>(checks);
    std::ostringstream d;
    d << "covered " << covered << "/" << checks << " = " << frac << " (want >= "
      << 1.0 - s.config.delta << ")";
    detail = d.str();
    return frac >= 1.0 - s.config.delta;
}

// 9. regret grows sublinearly and the policy approaches the optimum
bool regret_sublinearity(std::string& detail) {
    const Scenario s = load_scenario(std::string(IB_SCENARIO_DIR) + "/reference.json");
    const int reps = 10;
    const auto results = run_experiment(s, s.agent, reps, s.config.seed);
    int good = 0;
    std::ostringstream d;
    for (const auto& r : results) {
        const bool exp_ok = !r.regret_exponent.has_value() || *r.regret_exponent <= 0.75;
        const bool reward_ok = r.mean_reward_last_10pct >= 0.9 * r.opt_value;
        if (exp_ok && reward_ok) ++good;
        d << (exp_ok && reward_ok ? " ok" : " BAD") << "(";
        if (r.regret_exponent)
            d << "e=" << std::round(*r.regret_exponent * 100) / 100;
        else
            d << "e=-";
        d << ",r=" << std::round(r.mean_reward_last_10pct / r.opt_value * 100) / 100 << ")";
    }
    detail = std::to_string(good) + "/10 replications pass:" + d.str();
    return good >= 8;
}

// 10. identical seeds produce byte-identical outputs
bool determinism(std::string& detail) {
    Scenario s = load_scenario(std::string(IB_SCENARIO_DIR) + "/small.json");
    const auto baselines = run_baselines(s);
    std::string first;
    for (int run = 0; run < 2; ++run) {
        const auto results = run_experiment(s, s.agent, 2, 99);
        std::ostringstream buf;
        for (const auto& r : results) write_results_csv(buf, r);
        write_summary_csv(buf, results, baselines);
        if (run == 0)
            first = buf.str();
        else if (buf.str() != first) {
            detail = "outputs differ between identical runs";
            return false;
        }
    }
    detail = "two identical runs, byte-identical CSV (" + std::to_string(first.size()) +
             " bytes)";
    return true;
}

}  // namespace

int main() {
    criterion(1, "poisson moment identities", poisson_moment_identities);
    criterion(2, "pamm exact inversion", pamm_exact_inversion);
    criterion(3, "pamm consistency and rate", pamm_consistency_rate);
    criterion(4, "planner oracle equivalence", planner_oracle_equivalence);
    criterion(5, "evaluator vs environment", evaluator_vs_environment);
    criterion(6, "empirical cdf dkw band", empirical_cdf_dkw);
    criterion(7, "planner monotonicity in beta", planner_monotonicity);
    criterion(8, "confidence coverage", confidence_coverage);
    criterion(9, "regret sublinearity", regret_sublinearity);
    criterion(10, "determinism", determinism);

    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria failed\n", failures);
    return 1;
}
