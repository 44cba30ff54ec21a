#include "ib/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ib/env.hpp"
#include "ib/planner.hpp"
#include "ib/rng.hpp"

namespace ib {

namespace {

Policy policy_from_bids(std::span<const double> bids) {
    Policy p;
    p.table.resize(bids.size());
    for (std::size_t h = 1; h <= bids.size(); ++h) p.table[h - 1].assign(h, bids[h - 1]);
    return p;
}

std::uint64_t hash_doubles(std::span<const double> xs) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (double x : xs) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(x));
        std::memcpy(&bits, &x, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

std::uint64_t policy_hash(const Policy& p) {
    std::uint64_t h = 0;
    for (const auto& row : p.table) h ^= hash_doubles(row) + 0x9e3779b97f4a7c15ULL + (h << 6);
    return h;
}

ReplicationResult run_replication(const Scenario& scenario, const AgentConfig& agent_cfg,
                                  int replication, std::uint64_t master_seed,
                                  std::ostream* telemetry) {
    const ScenarioConfig& cfg = scenario.config;
    const MdpSpec truth{scenario.params.beta, scenario.hob, cfg.value_per_conversion, cfg.grid,
                        cfg.auction, cfg.rounds};
    const double opt = plan(truth).optimal_value;

    ReplicationResult result;
    result.replication = replication;
    result.seed = derive_seed(master_seed, static_cast<std::uint64_t>(replication));
    result.opt_value = opt;
    result.rows.reserve(cfg.episodes);

    OnlineAgent agent(cfg, agent_cfg);
    double cum_regret = 0.0;
    for (long long t = 1; t <= cfg.episodes; ++t) {
        const auto decision = agent.decide();
        auto rng = make_engine(result.seed, static_cast<std::uint64_t>(t));

        double value;
        EnvOutcome outcome;
        if (decision.exploring) {
            value = evaluate_policy(policy_from_bids(decision.bids), truth);
            outcome = run_episode(decision.bids, scenario.hob, scenario.params, cfg, rng);
        } else {
            value = evaluate_policy(decision.policy, truth);
            outcome = run_episode(decision.policy, scenario.hob, scenario.params, cfg, rng);
        }
        cum_regret += opt - value;
        result.rows.push_back({replication, t, decision.exploring, value, opt, cum_regret,
                               outcome.realized_utility});
        agent.update(outcome.log);

        if (telemetry) {
            nlohmann::json j;
            j["t"] = t;
            j["phase"] = decision.exploring ? "explore" : "exploit";
            if (decision.exploring)
                j["target"] = {decision.target_round, decision.target_gap};
            else
                j["target"] = nullptr;
            j["policy_hash"] = decision.exploring ? hash_doubles(decision.bids)
                                                  : policy_hash(decision.policy);
            double max_radius = 0.0;
            for (int h = 1; h <= cfg.rounds; ++h)
                for (int l = 1; l <= h; ++l)
                    max_radius = std::max(max_radius, agent.confidence_radius(h, l));
            j["max_width"] = max_radius;
            *telemetry << j.dump() << '\n';
        }
    }

    result.exploration_episodes = agent.exploration_episodes();
    result.final_cum_regret = cum_regret;
    if (const auto fit = fit_regret_exponent(result.rows)) result.regret_exponent = fit->first;

    const long long tail_start = cfg.episodes - cfg.episodes / 10 + 1;
    double tail_sum = 0.0;
    long long tail_n = 0;
    for (const auto& row : result.rows)
        if (row.t >= tail_start) {
            tail_sum += row.policy_value;
            ++tail_n;
        }
    result.mean_reward_last_10pct = tail_n > 0 ? tail_sum / tail_n : 0.0;
    return result;
}

}  // namespace

std::vector<ReplicationResult> run_experiment(const Scenario& scenario, const AgentConfig& agent,
                                              int replications, std::uint64_t seed,
                                              std::ostream* telemetry) {
    if (replications < 1) throw std::invalid_argument("run_experiment: replications must be >= 1");
    std::vector<ReplicationResult> results(replications);

    const unsigned workers =
        telemetry ? 1 : std::min<unsigned>(std::thread::hardware_concurrency(), replications);
    if (workers <= 1) {
        for (int r = 0; r < replications; ++r)
            results[r] = run_replication(scenario, agent, r, seed, telemetry);
        return results;
    }

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next.fetch_add(1); r < replications; r = next.fetch_add(1))
            results[r] = run_replication(scenario, agent, r, seed, nullptr);
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return results;
}

ReplicationResult run_fixed_policy(const Scenario& scenario, const Policy& policy,
                                   std::uint64_t seed) {
    const ScenarioConfig& cfg = scenario.config;
    const MdpSpec truth{scenario.params.beta, scenario.hob, cfg.value_per_conversion, cfg.grid,
                        cfg.auction, cfg.rounds};
    ReplicationResult result;
    result.replication = 0;
    result.seed = derive_seed(seed, 0);
    result.opt_value = plan(truth).optimal_value;
    const double value = evaluate_policy(policy, truth);

    double cum_regret = 0.0;
    for (long long t = 1; t <= cfg.episodes; ++t) {
        auto rng = make_engine(result.seed, static_cast<std::uint64_t>(t));
        const auto outcome = run_episode(policy, scenario.hob, scenario.params, cfg, rng);
        cum_regret += result.opt_value - value;
        result.rows.push_back(
            {0, t, false, value, result.opt_value, cum_regret, outcome.realized_utility});
    }
    result.final_cum_regret = cum_regret;
    if (const auto fit = fit_regret_exponent(result.rows)) result.regret_exponent = fit->first;
    return result;
}

BaselineReport run_baselines(const Scenario& scenario) {
    const ScenarioConfig& cfg = scenario.config;
    const MdpSpec truth{scenario.params.beta, scenario.hob, cfg.value_per_conversion, cfg.grid,
                        cfg.auction, cfg.rounds};
    BaselineReport report;
    report.oracle_value = plan(truth).optimal_value;

    report.best_fixed_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        const double v = evaluate_policy(Policy::constant(cfg.rounds, cfg.grid[i]), truth);
        if (v > report.best_fixed_value) {
            report.best_fixed_value = v;
            report.best_fixed_bid = cfg.grid[i];
        }
    }

    // Uniform random grid bid each round: forward recursion with the
    // action-averaged transition and reward.
    const int H = cfg.rounds;
    std::vector<double> occ(H + 1, 0.0);
    occ[0] = 1.0;
    double total = 0.0;
    for (int h = 1; h <= H; ++h) {
        double mean_f = 0.0, mean_reward = 0.0;
        for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
            mean_f += scenario.hob.cdf(h, cfg.grid[i]);
        }
        mean_f /= static_cast<double>(cfg.grid.size());
        std::vector<double> next(H + 1, 0.0);
        for (int l = 1; l <= h; ++l) {
            const double mass = occ[l - 1];
            if (mass == 0.0) continue;
            mean_reward = 0.0;
            for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
                const double f = scenario.hob.cdf(h, cfg.grid[i]);
                const double pay = scenario.hob.payment(h, cfg.grid[i], cfg.auction);
                mean_reward +=
                    f * (scenario.params.beta[h - 1][l - 1] * cfg.value_per_conversion - pay);
            }
            mean_reward /= static_cast<double>(cfg.grid.size());
            total += mass * mean_reward;
            next[0] += mass * mean_f;
            next[l] += mass * (1.0 - mean_f);
        }
        occ = std::move(next);
    }
    report.random_value = total;
    return report;
}

std::optional<std::pair<double, double>> fit_regret_exponent(std::span<const EpisodeRow> rows) {
    if (rows.empty()) return std::nullopt;
    const long long total = rows.back().t;
    const long long start = total - (total * 8) / 10 + 1;  // last 80%
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long long n = 0;
    // regret at or below accumulation noise counts as zero
    constexpr double kRegretFloor = 1e-9;
    for (const auto& row : rows) {
        if (row.t < start) continue;
        if (!(row.cum_regret > kRegretFloor)) return std::nullopt;
        const double x = std::log(static_cast<double>(row.t));
        const double y = std::log(row.cum_regret);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::nullopt;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    return std::make_pair(slope, intercept);
}

namespace {
void put_double(std::ostream& out, double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out << buf;
}
}  // namespace

void write_results_csv(std::ostream& out, const ReplicationResult& result) {
    out << "replication,t,phase,policy_value,opt_value,cum_regret,realized_utility\n";
    for (const auto& row : result.rows) {
        out << row.replication << ',' << row.t << ','
            << (row.exploring ? "explore" : "exploit") << ',';
        put_double(out, row.policy_value);
        out << ',';
        put_double(out, row.opt_value);
        out << ',';
        put_double(out, row.cum_regret);
        out << ',';
        put_double(out, row.realized_utility);
        out << '\n';
    }
}

void write_summary_csv(std::ostream& out, std::span<const ReplicationResult> results,
                       const BaselineReport& baselines) {
    out << "replication,seed,opt_value,final_cum_regret,regret_exponent,"
           "mean_reward_last_10pct,exploration_episodes,best_fixed_bid,best_fixed_value,"
           "random_value\n";
    for (const auto& r : results) {
        out << r.replication << ',' << r.seed << ',';
        put_double(out, r.opt_value);
        out << ',';
        put_double(out, r.final_cum_regret);
        out << ',';
        put_double(out, r.regret_exponent ? *r.regret_exponent
                                          : std::numeric_limits<double>::quiet_NaN());
        out << ',';
        put_double(out, r.mean_reward_last_10pct);
        out << ',' << r.exploration_episodes << ',';
        put_double(out, baselines.best_fixed_bid);
        out << ',';
        put_double(out, baselines.best_fixed_value);
        out << ',';
        put_double(out, baselines.random_value);
        out << '\n';
    }
}

}  // namespace ib
