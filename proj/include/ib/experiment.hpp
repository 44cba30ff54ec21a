#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ib/agent.hpp"
#include "ib/scenario_io.hpp"

namespace ib {

struct EpisodeRow {
    int replication = 0;
    long long t = 0;
    bool exploring = false;
    double policy_value = 0.0;  // exact expected utility of the deployed bids under the truth
    double opt_value = 0.0;
    double cum_regret = 0.0;
    double realized_utility = 0.0;
};

struct ReplicationResult {
    int replication = 0;
    std::uint64_t seed = 0;
    double opt_value = 0.0;
    std::vector<EpisodeRow> rows;
    long long exploration_episodes = 0;
    double final_cum_regret = 0.0;
    std::optional<double> regret_exponent;
    double mean_reward_last_10pct = 0.0;
};

struct BaselineReport {
    double oracle_value = 0.0;
    double best_fixed_bid = 0.0;
    double best_fixed_value = 0.0;
    double random_value = 0.0;  // uniform random grid bid each round, evaluated exactly
};

// Runs the online bidding loop against the ground-truth environment.
// Regret bookkeeping is exact: each episode's deployed behavior (exploration
// bid vector or planned policy) is evaluated in closed form under the true
// parameters, never by Monte Carlo. Deterministic given (scenario, config,
// seed); `telemetry`, when given, receives one JSON line per episode and
// forces sequential execution.
std::vector<ReplicationResult> run_experiment(const Scenario& scenario, const AgentConfig& agent,
                                              int replications, std::uint64_t seed,
                                              std::ostream* telemetry = nullptr);

// Same bookkeeping with one fixed policy deployed every episode; used for
// baseline regret curves (the oracle policy gives identically zero regret).
ReplicationResult run_fixed_policy(const Scenario& scenario, const Policy& policy,
                                   std::uint64_t seed);

BaselineReport run_baselines(const Scenario& scenario);

// Least-squares slope/intercept of log(cum_regret) against log(t) over the
// last 80% of episodes; empty when regret is not positive (beyond float
// accumulation noise) everywhere in that range.
std::optional<std::pair<double, double>> fit_regret_exponent(std::span<const EpisodeRow> rows);

void write_results_csv(std::ostream& out, const ReplicationResult& result);
void write_summary_csv(std::ostream& out, std::span<const ReplicationResult> results,
                       const BaselineReport& baselines);

}  // namespace ib
