// Command line front end: simulate episodes, replay traces through the
// estimator, plan against known parameters, and run full online-learning
// experiments with regret bookkeeping.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "ib/env.hpp"
#include "ib/experiment.hpp"
#include "ib/pamm.hpp"
#include "ib/planner.hpp"
#include "ib/rng.hpp"
#include "ib/scenario_io.hpp"

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
}

int cmd_simulate(const std::string& scenario_path, std::uint64_t seed, int episodes,
                 const std::string& policy_path, std::optional<double> fixed_bid,
                 const fs::path& out_dir) {
    const ib::Scenario s = ib::load_scenario(scenario_path);
    const int count = episodes > 0 ? episodes : s.config.episodes;

    ib::Policy policy;
    if (fixed_bid) {
        if (!s.config.grid.contains(*fixed_bid))
            throw std::runtime_error("--fixed-bid must be a grid point");
        policy = ib::Policy::constant(s.config.rounds, *fixed_bid);
    } else if (!policy_path.empty()) {
        std::ifstream in(policy_path);
        if (!in) throw std::runtime_error("cannot open policy file: " + policy_path);
        policy = ib::read_policy_csv(in);
    } else {
        // default: the oracle policy for the scenario's true parameters
        policy = ib::plan({s.params.beta, s.hob, s.config.value_per_conversion, s.config.grid,
                           s.config.auction, s.config.rounds})
                     .policy;
    }

    const auto outcomes = ib::run_batch(policy, count, s.hob, s.params, s.config, seed);
    auto out = open_out(out_dir, "trace.jsonl");
    ib::write_trace(out, outcomes);
    std::cout << "wrote " << count << " episodes to " << (out_dir / "trace.jsonl").string()
              << "\n";
    return 0;
}

int cmd_estimate(const std::string& scenario_path, const std::string& trace_path,
                 const fs::path& out_dir) {
    const ib::Scenario s = ib::load_scenario(scenario_path);
    std::ifstream in(trace_path);
    if (!in) throw std::runtime_error("cannot open trace file: " + trace_path);
    const auto logs = ib::read_trace(in);

    ib::MatchState state(s.config.rounds);
    for (const auto& log : logs) state.ingest_episode(log);
    const ib::PammEstimate est = ib::snapshot(state, s.params.bounds);

    auto beta_out = open_out(out_dir, "pamm_beta.csv");
    ib::write_beta_csv(beta_out, est);
    auto lambda_out = open_out(out_dir, "pamm_lambda.csv");
    ib::write_lambda_csv(lambda_out, est);
    std::cout << "ingested " << logs.size() << " episodes; estimates in "
              << out_dir.string() << "\n";
    return 0;
}

int cmd_plan(const std::string& scenario_path, const fs::path& out_dir) {
    const ib::Scenario s = ib::load_scenario(scenario_path);
    const auto result = ib::plan({s.params.beta, s.hob, s.config.value_per_conversion,
                                  s.config.grid, s.config.auction, s.config.rounds});
    auto policy_out = open_out(out_dir, "policy.csv");
    ib::write_policy_csv(policy_out, result.policy);
    auto value_out = open_out(out_dir, "value.csv");
    ib::write_value_csv(value_out, result.value);
    std::cout << "optimal value from initial state: " << result.optimal_value << "\n";
    return 0;
}

int cmd_run(const std::string& scenario_path, std::uint64_t seed, int replications,
            std::optional<double> kappa, std::optional<long long> explore_override,
            bool verbose, const fs::path& out_dir) {
    ib::Scenario s = ib::load_scenario(scenario_path);
    if (kappa) s.agent.kappa = *kappa;
    if (explore_override) s.agent.exploration_override = *explore_override;

    std::ofstream telemetry;
    if (verbose) telemetry = open_out(out_dir, "telemetry.jsonl");

    const auto results =
        ib::run_experiment(s, s.agent, replications, seed, verbose ? &telemetry : nullptr);
    const auto baselines = ib::run_baselines(s);

    for (const auto& r : results) {
        auto out = open_out(out_dir, "results_rep" + std::to_string(r.replication) + ".csv");
        ib::write_results_csv(out, r);
    }
    auto summary = open_out(out_dir, "summary.csv");
    ib::write_summary_csv(summary, results, baselines);

    std::cout << "opt=" << baselines.oracle_value << "\n";
    for (const auto& r : results) {
        std::cout << "replication " << r.replication << ": final_cum_regret="
                  << r.final_cum_regret << " exploration_episodes=" << r.exploration_episodes
                  << " mean_reward_last_10pct=" << r.mean_reward_last_10pct;
        if (r.regret_exponent) std::cout << " regret_exponent=" << *r.regret_exponent;
        std::cout << "\n";
    }
    return 0;
}

int cmd_baselines(const std::string& scenario_path, const fs::path& out_dir) {
    const ib::Scenario s = ib::load_scenario(scenario_path);
    const auto report = ib::run_baselines(s);
    auto out = open_out(out_dir, "baselines.csv");
    out << "baseline,bid,value\n";
    out << "oracle,," << report.oracle_value << "\n";
    out << "best_fixed," << report.best_fixed_bid << ',' << report.best_fixed_value << "\n";
    out << "random,," << report.random_value << "\n";
    std::cout << "oracle=" << report.oracle_value << " best_fixed=" << report.best_fixed_value
              << " (bid " << report.best_fixed_bid << ") random=" << report.random_value << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"incrementality bidding: simulation, estimation, planning, online learning"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string trace_path;
    std::string policy_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int replications = 1;
    int episodes = 0;
    bool verbose = false;
    std::optional<double> kappa;
    std::optional<long long> explore_override;
    std::optional<double> fixed_bid;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        cmd->add_option("--out", out_dir, "output directory");
    };

    auto* simulate = app.add_subcommand("simulate", "run episodes, write a JSONL trace");
    add_common(simulate);
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--episodes", episodes, "episode count (default: scenario T)");
    simulate->add_option("--policy", policy_path, "policy CSV to deploy");
    simulate->add_option("--fixed-bid", fixed_bid, "constant bid to deploy");

    auto* estimate = app.add_subcommand("estimate", "replay a trace through the estimator");
    add_common(estimate);
    estimate->add_option("--trace", trace_path, "JSONL trace file")->required();

    auto* plan_cmd = app.add_subcommand("plan", "optimal policy for the true parameters");
    add_common(plan_cmd);

    auto* run = app.add_subcommand("run", "full online-learning experiment");
    add_common(run);
    run->add_option("--seed", seed, "master seed");
    run->add_option("--replications", replications, "independent replications");
    run->add_option("--kappa", kappa, "confidence width multiplier override");
    run->add_option("--explore-override", explore_override, "exploration threshold override");
    run->add_flag("--verbose", verbose, "write per-episode telemetry JSONL");

    auto* baselines = app.add_subcommand("baselines", "exact baseline values");
    add_common(baselines);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return cmd_simulate(scenario_path, seed, episodes, policy_path, fixed_bid, out_dir);
        if (estimate->parsed()) return cmd_estimate(scenario_path, trace_path, out_dir);
        if (plan_cmd->parsed()) return cmd_plan(scenario_path, out_dir);
        if (run->parsed())
            return cmd_run(scenario_path, seed, replications, kappa, explore_override, verbose,
                           out_dir);
        if (baselines->parsed()) return cmd_baselines(scenario_path, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
