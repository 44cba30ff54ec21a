#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "ib/hob.hpp"
#include "ib/types.hpp"

namespace ib {

// Outcome of one simulated episode. The realized utility values every
// conversion the win set generates (the process extends past the episode
// window), while the log truncates timestamps to [0, H+1), which is all the
// estimator ever observes.
struct EnvOutcome {
    EpisodeLog log;
    long long conversions_total = 0;  // including those past H+1
    double realized_utility = 0.0;
};

// Runs one episode under a table policy. Policy bids must lie on the grid.
EnvOutcome run_episode(const Policy& policy, const HobModel& hob,
                       const IncrementalityParams& params, const ScenarioConfig& config,
                       std::mt19937_64& rng);

// Runs one episode under an explicit per-round bid vector (no grid check).
EnvOutcome run_episode(std::span<const double> bids, const HobModel& hob,
                       const IncrementalityParams& params, const ScenarioConfig& config,
                       std::mt19937_64& rng);

// Independent episodes with per-episode RNG streams derived from `seed`;
// bitwise deterministic given (seed, inputs).
std::vector<EnvOutcome> run_batch(const std::function<const Policy&(int)>& policy_for_episode,
                                  int count, const HobModel& hob,
                                  const IncrementalityParams& params,
                                  const ScenarioConfig& config, std::uint64_t seed);

std::vector<EnvOutcome> run_batch(const Policy& policy, int count, const HobModel& hob,
                                  const IncrementalityParams& params,
                                  const ScenarioConfig& config, std::uint64_t seed);

// Line-delimited JSON trace for estimator replay: one object per episode with
// fields t, bids, hobs, wins, conversions.
void write_trace(std::ostream& out, std::span<const EnvOutcome> outcomes);
std::vector<EpisodeLog> read_trace(std::istream& in);

}  // namespace ib
