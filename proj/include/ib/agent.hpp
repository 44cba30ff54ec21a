#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ib/hob.hpp"
#include "ib/pamm.hpp"
#include "ib/planner.hpp"
#include "ib/types.hpp"

namespace ib {

struct AgentConfig {
    double delta = 0.05;
    double bernstein_c = 0.5;  // absolute constant c' of the concentration bound
    double kappa = 1.0;        // multiplier on the confidence widths
    std::optional<long long> exploration_override;  // replaces the theoretical threshold
    ParamBounds bounds;        // known a priori
};

struct ConstantsBundle {
    double C0 = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    long long exploration_threshold = 0;
};

// Number of wins each (h, l) cell must reach before pure exploration stops:
// ceil(log(4T/delta) / C0).
long long exploration_threshold(double C0, long long episodes, double delta);

// Theory constants from the known parameter bounds. C1/C2 scale the
// estimation-error widths, C0 sets the admissible confidence range and hence
// the exploration threshold.
ConstantsBundle compute_constants(const AgentConfig& config, long long episodes);

// Lexicographically smallest (h, l) whose win count is below the threshold.
std::optional<std::pair<int, int>> needs_exploration(
    const std::vector<std::vector<long long>>& counts, long long threshold);

// Pure-exploration bid vector targeting (h, l): bid 1 at rounds h-l and h,
// 0 elsewhere. When l = h the earlier round is the fictitious win at round 0,
// so only round h gets a 1.
std::vector<double> exploration_bids(int h, int l, int rounds);

// kappa_c2 * sqrt(log_term / n)
double confidence_width(double kappa_c2, double log_term, long long n);

// The sequential decision loop: pure exploration until every (h, l) win
// count clears the threshold, then optimistic replanning against the PAMM
// estimates and the empirical HOB model each episode.
class OnlineAgent {
  public:
    OnlineAgent(const ScenarioConfig& scenario, const AgentConfig& config);

    struct Decision {
        bool exploring = false;
        int target_round = 0;
        int target_gap = 0;
        std::vector<double> bids;  // set when exploring
        Policy policy;             // set when exploiting
    };

    // Bids for the upcoming episode. Exploitation decisions replan from all
    // data ingested so far.
    Decision decide();

    // Ingests a finished episode: matcher, empirical HOBs, and win counts.
    void update(const EpisodeLog& log);

    // Optimistic plan; requires every (h, l) win count to be at least 1.
    Policy next_policy() const;

    // Inflated beta table the optimistic plan uses: estimate (or the prior
    // upper bound where no pair has matched yet) plus the confidence width,
    // capped at 1.
    BetaTable optimistic_beta() const;

    double confidence_radius(int h, int l) const;

    long long win_count(int h, int l) const;
    long long episodes_seen() const { return episodes_seen_; }
    long long exploration_episodes() const { return exploration_episodes_; }
    const ConstantsBundle& constants() const { return constants_; }
    const HobModel& empirical_hob() const { return hob_; }
    const MatchState& matcher() const { return matcher_; }
    PammEstimate estimates() const;

  private:
    ScenarioConfig scenario_;
    AgentConfig config_;
    ConstantsBundle constants_;
    MatchState matcher_;
    HobModel hob_;
    std::vector<std::vector<long long>> win_counts_;
    long long episodes_seen_ = 0;
    long long exploration_episodes_ = 0;
};

}  // namespace ib
