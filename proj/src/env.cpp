#include "ib/env.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "ib/conversion.hpp"
#include "ib/rng.hpp"

namespace ib {

namespace {

EnvOutcome run_episode_impl(const std::function<double(int, int)>& bid_for, const HobModel& hob,
                            const IncrementalityParams& params, const ScenarioConfig& config,
                            std::mt19937_64& rng) {
    const int H = config.rounds;
    EnvOutcome out;
    EpisodeLog& log = out.log;
    log.bids.resize(H);
    log.hobs.resize(H);
    log.states.resize(H);

    int state = 1;
    for (int h = 1; h <= H; ++h) {
        log.states[h - 1] = state;
        const double b = bid_for(h, state);
        const double m = hob.sample(h, rng);
        log.bids[h - 1] = b;
        log.hobs[h - 1] = m;
        const bool won = b >= m;  // ties go to the learner
        if (won) {
            log.wins.push_back(h);
            log.payments.push_back(config.auction == AuctionFormat::second_price ? m : b);
        }
        state = state_transition(state, won);
    }

    const auto records = win_records(log.wins);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> all = sample_conversions(records, params, inf, rng);
    out.conversions_total = static_cast<long long>(all.size());

    const double horizon = H + 1.0;
    auto cut = std::lower_bound(all.begin(), all.end(), horizon);
    log.conversions.assign(all.begin(), cut);

    double paid = 0.0;
    for (double p : log.payments) paid += p;
    out.realized_utility =
        config.value_per_conversion * static_cast<double>(out.conversions_total) - paid;
    return out;
}

}  // namespace

EnvOutcome run_episode(const Policy& policy, const HobModel& hob,
                       const IncrementalityParams& params, const ScenarioConfig& config,
                       std::mt19937_64& rng) {
    if (policy.rounds() != config.rounds)
        throw std::invalid_argument("run_episode: policy does not match rounds");
    return run_episode_impl(
        [&](int h, int l) {
            const double b = policy.bid(h, l);
            if (!config.grid.contains(b))
                throw std::invalid_argument("run_episode: policy bid off grid");
            return b;
        },
        hob, params, config, rng);
}

EnvOutcome run_episode(std::span<const double> bids, const HobModel& hob,
                       const IncrementalityParams& params, const ScenarioConfig& config,
                       std::mt19937_64& rng) {
    if (static_cast<int>(bids.size()) != config.rounds)
        throw std::invalid_argument("run_episode: bid vector does not match rounds");
    return run_episode_impl([&](int h, int) { return bids[h - 1]; }, hob, params, config, rng);
}

std::vector<EnvOutcome> run_batch(const std::function<const Policy&(int)>& policy_for_episode,
                                  int count, const HobModel& hob,
                                  const IncrementalityParams& params, const ScenarioConfig& config,
                                  std::uint64_t seed) {
    std::vector<EnvOutcome> out;
    out.reserve(count);
    for (int t = 0; t < count; ++t) {
        auto rng = make_engine(seed, static_cast<std::uint64_t>(t));
        out.push_back(run_episode(policy_for_episode(t), hob, params, config, rng));
    }
    return out;
}

std::vector<EnvOutcome> run_batch(const Policy& policy, int count, const HobModel& hob,
                                  const IncrementalityParams& params, const ScenarioConfig& config,
                                  std::uint64_t seed) {
    return run_batch([&](int) -> const Policy& { return policy; }, count, hob, params, config,
                     seed);
}

void write_trace(std::ostream& out, std::span<const EnvOutcome> outcomes) {
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
        const EpisodeLog& log = outcomes[t].log;
        nlohmann::json j;
        j["t"] = t + 1;
        j["bids"] = log.bids;
        j["hobs"] = log.hobs;
        j["wins"] = log.wins;
        j["conversions"] = log.conversions;
        out << j.dump() << '\n';
    }
}

std::vector<EpisodeLog> read_trace(std::istream& in) {
    std::vector<EpisodeLog> logs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        EpisodeLog log;
        log.bids = j.at("bids").get<std::vector<double>>();
        log.hobs = j.at("hobs").get<std::vector<double>>();
        log.wins = j.at("wins").get<std::vector<int>>();
        log.conversions = j.at("conversions").get<std::vector<double>>();
        // states are implied by the win set
        int state = 1;
        log.states.resize(log.bids.size());
        auto win_it = log.wins.begin();
        for (int h = 1; h <= static_cast<int>(log.bids.size()); ++h) {
            log.states[h - 1] = state;
            const bool won = win_it != log.wins.end() && *win_it == h;
            if (won) ++win_it;
            state = state_transition(state, won);
        }
        logs.push_back(std::move(log));
    }
    return logs;
}

}  // namespace ib
