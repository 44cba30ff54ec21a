#include "ib/agent.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ib {

long long exploration_threshold(double C0, long long episodes, double delta) {
    if (!(C0 > 0.0)) throw std::invalid_argument("exploration_threshold: C0 must be positive");
    if (episodes < 1 || !(delta > 0.0 && delta < 0.5))
        throw std::invalid_argument("exploration_threshold: bad T or delta");
    return static_cast<long long>(
        std::ceil(std::log(4.0 * static_cast<double>(episodes) / delta) / C0));
}

ConstantsBundle compute_constants(const AgentConfig& config, long long episodes) {
    const ParamBounds& b = config.bounds;
    if (!(b.c_beta > 0.0 && b.c_lambda > 0.0 && b.C_T > 0.0 && config.bernstein_c > 0.0))
        throw std::invalid_argument("compute_constants: bounds must be positive");

    const double w = 1.0 - std::exp(-b.c_lambda / 2.0);  // half-window retention gap
    const double root_c = std::sqrt(config.bernstein_c);

    ConstantsBundle out;
    out.C1 = 12.0 * std::sqrt(3.0) * b.C_T / (b.c_beta * w * root_c);
    out.C2 = (18.0 + 10.0 / b.c_beta) / (w * w * w * w) * std::sqrt(3.0) * b.C_T / root_c;
    out.C0 = config.bernstein_c *
             std::min({4.0, b.c_beta * b.c_beta * w * w * w * w / (64.0 * b.C_T * b.C_T),
                       b.c_beta * w / (3.0 * b.C_T)});
    out.exploration_threshold = config.exploration_override
                                    ? *config.exploration_override
                                    : exploration_threshold(out.C0, episodes, config.delta);
    if (out.exploration_threshold < 1)
        throw std::invalid_argument("compute_constants: threshold must be >= 1");
    return out;
}

std::optional<std::pair<int, int>> needs_exploration(
    const std::vector<std::vector<long long>>& counts, long long threshold) {
    for (std::size_t h = 0; h < counts.size(); ++h)
        for (std::size_t l = 0; l < counts[h].size(); ++l)
            if (counts[h][l] < threshold)
                return std::make_pair(static_cast<int>(h + 1), static_cast<int>(l + 1));
    return std::nullopt;
}

std::vector<double> exploration_bids(int h, int l, int rounds) {
    if (l < 1 || l > h || h > rounds)
        throw std::invalid_argument("exploration_bids: need 1 <= l <= h <= rounds");
    std::vector<double> bids(rounds, 0.0);
    bids[h - 1] = 1.0;
    if (l < h) bids[h - l - 1] = 1.0;
    return bids;
}

double confidence_width(double kappa_c2, double log_term, long long n) {
    if (n <= 0) return std::numeric_limits<double>::infinity();
    return kappa_c2 * std::sqrt(log_term / static_cast<double>(n));
}

OnlineAgent::OnlineAgent(const ScenarioConfig& scenario, const AgentConfig& config)
    : scenario_(scenario),
      config_(config),
      constants_(compute_constants(config, scenario.episodes)),
      matcher_(scenario.rounds),
      hob_(HobModel::empirical(scenario.rounds)) {
    hob_.attach_grid(scenario_.grid);
    win_counts_.resize(scenario_.rounds);
    for (int h = 1; h <= scenario_.rounds; ++h) win_counts_[h - 1].assign(h, 0);
}

OnlineAgent::Decision OnlineAgent::decide() {
    Decision d;
    const auto target = needs_exploration(win_counts_, constants_.exploration_threshold);
    if (target) {
        d.exploring = true;
        d.target_round = target->first;
        d.target_gap = target->second;
        d.bids = exploration_bids(target->first, target->second, scenario_.rounds);
        ++exploration_episodes_;
    } else {
        d.policy = next_policy();
    }
    return d;
}

void OnlineAgent::update(const EpisodeLog& log) {
    if (static_cast<int>(log.hobs.size()) != scenario_.rounds)
        throw std::invalid_argument("agent update: log does not match rounds");
    matcher_.ingest_episode(log);
    for (int h = 1; h <= scenario_.rounds; ++h) hob_.ingest(h, log.hobs[h - 1]);
    int prev = 0;
    for (int w : log.wins) {
        ++win_counts_[w - 1][w - prev - 1];
        prev = w;
    }
    ++episodes_seen_;
}

double OnlineAgent::confidence_radius(int h, int l) const {
    const double log_term =
        std::log(static_cast<double>(scenario_.episodes) / config_.delta);
    return confidence_width(config_.kappa * constants_.C2, log_term, win_count(h, l));
}

BetaTable OnlineAgent::optimistic_beta() const {
    const PammEstimate est = snapshot(matcher_, config_.bounds);
    BetaTable beta(scenario_.rounds);
    for (int h = 1; h <= scenario_.rounds; ++h) {
        beta[h - 1].resize(h);
        for (int l = 1; l <= h; ++l) {
            const auto& c = est.beta[h - 1][l - 1];
            const double center = c.available ? c.value : config_.bounds.C_beta;
            beta[h - 1][l - 1] = std::min(1.0, center + confidence_radius(h, l));
        }
    }
    return beta;
}

Policy OnlineAgent::next_policy() const {
    for (int h = 1; h <= scenario_.rounds; ++h)
        for (int l = 1; l <= h; ++l)
            if (win_counts_[h - 1][l - 1] < 1)
                throw std::logic_error("next_policy: unvisited (h,l) cell");
    const BetaTable beta = optimistic_beta();
    return plan({beta, hob_, scenario_.value_per_conversion, scenario_.grid, scenario_.auction,
                 scenario_.rounds})
        .policy;
}

long long OnlineAgent::win_count(int h, int l) const {
    if (h < 1 || h > scenario_.rounds || l < 1 || l > h)
        throw std::out_of_range("win_count: cell out of range");
    return win_counts_[h - 1][l - 1];
}

PammEstimate OnlineAgent::estimates() const { return snapshot(matcher_, config_.bounds); }

}  // namespace ib
