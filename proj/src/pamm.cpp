#include "ib/pamm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ib/conversion.hpp"

namespace ib {

MatchState::MatchState(int rounds) {
    if (rounds < 1) throw std::invalid_argument("MatchState: rounds must be >= 1");
    if (rounds > 255) throw std::invalid_argument("MatchState: rounds > 255 unsupported");
    levels_.resize(rounds);
    stats_.resize(rounds);
    for (int h = 1; h <= rounds; ++h) stats_[h - 1].resize(h);
}

void MatchState::add_pair(int h, int l, int x, int y) {
    PairStats& s = stats_[h - 1][l - 1];
    s.sum_x += x;
    s.sum_y += y;
    s.pairs += 1;
}

void MatchState::ingest_episode(const EpisodeLog& log) {
    const int H = rounds();
    {
        int prev = 0;
        for (int w : log.wins) {
            if (w <= prev || w > H)
                throw std::invalid_argument("ingest_episode: malformed win set");
            prev = w;
        }
        if (!std::is_sorted(log.conversions.begin(), log.conversions.end()))
            throw std::invalid_argument("ingest_episode: conversions not sorted");
    }

    std::string prefix;
    prefix.reserve(log.wins.size());
    std::size_t win_idx = 0;
    int last_win = 0;

    for (int h = 1; h <= H; ++h) {
        const int n_first = count_in(log.conversions, h, h + 0.5);
        const int n_second = count_in(log.conversions, h + 0.5, h + 1.0);
        Level& lvl = levels_[h - 1];

        const bool wins_here = win_idx < log.wins.size() && log.wins[win_idx] == h;
        if (wins_here) {
            const int gap = h - last_win;
            auto it = lvl.candidates.find(prefix);
            if (it != lvl.candidates.end() && !it->second.empty()) {
                const Candidate c = it->second.front();
                it->second.pop_front();
                add_pair(h, gap, n_first - c.n_first, n_second - c.n_second);
            } else {
                lvl.winners[prefix].push_back({n_first, n_second, gap});
            }
            last_win = h;
            prefix.push_back(static_cast<char>(h));
            ++win_idx;
        } else {
            // This episode's next win (if any) is past h, so it qualifies as
            // a partner for any waiting winner with the same prefix.
            auto it = lvl.winners.find(prefix);
            if (it != lvl.winners.end() && !it->second.empty()) {
                const WaitingWinner w = it->second.front();
                it->second.pop_front();
                add_pair(h, w.gap, w.n_first - n_first, w.n_second - n_second);
            } else {
                lvl.candidates[prefix].push_back({n_first, n_second});
            }
        }
    }
}

long long MatchState::pair_count(int h) const { return level(h).pairs; }

long long MatchState::pair_count(int h, int l) const { return cell(h, l).pairs; }

const PairStats& MatchState::cell(int h, int l) const {
    if (h < 1 || h > rounds() || l < 1 || l > h)
        throw std::out_of_range("MatchState: cell (" + std::to_string(h) + "," +
                                std::to_string(l) + ") out of range");
    return stats_[h - 1][l - 1];
}

PairStats MatchState::level(int h) const {
    if (h < 1 || h > rounds()) throw std::out_of_range("MatchState: round out of range");
    PairStats agg;
    for (const PairStats& s : stats_[h - 1]) {
        agg.sum_x += s.sum_x;
        agg.sum_y += s.sum_y;
        agg.pairs += s.pairs;
    }
    return agg;
}

void MatchState::inject(int h, int l, double sum_x, double sum_y, long long pairs) {
    if (h < 1 || h > rounds() || l < 1 || l > h)
        throw std::out_of_range("MatchState::inject: cell out of range");
    PairStats& s = stats_[h - 1][l - 1];
    s.sum_x += sum_x;
    s.sum_y += sum_y;
    s.pairs += pairs;
}

double invert_lambda(double mu, double eta) { return 2.0 * (std::log(mu) - std::log(eta)); }

double invert_beta(double mu, double eta) { return mu * mu / (mu - eta); }

ScalarEstimate estimate_lambda(int h, const MatchState& state, const ParamBounds& bounds) {
    const PairStats agg = state.level(h);
    if (agg.pairs == 0) throw std::invalid_argument("estimate_lambda: no matched pairs");
    const double mu = agg.sum_x / static_cast<double>(agg.pairs);
    const double eta = agg.sum_y / static_cast<double>(agg.pairs);
    ScalarEstimate est;
    est.pairs = agg.pairs;
    if (mu > 0.0 && eta > 0.0 && mu > eta) {
        est.value = std::clamp(invert_lambda(mu, eta), bounds.c_lambda, bounds.C_lambda);
    } else {
        est.value = 0.5 * (bounds.c_lambda + bounds.C_lambda);
        est.fallback = true;
    }
    return est;
}

ScalarEstimate estimate_beta(int h, int l, const MatchState& state, const ParamBounds& bounds) {
    const PairStats& s = state.cell(h, l);
    if (s.pairs == 0) throw std::invalid_argument("estimate_beta: no matched pairs");
    const double mu = s.sum_x / static_cast<double>(s.pairs);
    const double eta = s.sum_y / static_cast<double>(s.pairs);
    ScalarEstimate est;
    est.pairs = s.pairs;
    if (mu > 0.0 && mu > eta) {
        est.value = std::clamp(invert_beta(mu, eta), bounds.c_beta, bounds.C_beta);
    } else {
        est.value = bounds.c_beta;
        est.fallback = true;
    }
    return est;
}

PammEstimate snapshot(const MatchState& state, const ParamBounds& bounds) {
    const int H = state.rounds();
    PammEstimate out;
    out.lambda.resize(H);
    out.beta.resize(H);
    for (int h = 1; h <= H; ++h) {
        out.beta[h - 1].resize(h);
        if (state.pair_count(h) > 0) {
            const ScalarEstimate e = estimate_lambda(h, state, bounds);
            out.lambda[h - 1] = {e.value, e.pairs, true, e.fallback};
        }
        for (int l = 1; l <= h; ++l) {
            if (state.pair_count(h, l) > 0) {
                const ScalarEstimate e = estimate_beta(h, l, state, bounds);
                out.beta[h - 1][l - 1] = {e.value, e.pairs, true, e.fallback};
            }
        }
    }
    return out;
}

void write_beta_csv(std::ostream& out, const PammEstimate& est) {
    out << "h,l,beta_hat,n,protected\n";
    char buf[64];
    for (std::size_t h = 1; h <= est.beta.size(); ++h) {
        for (std::size_t l = 1; l <= est.beta[h - 1].size(); ++l) {
            const auto& c = est.beta[h - 1][l - 1];
            if (!c.available) continue;
            std::snprintf(buf, sizeof(buf), "%.17g", c.value);
            out << h << ',' << l << ',' << buf << ',' << c.pairs << ',' << (c.fallback ? 1 : 0)
                << '\n';
        }
    }
}

void write_lambda_csv(std::ostream& out, const PammEstimate& est) {
    out << "h,lambda_hat,n,protected\n";
    char buf[64];
    for (std::size_t h = 1; h <= est.lambda.size(); ++h) {
        const auto& c = est.lambda[h - 1];
        if (!c.available) continue;
        std::snprintf(buf, sizeof(buf), "%.17g", c.value);
        out << h << ',' << buf << ',' << c.pairs << ',' << (c.fallback ? 1 : 0) << '\n';
    }
}

}  // namespace ib
