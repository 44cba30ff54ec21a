#include "ib/conversion.hpp"

#include <algorithm>
#include <cmath>

namespace ib {

std::vector<WinRecord> win_records(const std::vector<int>& wins) {
    std::vector<WinRecord> out;
    out.reserve(wins.size());
    int prev = 0;
    for (int w : wins) {
        if (w <= prev) throw std::invalid_argument("win_records: rounds must be increasing");
        out.push_back({w, w - prev});
        prev = w;
    }
    return out;
}

namespace {

// Rounds must be nondecreasing and each gap in [1, round]. Duplicated rounds
// are allowed: the rate is a plain sum, and tests superpose hypothetical wins.
void check_wins(std::span<const WinRecord> wins, const IncrementalityParams& params) {
    int prev = 0;
    for (const auto& w : wins) {
        if (w.round < 1 || w.round > params.rounds() || w.round < prev || w.gap < 1 ||
            w.gap > w.round)
            throw std::invalid_argument("inconsistent win record");
        prev = w.round;
    }
}

}  // namespace

double rate_at(double tau, std::span<const WinRecord> wins, const IncrementalityParams& params) {
    check_wins(wins, params);
    if (tau < 0.0) throw std::invalid_argument("rate_at: tau must be >= 0");
    double rate = 0.0;
    for (const auto& w : wins) {
        if (tau < w.round) continue;
        const double beta = params.beta_at(w.round, w.gap);
        const double lam = params.lambda_at(w.round);
        rate += beta * lam * std::exp(-(tau - w.round) * lam);
    }
    return rate;
}

double expected_count(double a, double b, std::span<const WinRecord> wins,
                      const IncrementalityParams& params) {
    check_wins(wins, params);
    if (!(a >= 0.0) || !(a <= b)) throw std::invalid_argument("expected_count: need 0 <= a <= b");
    double total = 0.0;
    for (const auto& w : wins) {
        if (b <= w.round) continue;
        const double beta = params.beta_at(w.round, w.gap);
        const double lam = params.lambda_at(w.round);
        const double lo = std::max(a - w.round, 0.0);
        const double hi = b - w.round;  // > 0; exp(-inf) underflows to 0 for b = inf
        total += beta * (std::exp(-lam * lo) - std::exp(-lam * hi));
    }
    return total;
}

std::vector<double> sample_conversions(std::span<const WinRecord> wins,
                                       const IncrementalityParams& params, double horizon_end,
                                       std::mt19937_64& rng) {
    check_wins(wins, params);
    std::vector<double> times;
    for (const auto& w : wins) {
        const double beta = params.beta_at(w.round, w.gap);
        const double lam = params.lambda_at(w.round);
        std::poisson_distribution<int> count(beta);
        std::exponential_distribution<double> delay(lam);
        const int k = count(rng);
        for (int i = 0; i < k; ++i) {
            const double t = w.round + delay(rng);
            if (t < horizon_end) times.push_back(t);
        }
    }
    std::sort(times.begin(), times.end());
    return times;
}

int count_in(std::span<const double> times, double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("count_in: need a <= b");
    auto lo = std::lower_bound(times.begin(), times.end(), a);
    auto hi = std::lower_bound(times.begin(), times.end(), b);
    return static_cast<int>(hi - lo);
}

}  // namespace ib
