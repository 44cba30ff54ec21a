#pragma once

#include <random>
#include <span>
#include <vector>

#include "ib/types.hpp"

namespace ib {

// One ad impression: the round it landed in and the gap since the previous
// win (round 0 counts as a win, so 1 <= gap <= round).
struct WinRecord {
    int round = 0;
    int gap = 0;
};

// Builds win records from an ordered list of winning rounds, gap measured
// against the previous win (or round 0).
std::vector<WinRecord> win_records(const std::vector<int>& wins);

// Conversion rate at time tau: the superposition of one exponentially
// decaying pulse per win, each supported on [round, infinity).
double rate_at(double tau, std::span<const WinRecord> wins, const IncrementalityParams& params);

// Exact integral of the rate over [a, b); b may be +infinity.
double expected_count(double a, double b, std::span<const WinRecord> wins,
                      const IncrementalityParams& params);

// Draws one realization of the conversion process, truncated to
// [0, horizon_end). Per win: a Poisson count of conversions, each delayed by
// an independent exponential; the union of pulses is an exact sample of the
// superposed inhomogeneous process.
std::vector<double> sample_conversions(std::span<const WinRecord> wins,
                                       const IncrementalityParams& params, double horizon_end,
                                       std::mt19937_64& rng);

// Number of timestamps in [a, b); `times` must be sorted ascending.
int count_in(std::span<const double> times, double a, double b);

}  // namespace ib
