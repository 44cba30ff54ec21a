#pragma once

#include <deque>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "ib/types.hpp"

namespace ib {

// Running sums of the differenced window counts X and Y for one (round, gap)
// cell, plus the number of matched pairs behind them.
struct PairStats {
    double sum_x = 0.0;
    double sum_y = 0.0;
    long long pairs = 0;
};

// Online pairwise matching over episode logs.
//
// At every level h an arriving episode is either a winner (it won round h) or
// a candidate (it did not). A winner pairs with the oldest candidate whose
// winning rounds before h are identical to its own and whose next win comes
// after h; differencing the two episodes' conversion counts on [h, h+1/2) and
// [h+1/2, h+1) cancels everything the shared prefix contributes, isolating
// round h's parameters. Unmatched winners stay queued and may pair with later
// episodes; a candidate is consumed at most once per level but can serve many
// levels.
//
// Only sufficient statistics are kept per (h, gap) cell, so estimates depend
// on window counts alone and ingestion is a single pass over the data.
class MatchState {
  public:
    explicit MatchState(int rounds);

    void ingest_episode(const EpisodeLog& log);

    int rounds() const { return static_cast<int>(stats_.size()); }

    long long pair_count(int h) const;         // n_h
    long long pair_count(int h, int l) const;  // n_h(l)
    const PairStats& cell(int h, int l) const;
    PairStats level(int h) const;  // aggregated over gaps

    // Seeds a cell's sufficient statistics directly (replay of externally
    // matched pairs).
    void inject(int h, int l, double sum_x, double sum_y, long long pairs);

  private:
    struct WaitingWinner {
        int n_first = 0;   // conversions in [h, h+1/2)
        int n_second = 0;  // conversions in [h+1/2, h+1)
        int gap = 0;
    };
    struct Candidate {
        int n_first = 0;
        int n_second = 0;
    };
    struct Level {
        std::unordered_map<std::string, std::deque<WaitingWinner>> winners;
        std::unordered_map<std::string, std::deque<Candidate>> candidates;
    };

    void add_pair(int h, int l, int x, int y);

    std::vector<Level> levels_;
    std::vector<std::vector<PairStats>> stats_;  // [h-1][l-1]
};

// Moment inversion for the half-window means: the decay rate from the ratio,
// the pulse mass from the normalized square.
double invert_lambda(double mu, double eta);  // 2 (log mu - log eta)
double invert_beta(double mu, double eta);    // mu^2 / (mu - eta)

struct ScalarEstimate {
    double value = 0.0;
    long long pairs = 0;
    // True when the sample moments were unusable (nonpositive or inverted
    // order) and the estimate fell back to a protected constant.
    bool fallback = false;
};

// Decay-rate estimate for round h from the level-h aggregates, clamped to
// [c_lambda, C_lambda]; the protected fallback is the clamp midpoint.
// Requires at least one matched pair.
ScalarEstimate estimate_lambda(int h, const MatchState& state, const ParamBounds& bounds);

// Pulse-mass estimate for (h, l), clamped to [c_beta, C_beta]; the protected
// fallback is c_beta. Requires at least one matched pair in the cell.
ScalarEstimate estimate_beta(int h, int l, const MatchState& state, const ParamBounds& bounds);

struct PammEstimate {
    struct Cell {
        double value = 0.0;
        long long pairs = 0;
        bool available = false;
        bool fallback = false;
    };
    std::vector<Cell> lambda;              // [h-1]
    std::vector<std::vector<Cell>> beta;   // [h-1][l-1]
};

// Applies the estimators across every cell; cells without pairs are marked
// unavailable. Pure function of the sufficient statistics.
PammEstimate snapshot(const MatchState& state, const ParamBounds& bounds);

void write_beta_csv(std::ostream& out, const PammEstimate& est);
void write_lambda_csv(std::ostream& out, const PammEstimate& est);

}  // namespace ib
