#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ib {

enum class AuctionFormat { second_price, first_price };

std::string to_string(AuctionFormat f);
AuctionFormat auction_format_from_string(const std::string& s);

// Finite bidding space on [0,1]. Must be sorted, distinct, and contain both
// endpoints: 0 lets the bidder sit out a round, 1 always wins under the
// ties-to-the-learner rule.
struct BidGrid {
    std::vector<double> bids;

    static BidGrid uniform(int points);

    std::size_t size() const { return bids.size(); }
    double operator[](std::size_t i) const { return bids[i]; }

    // Membership with a small tolerance so values that round-tripped through
    // text formats still count as grid points.
    bool contains(double b) const;
    int index_of(double b) const;  // -1 if absent
};

// Known a-priori bounds on the incrementality parameters; the learner is
// given these, never the parameters themselves.
struct ParamBounds {
    double c_beta = 0.0;
    double C_beta = 1.0;
    double c_lambda = 0.0;
    double C_lambda = 0.0;
    double C_T = 1.0;
};

// Ground-truth (or estimated) incrementality parameters: a triangular matrix
// beta_h(l) for 1 <= l <= h <= H, and a per-round decay rate lambda_h.
// beta_h(l) is the expected number of conversions triggered by a win at
// round h when the previous win was l rounds earlier (round 0 counts as a
// win, so the first win at round h has gap l = h).
struct IncrementalityParams {
    std::vector<std::vector<double>> beta;  // beta[h-1][l-1], l in 1..h
    std::vector<double> lambda;             // lambda[h-1]
    ParamBounds bounds;

    int rounds() const { return static_cast<int>(lambda.size()); }

    // Checked access; asking for l > h is a programming error, not a default.
    double beta_at(int h, int l) const;
    double lambda_at(int h) const;
};

struct ScenarioConfig {
    int rounds = 0;     // H
    int episodes = 0;   // T
    double value_per_conversion = 1.0;
    AuctionFormat auction = AuctionFormat::second_price;
    BidGrid grid;
    std::uint64_t seed = 0;
    double delta = 0.05;
};

// Full-information record of one finished episode. `conversions` holds only
// timestamps below H+1; that is all any estimator window ever reads.
struct EpisodeLog {
    std::vector<int> wins;            // ordered winning rounds
    std::vector<double> conversions;  // sorted timestamps in [0, H+1)
    std::vector<double> hobs;         // m_h, size H
    std::vector<double> bids;         // b_h, size H
    std::vector<int> states;          // l_h visited, size H
    std::vector<double> payments;     // parallel to wins
};

// Deterministic table policy: a bid for every reachable (round, state) pair.
struct Policy {
    std::vector<std::vector<double>> table;  // table[h-1][l-1], l in 1..h

    static Policy constant(int rounds, double bid);

    int rounds() const { return static_cast<int>(table.size()); }
    double bid(int h, int l) const;
    void set(int h, int l, double b);
};

// State update of the win-gap MDP: a win resets the gap, a loss grows it.
inline int state_transition(int state, bool won) {
    if (state < 1) throw std::invalid_argument("state_transition: state must be >= 1");
    return won ? 1 : state + 1;
}

// Checks every structural invariant of a scenario; returns one message per
// violation (empty means valid).
std::vector<std::string> validate_scenario(const ScenarioConfig& config,
                                           const IncrementalityParams& params);

}  // namespace ib
