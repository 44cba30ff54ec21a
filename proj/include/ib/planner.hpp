#pragma once

#include <iosfwd>
#include <vector>

#include "ib/hob.hpp"
#include "ib/types.hpp"

namespace ib {

// Triangular beta table, same layout as IncrementalityParams::beta. The
// planner only needs beta (the decay rate never enters the expected utility).
using BetaTable = std::vector<std::vector<double>>;

// Everything the finite-horizon MDP needs: states are win gaps l in 1..h,
// actions are grid bids, winning resets the gap and pays the conditional
// payment, losing grows the gap and pays nothing.
struct MdpSpec {
    const BetaTable& beta;
    const HobModel& hob;
    double value_per_conversion;
    const BidGrid& grid;
    AuctionFormat auction;
    int rounds;
};

struct PlanResult {
    Policy policy;
    std::vector<std::vector<double>> value;  // value[h-1][l-1] = V_h(l)
    double optimal_value = 0.0;              // V_1(1)
};

// Backward induction over the win-gap MDP. Ties at equal Bellman value go to
// the lowest bid.
PlanResult plan(const MdpSpec& spec);

// Exact expected total reward of a table policy under the spec, by forward
// recursion over the state distribution.
double evaluate_policy(const Policy& policy, const MdpSpec& spec);

double opt_value(const BetaTable& beta, const HobModel& hob, double value_per_conversion,
                 const BidGrid& grid, AuctionFormat auction, int rounds);

void write_policy_csv(std::ostream& out, const Policy& policy);
Policy read_policy_csv(std::istream& in);
void write_value_csv(std::ostream& out, const std::vector<std::vector<double>>& value);

}  // namespace ib
