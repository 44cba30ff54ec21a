#include "ib/planner.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace ib {

namespace {

void check_spec(const MdpSpec& spec) {
    if (spec.rounds < 1) throw std::invalid_argument("planner: rounds must be >= 1");
    if (static_cast<int>(spec.beta.size()) != spec.rounds)
        throw std::invalid_argument("planner: beta table does not match rounds");
    for (int h = 1; h <= spec.rounds; ++h)
        if (static_cast<int>(spec.beta[h - 1].size()) < h)
            throw std::invalid_argument("planner: beta row " + std::to_string(h) + " too short");
    if (spec.hob.rounds() < spec.rounds)
        throw std::invalid_argument("planner: hob model does not cover all rounds");
}

struct RoundActions {
    std::vector<double> win_prob;  // per grid bid
    std::vector<double> pay;
};

std::vector<RoundActions> precompute_actions(const MdpSpec& spec) {
    std::vector<RoundActions> acts(spec.rounds);
    for (int h = 1; h <= spec.rounds; ++h) {
        auto& a = acts[h - 1];
        a.win_prob.resize(spec.grid.size());
        a.pay.resize(spec.grid.size());
        for (std::size_t i = 0; i < spec.grid.size(); ++i) {
            a.win_prob[i] = spec.hob.cdf(h, spec.grid[i]);
            a.pay[i] = spec.hob.payment(h, spec.grid[i], spec.auction);
        }
    }
    return acts;
}

}  // namespace

PlanResult plan(const MdpSpec& spec) {
    check_spec(spec);
    const int H = spec.rounds;
    const auto acts = precompute_actions(spec);

    PlanResult result;
    result.value.resize(H);
    result.policy.table.resize(H);
    // next[l-1] = V_{h+1}(l), with one extra slot so l+1 at h = H is defined.
    std::vector<double> next(H + 2, 0.0);

    for (int h = H; h >= 1; --h) {
        auto& v_row = result.value[h - 1];
        auto& p_row = result.policy.table[h - 1];
        v_row.assign(h, 0.0);
        p_row.assign(h, 0.0);
        const auto& a = acts[h - 1];
        for (int l = 1; l <= h; ++l) {
            const double gain = spec.beta[h - 1][l - 1] * spec.value_per_conversion;
            double best = -std::numeric_limits<double>::infinity();
            double best_bid = 0.0;
            for (std::size_t i = 0; i < spec.grid.size(); ++i) {
                const double q =
                    a.win_prob[i] * (gain - a.pay[i] + next[0]) + (1.0 - a.win_prob[i]) * next[l];
                if (q > best) {
                    best = q;
                    best_bid = spec.grid[i];
                }
            }
            v_row[l - 1] = best;
            p_row[l - 1] = best_bid;
        }
        for (int l = 1; l <= h; ++l) next[l - 1] = v_row[l - 1];
        next[h] = 0.0;  // unreachable states carry no value
    }
    result.optimal_value = result.value[0][0];
    return result;
}

double evaluate_policy(const Policy& policy, const MdpSpec& spec) {
    check_spec(spec);
    const int H = spec.rounds;
    if (policy.rounds() != H)
        throw std::invalid_argument("evaluate_policy: policy does not match rounds");
    for (int h = 1; h <= H; ++h)
        if (static_cast<int>(policy.table[h - 1].size()) < h)
            throw std::invalid_argument("evaluate_policy: missing entry at round " +
                                        std::to_string(h));

    std::vector<double> occ(H + 1, 0.0);  // occ[l-1] = P(state l at current round)
    occ[0] = 1.0;
    double total = 0.0;
    for (int h = 1; h <= H; ++h) {
        std::vector<double> next(H + 1, 0.0);
        for (int l = 1; l <= h; ++l) {
            const double mass = occ[l - 1];
            if (mass == 0.0) continue;
            const double b = policy.table[h - 1][l - 1];
            if (!spec.grid.contains(b))
                throw std::invalid_argument("evaluate_policy: bid off grid");
            const double f = spec.hob.cdf(h, b);
            const double pay = spec.hob.payment(h, b, spec.auction);
            total += mass * f * (spec.beta[h - 1][l - 1] * spec.value_per_conversion - pay);
            next[0] += mass * f;
            next[l] += mass * (1.0 - f);
        }
        occ = std::move(next);
    }
    return total;
}

double opt_value(const BetaTable& beta, const HobModel& hob, double value_per_conversion,
                 const BidGrid& grid, AuctionFormat auction, int rounds) {
    return plan({beta, hob, value_per_conversion, grid, auction, rounds}).optimal_value;
}

void write_policy_csv(std::ostream& out, const Policy& policy) {
    out << "h,l,bid\n";
    char buf[64];
    for (int h = 1; h <= policy.rounds(); ++h) {
        for (int l = 1; l <= h; ++l) {
            std::snprintf(buf, sizeof(buf), "%.17g", policy.table[h - 1][l - 1]);
            out << h << ',' << l << ',' << buf << '\n';
        }
    }
}

Policy read_policy_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("policy csv: missing header");
    Policy p;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ',');
        const int h = std::stoi(field);
        std::getline(row, field, ',');
        const int l = std::stoi(field);
        std::getline(row, field, ',');
        const double bid = std::stod(field);
        if (h < 1 || l < 1 || l > h) throw std::invalid_argument("policy csv: bad (h,l)");
        if (static_cast<int>(p.table.size()) < h) p.table.resize(h);
        if (static_cast<int>(p.table[h - 1].size()) < h) p.table[h - 1].resize(h, 0.0);
        p.table[h - 1][l - 1] = bid;
    }
    for (int h = 1; h <= p.rounds(); ++h) p.table[h - 1].resize(h);
    return p;
}

void write_value_csv(std::ostream& out, const std::vector<std::vector<double>>& value) {
    out << "h,l,value\n";
    char buf[64];
    for (std::size_t h = 1; h <= value.size(); ++h) {
        for (std::size_t l = 1; l <= value[h - 1].size(); ++l) {
            std::snprintf(buf, sizeof(buf), "%.17g", value[h - 1][l - 1]);
            out << h << ',' << l << ',' << buf << '\n';
        }
    }
}

}  // namespace ib
