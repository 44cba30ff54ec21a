#include "ib/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ib {

namespace {
constexpr double kGridTol = 1e-12;
}

std::string to_string(AuctionFormat f) {
    return f == AuctionFormat::second_price ? "second_price" : "first_price";
}

AuctionFormat auction_format_from_string(const std::string& s) {
    if (s == "second_price") return AuctionFormat::second_price;
    if (s == "first_price") return AuctionFormat::first_price;
    throw std::invalid_argument("unknown auction format: " + s);
}

BidGrid BidGrid::uniform(int points) {
    if (points < 2) throw std::invalid_argument("BidGrid::uniform: need at least 2 points");
    BidGrid g;
    g.bids.reserve(points);
    for (int i = 0; i < points; ++i) g.bids.push_back(static_cast<double>(i) / (points - 1));
    g.bids.front() = 0.0;
    g.bids.back() = 1.0;
    return g;
}

int BidGrid::index_of(double b) const {
    auto it = std::lower_bound(bids.begin(), bids.end(), b - kGridTol);
    if (it != bids.end() && std::abs(*it - b) <= kGridTol)
        return static_cast<int>(it - bids.begin());
    return -1;
}

bool BidGrid::contains(double b) const { return index_of(b) >= 0; }

double IncrementalityParams::beta_at(int h, int l) const {
    if (h < 1 || h > rounds())
        throw std::out_of_range("beta_at: round " + std::to_string(h) + " out of range");
    if (l < 1 || l > h)
        throw std::out_of_range("beta_at: gap " + std::to_string(l) + " invalid at round " +
                                std::to_string(h));
    return beta[h - 1][l - 1];
}

double IncrementalityParams::lambda_at(int h) const {
    if (h < 1 || h > rounds())
        throw std::out_of_range("lambda_at: round " + std::to_string(h) + " out of range");
    return lambda[h - 1];
}

Policy Policy::constant(int rounds, double bid) {
    Policy p;
    p.table.resize(rounds);
    for (int h = 1; h <= rounds; ++h) p.table[h - 1].assign(h, bid);
    return p;
}

double Policy::bid(int h, int l) const {
    if (h < 1 || h > rounds() || l < 1 || l > static_cast<int>(table[h - 1].size()))
        throw std::out_of_range("Policy::bid: no entry for (h=" + std::to_string(h) +
                                ", l=" + std::to_string(l) + ")");
    return table[h - 1][l - 1];
}

void Policy::set(int h, int l, double b) {
    if (h < 1 || h > rounds() || l < 1 || l > static_cast<int>(table[h - 1].size()))
        throw std::out_of_range("Policy::set: no entry for (h,l)");
    table[h - 1][l - 1] = b;
}

namespace {

void validate_grid(const BidGrid& grid, std::vector<std::string>& errors) {
    const auto& b = grid.bids;
    if (b.empty()) {
        errors.push_back("grid violation: grid is empty");
        return;
    }
    if (!std::is_sorted(b.begin(), b.end()))
        errors.push_back("grid violation: bids not sorted ascending");
    if (std::adjacent_find(b.begin(), b.end()) != b.end())
        errors.push_back("grid violation: duplicate bids");
    if (b.front() != 0.0) errors.push_back("grid must contain 0");
    if (b.back() != 1.0) errors.push_back("grid must contain 1");
    for (double x : b)
        if (x < 0.0 || x > 1.0) {
            errors.push_back("grid violation: bid outside [0,1]");
            break;
        }
}

// Worst case over winning sets of the expected conversions landing in
// [h, h+1): every round up to h won, each at its most productive gap.
double max_interval_mass(const IncrementalityParams& params, int h) {
    double total = 0.0;
    for (int w = 1; w <= h; ++w) {
        double bmax = 0.0;
        for (double x : params.beta[w - 1]) bmax = std::max(bmax, x);
        const double lam = params.lambda[w - 1];
        total += bmax * (std::exp(-lam * (h - w)) - std::exp(-lam * (h + 1 - w)));
    }
    return total;
}

}  // namespace

std::vector<std::string> validate_scenario(const ScenarioConfig& config,
                                           const IncrementalityParams& params) {
    std::vector<std::string> errors;
    std::ostringstream msg;

    if (config.rounds < 1) errors.push_back("config violation: H must be >= 1");
    if (config.episodes < 1) errors.push_back("config violation: T must be >= 1");
    if (config.value_per_conversion < 0.0 || config.value_per_conversion > 1.0)
        errors.push_back("config violation: v must lie in [0,1]");
    if (!(config.delta > 0.0 && config.delta < 0.5))
        errors.push_back("config violation: delta must lie in (0, 0.5)");
    validate_grid(config.grid, errors);

    const auto& b = params.bounds;
    if (!(b.c_beta > 0.0 && b.c_beta <= b.C_beta && b.C_beta <= 1.0))
        errors.push_back("bound violation: require 0 < c_beta <= C_beta <= 1");
    if (!(b.c_lambda > 0.0 && b.c_lambda <= b.C_lambda))
        errors.push_back("bound violation: require 0 < c_lambda <= C_lambda");
    if (!(b.C_T > 0.0)) errors.push_back("bound violation: C_T must be positive");

    const int H = config.rounds;
    if (static_cast<int>(params.lambda.size()) != H) {
        errors.push_back("dimension mismatch: lambda size != H");
        return errors;  // shape is broken; entry checks would be meaningless
    }
    if (static_cast<int>(params.beta.size()) != H) {
        errors.push_back("dimension mismatch: beta triangle does not match H");
        return errors;
    }
    for (int h = 1; h <= H; ++h) {
        if (static_cast<int>(params.beta[h - 1].size()) != h) {
            msg.str("");
            msg << "dimension mismatch: beta row " << h << " must have " << h << " entries";
            errors.push_back(msg.str());
        }
    }
    if (!errors.empty() &&
        errors.back().rfind("dimension mismatch", 0) == 0)
        return errors;

    for (int h = 1; h <= H; ++h) {
        for (int l = 1; l <= h; ++l) {
            const double x = params.beta[h - 1][l - 1];
            if (x < b.c_beta || x > b.C_beta) {
                msg.str("");
                msg << "bound violation at (" << h << "," << l << ")";
                errors.push_back(msg.str());
            }
        }
        const double lam = params.lambda[h - 1];
        if (lam < b.c_lambda || lam > b.C_lambda) {
            msg.str("");
            msg << "bound violation: lambda_" << h << " outside [c_lambda, C_lambda]";
            errors.push_back(msg.str());
        }
    }

    for (int h = 1; h <= H; ++h) {
        if (max_interval_mass(params, h) > b.C_T + 1e-12) {
            msg.str("");
            msg << "bound violation: expected conversions in [" << h << "," << h + 1
                << ") can exceed C_T";
            errors.push_back(msg.str());
        }
    }

    return errors;
}

}  // namespace ib
