#pragma once

#include <iosfwd>
#include <random>
#include <vector>

#include "ib/types.hpp"

namespace ib {

// Highest-other-bid distributions, one per round. Parametric rounds model the
// ground truth the simulator draws from; empirical rounds accumulate observed
// HOBs and expose the empirical CDF the learner plans against.
//
// The learner wins iff bid >= HOB, so cdf(h, b) is exactly the winning
// probability of bid b at round h.
class HobModel {
  public:
    enum class Kind { uniform, trunc_normal, beta_shaped, empirical };

    struct RoundSpec {
        Kind kind = Kind::uniform;
        double mu = 0.5, sigma = 0.25;   // trunc_normal, truncated to [0,1]
        double alpha = 2.0, beta = 2.0;  // beta_shaped
    };

    HobModel() = default;

    static HobModel uniform(int rounds);
    static HobModel parametric(std::vector<RoundSpec> specs);
    static HobModel empirical(int rounds);

    int rounds() const { return static_cast<int>(rounds_.size()); }
    Kind kind(int h) const;
    const RoundSpec& spec(int h) const;

    // P(m_h <= b) for b in [0,1]. Empirical rounds throw with zero samples.
    double cdf(int h, double b) const;

    // Expected payment conditional on winning with bid b: the bid itself in
    // first price, E[m_h | m_h <= b] in second price (0 when cdf(b) = 0; the
    // value never enters a utility because it is multiplied by cdf(b)).
    double payment(int h, double b, AuctionFormat format) const;

    // One draw from a parametric round (inverse-CDF; one uniform consumed).
    double sample(int h, std::mt19937_64& rng) const;

    // Appends an observed HOB to an empirical round; cdf/payment reflect it
    // immediately.
    void ingest(int h, double m);

    // Precomputes per-grid-bid counts and sums for empirical rounds so the
    // planner's queries are O(1) instead of a scan.
    void attach_grid(const BidGrid& grid);

    int sample_count(int h) const;
    const std::vector<double>& samples(int h) const;

    void dump_csv(std::ostream& out) const;                       // round,value
    static HobModel load_csv(std::istream& in, int rounds);

  private:
    struct Round {
        RoundSpec spec;
        std::vector<double> samples;        // insertion order
        std::vector<long long> grid_count;  // #{m <= grid[i]}
        std::vector<double> grid_sum;       // sum of those m
    };

    const Round& round_at(int h) const;
    Round& round_at(int h);
    double parametric_cdf(const RoundSpec& spec, double b) const;
    double parametric_cdf_integral(const RoundSpec& spec, double b) const;  // int_0^b F

    std::vector<Round> rounds_;
    BidGrid grid_;
    bool has_grid_ = false;
};

}  // namespace ib
