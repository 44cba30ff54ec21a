#include "ib/hob.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

namespace ib {

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double std_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}
// Antiderivative of the standard normal CDF.
double std_normal_cdf_integral(double z) { return z * std_normal_cdf(z) + std_normal_pdf(z); }

void check_bid(double b) {
    if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("hob query: bid outside [0,1]");
}

void check_spec(const HobModel::RoundSpec& s) {
    switch (s.kind) {
        case HobModel::Kind::uniform:
        case HobModel::Kind::empirical:
            break;
        case HobModel::Kind::trunc_normal: {
            if (!(s.sigma > 0.0))
                throw std::invalid_argument("trunc_normal: sigma must be positive");
            const double z = std_normal_cdf((1.0 - s.mu) / s.sigma) -
                             std_normal_cdf((0.0 - s.mu) / s.sigma);
            if (!(z > 0.0))
                throw std::invalid_argument("trunc_normal: no mass on [0,1]");
            break;
        }
        case HobModel::Kind::beta_shaped:
            if (!(s.alpha > 0.0 && s.beta > 0.0))
                throw std::invalid_argument("beta_shaped: shapes must be positive");
            break;
    }
}

}  // namespace

HobModel HobModel::uniform(int rounds) {
    return parametric(std::vector<RoundSpec>(rounds, RoundSpec{}));
}

HobModel HobModel::parametric(std::vector<RoundSpec> specs) {
    HobModel m;
    m.rounds_.reserve(specs.size());
    for (auto& s : specs) {
        check_spec(s);
        Round r;
        r.spec = s;
        m.rounds_.push_back(std::move(r));
    }
    return m;
}

HobModel HobModel::empirical(int rounds) {
    HobModel m;
    m.rounds_.resize(rounds);
    for (auto& r : m.rounds_) r.spec.kind = Kind::empirical;
    return m;
}

const HobModel::Round& HobModel::round_at(int h) const {
    if (h < 1 || h > rounds()) throw std::out_of_range("hob: round out of range");
    return rounds_[h - 1];
}

HobModel::Round& HobModel::round_at(int h) {
    if (h < 1 || h > rounds()) throw std::out_of_range("hob: round out of range");
    return rounds_[h - 1];
}

HobModel::Kind HobModel::kind(int h) const { return round_at(h).spec.kind; }

const HobModel::RoundSpec& HobModel::spec(int h) const { return round_at(h).spec; }

double HobModel::parametric_cdf(const RoundSpec& spec, double b) const {
    switch (spec.kind) {
        case Kind::uniform:
            return b;
        case Kind::trunc_normal: {
            const double lo = std_normal_cdf((0.0 - spec.mu) / spec.sigma);
            const double hi = std_normal_cdf((1.0 - spec.mu) / spec.sigma);
            return (std_normal_cdf((b - spec.mu) / spec.sigma) - lo) / (hi - lo);
        }
        case Kind::beta_shaped:
            if (b <= 0.0) return 0.0;
            if (b >= 1.0) return 1.0;
            return boost::math::ibeta(spec.alpha, spec.beta, b);
        case Kind::empirical:
            break;
    }
    throw std::logic_error("parametric_cdf on empirical round");
}

// Closed form of int_0^b F(v) dv for each parametric family.
double HobModel::parametric_cdf_integral(const RoundSpec& spec, double b) const {
    switch (spec.kind) {
        case Kind::uniform:
            return 0.5 * b * b;
        case Kind::trunc_normal: {
            const double lo = std_normal_cdf((0.0 - spec.mu) / spec.sigma);
            const double hi = std_normal_cdf((1.0 - spec.mu) / spec.sigma);
            const double g = std_normal_cdf_integral((b - spec.mu) / spec.sigma) -
                             std_normal_cdf_integral((0.0 - spec.mu) / spec.sigma);
            return (spec.sigma * g - lo * b) / (hi - lo);
        }
        case Kind::beta_shaped: {
            if (b <= 0.0) return 0.0;
            const double x = std::min(b, 1.0);
            // int_0^b F(x) dx = b F(b) - E[X 1{X <= b}]
            const double mass = boost::math::ibeta(spec.alpha + 1.0, spec.beta, x) *
                                (spec.alpha / (spec.alpha + spec.beta));
            return b * parametric_cdf(spec, b) - mass;
        }
        case Kind::empirical:
            break;
    }
    throw std::logic_error("parametric_cdf_integral on empirical round");
}

double HobModel::cdf(int h, double b) const {
    check_bid(b);
    const Round& r = round_at(h);
    if (r.spec.kind != Kind::empirical) return parametric_cdf(r.spec, b);

    const auto t = r.samples.size();
    if (t == 0) throw std::logic_error("empirical cdf with zero samples");
    if (has_grid_) {
        const int i = grid_.index_of(b);
        if (i >= 0) return static_cast<double>(r.grid_count[i]) / static_cast<double>(t);
    }
    long long count = 0;
    for (double m : r.samples)
        if (m <= b) ++count;
    return static_cast<double>(count) / static_cast<double>(t);
}

double HobModel::payment(int h, double b, AuctionFormat format) const {
    check_bid(b);
    if (format == AuctionFormat::first_price) return b;

    const Round& r = round_at(h);
    if (r.spec.kind != Kind::empirical) {
        const double f = parametric_cdf(r.spec, b);
        if (f <= 0.0) return 0.0;
        return b - parametric_cdf_integral(r.spec, b) / f;
    }

    if (r.samples.empty()) throw std::logic_error("empirical payment with zero samples");
    long long count = 0;
    double sum = 0.0;
    if (has_grid_) {
        const int i = grid_.index_of(b);
        if (i >= 0) {
            count = r.grid_count[i];
            sum = r.grid_sum[i];
            return count == 0 ? 0.0 : sum / static_cast<double>(count);
        }
    }
    for (double m : r.samples)
        if (m <= b) {
            ++count;
            sum += m;
        }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double HobModel::sample(int h, std::mt19937_64& rng) const {
    const Round& r = round_at(h);
    if (r.spec.kind == Kind::empirical)
        throw std::logic_error("sample() is only defined for parametric rounds");

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    if (r.spec.kind == Kind::uniform) return u;

    // Inverse CDF by bisection; the CDF is nondecreasing with F(0)=0, F(1)=1.
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (parametric_cdf(r.spec, mid) < u)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void HobModel::ingest(int h, double m) {
    if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("ingest: HOB outside [0,1]");
    Round& r = round_at(h);
    if (r.spec.kind != Kind::empirical)
        throw std::logic_error("ingest() is only defined for empirical rounds");
    r.samples.push_back(m);
    if (has_grid_) {
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            if (m <= grid_[i]) {
                ++r.grid_count[i];
                r.grid_sum[i] += m;
            }
        }
    }
}

void HobModel::attach_grid(const BidGrid& grid) {
    grid_ = grid;
    has_grid_ = true;
    for (Round& r : rounds_) {
        if (r.spec.kind != Kind::empirical) continue;
        r.grid_count.assign(grid_.size(), 0);
        r.grid_sum.assign(grid_.size(), 0.0);
        for (double m : r.samples) {
            for (std::size_t i = 0; i < grid_.size(); ++i) {
                if (m <= grid_[i]) {
                    ++r.grid_count[i];
                    r.grid_sum[i] += m;
                }
            }
        }
    }
}

int HobModel::sample_count(int h) const { return static_cast<int>(round_at(h).samples.size()); }

const std::vector<double>& HobModel::samples(int h) const { return round_at(h).samples; }

void HobModel::dump_csv(std::ostream& out) const {
    out << "round,value\n";
    char buf[64];
    for (int h = 1; h <= rounds(); ++h) {
        for (double m : rounds_[h - 1].samples) {
            std::snprintf(buf, sizeof(buf), "%.17g", m);
            out << h << ',' << buf << '\n';
        }
    }
}

HobModel HobModel::load_csv(std::istream& in, int rounds) {
    HobModel m = empirical(rounds);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("hob csv: missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("hob csv: malformed row");
        const int h = std::stoi(line.substr(0, comma));
        const double v = std::stod(line.substr(comma + 1));
        m.ingest(h, v);
    }
    return m;
}

}  // namespace ib
