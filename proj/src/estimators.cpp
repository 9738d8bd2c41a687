#include "seqgap/estimators.hpp"

#include <cmath>
#include <cstring>

#include "seqgap/errors.hpp"

namespace seqgap {

const char* assess_name(Assess a) {
    return a == Assess::SRP ? "srp" : "a2rp";
}

Assess assess_from_name(const std::string& s) {
    if (s == "srp" || s == "SRP") return Assess::SRP;
    if (s == "a2rp" || s == "A2RP") return Assess::A2RP;
    throw ConfigError("unknown assessment procedure '" + s + "' (expected srp or a2rp)");
}

namespace {

std::string key_of(std::span<const double> v) {
    return std::string(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
}

// f(x,.) - f(y,.) per estimator unit: one value per row for IID/LHS, one per
// pair average for AV/2I. Distinct xi rows are evaluated once.
std::vector<double> diff_units(const TwoStageLP& inst, std::span<const double> x,
                               std::span<const double> y, const Sample& sample,
                               const SimplexOptions& opts) {
    std::unordered_map<std::string, double> memo;
    auto diff_at = [&](std::size_t row) {
        std::span<const double> xi(sample.points.data() + row * sample.d, sample.d);
        std::string key = key_of(xi);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        double v = f_value(inst, x, xi, opts) - f_value(inst, y, xi, opts);
        memo.emplace(std::move(key), v);
        return v;
    };

    std::vector<double> units;
    if (is_paired(sample.method)) {
        units.reserve(sample.pairs.size());
        for (auto [a, b] : sample.pairs) units.push_back(0.5 * (diff_at(a) + diff_at(b)));
    } else {
        units.reserve(sample.n);
        for (std::size_t i = 0; i < sample.n; ++i) units.push_back(diff_at(i));
    }
    return units;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double t : v) s += t;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double t : v) s += (t - mean) * (t - mean);
    return s / static_cast<double>(v.size() - 1);
}

void require_estimable(const Sample& sample) {
    if (is_paired(sample.method)) {
        if (sample.n < 4)
            throw ConfigError("paired methods need n >= 4 for a sample variance, got n = " +
                              std::to_string(sample.n));
    } else if (sample.n < 2) {
        throw ConfigError("sample variance needs n >= 2, got n = " + std::to_string(sample.n));
    }
}

}  // namespace

GapEstimate gap_srp(const TwoStageLP& inst, std::span<const double> x, const Sample& sample,
                    const SimplexOptions& opts) {
    require_estimable(sample);
    SaaResult saa = solve_saa(inst, sample, opts);
    std::vector<double> units = diff_units(inst, x, saa.x, sample, opts);
    GapEstimate est;
    est.gap = mean_of(units);
    est.sv = sample_variance(units, est.gap);
    est.n = sample.n;
    est.method = sample.method;
    est.assess = Assess::SRP;
    est.saa_solutions.push_back(std::move(saa.x));
    est.sample_fingerprint = sample.fingerprint();
    return est;
}

GapEstimate gap_a2rp(const TwoStageLP& inst, std::span<const double> x, const Sample& half1,
                     const Sample& half2, const SimplexOptions& opts) {
    if (half1.method != half2.method)
        throw ConfigError(std::string("a2rp halves use different sampling methods (") +
                          method_name(half1.method) + " vs " + method_name(half2.method) + ")");
    if (half1.n != half2.n)
        throw ConfigError("a2rp halves must have equal sizes, got " + std::to_string(half1.n) +
                          " and " + std::to_string(half2.n));
    GapEstimate a = gap_srp(inst, x, half1, opts);
    GapEstimate b = gap_srp(inst, x, half2, opts);
    GapEstimate est;
    est.gap = 0.5 * (a.gap + b.gap);
    est.sv = 0.5 * (a.sv + b.sv);
    est.n = half1.n + half2.n;
    est.method = half1.method;
    est.assess = Assess::A2RP;
    est.saa_solutions.push_back(std::move(a.saa_solutions[0]));
    est.saa_solutions.push_back(std::move(b.saa_solutions[0]));
    est.sample_fingerprint = half1.fingerprint() ^ (half2.fingerprint() << 1 | half2.fingerprint() >> 63);
    return est;
}

double d_estimator(const TwoStageLP& inst, std::span<const double> x,
                   std::span<const double> x_ref, const Sample& sample,
                   const SimplexOptions& opts) {
    if (sample.n == 0) throw ConfigError("empty sample");
    return mean_of(diff_units(inst, x, x_ref, sample, opts));
}

}  // namespace seqgap
