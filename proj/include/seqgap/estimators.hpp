#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqgap/saa.hpp"

namespace seqgap {

enum class Assess { SRP, A2RP };

const char* assess_name(Assess a);
Assess assess_from_name(const std::string& s);

// Optimality-gap point estimate with its sample variance. For paired methods
// (AV, 2I) both are computed over pair averages with n/2 - 1 in the variance
// denominator; otherwise over single observations with n - 1.
struct GapEstimate {
    double gap = 0.0;
    double sv = 0.0;
    std::size_t n = 0;  // total observations consumed
    SamplingMethod method = SamplingMethod::IID;
    Assess assess = Assess::SRP;
    std::vector<std::vector<double>> saa_solutions;  // one for SRP, two for A2RP
    std::uint64_t sample_fingerprint = 0;
};

// Single-replication estimate: the candidate is compared against the optimum
// of an SAA solved on the same sample.
GapEstimate gap_srp(const TwoStageLP& inst, std::span<const double> x, const Sample& sample,
                    const SimplexOptions& opts = {});

// Averaged two-replication estimate: plain average of two independent
// half-sample SRP estimates (both gap and sv).
GapEstimate gap_a2rp(const TwoStageLP& inst, std::span<const double> x, const Sample& half1,
                     const Sample& half2, const SimplexOptions& opts = {});

// Non-optimized estimator: sample mean of f(x,.) - f(x_ref,.) for a fixed
// optimal x_ref. Unbiased for the true gap; always dominated by gap_srp on
// the same sample.
double d_estimator(const TwoStageLP& inst, std::span<const double> x,
                   std::span<const double> x_ref, const Sample& sample,
                   const SimplexOptions& opts = {});

// Exact quantities on fully enumerable instances. Solves the deterministic
// equivalent over the whole support once, caches per-scenario f values by
// candidate, and enumerates the coupled antithetic distribution through the
// interval intersections of the inverse-CDF partitions of (u, 1-u).
class ExactOracle {
public:
    explicit ExactOracle(const TwoStageLP& inst, std::size_t cap = 200000);

    double z_star() const { return z_star_; }
    const std::vector<double>& x_star() const { return x_star_; }
    const std::vector<Scenario>& scenarios() const { return scenarios_; }

    double mean_f(std::span<const double> x) const;
    double var_f(std::span<const double> x) const;
    double gap(std::span<const double> x) const;  // cached per candidate

    struct SigmaSet {
        double iid = 0.0, two_i = 0.0, av = 0.0;  // variances, not sds
    };
    // Variance of the gap differences per sampling method. With alternative
    // optima supplied, `sigma2` minimizes and `sigma2_max` maximizes over the
    // candidate optimal solutions; with a unique optimum they coincide.
    SigmaSet sigma2(std::span<const double> x,
                    std::span<const std::vector<double>> alt_optima = {}) const;
    SigmaSet sigma2_max(std::span<const double> x,
                        std::span<const std::vector<double>> alt_optima = {}) const;

    // per-scenario f values for a candidate (shared cache)
    std::shared_ptr<const std::vector<double>> f_table(std::span<const double> x) const;

private:
    double pair_variance(const std::vector<double>& fx, const std::vector<double>& fy) const;
    double plain_variance(const std::vector<double>& fx, const std::vector<double>& fy) const;

    const TwoStageLP& inst_;
    std::vector<Scenario> scenarios_;
    std::vector<std::size_t> strides_;
    double z_star_ = 0.0;
    std::vector<double> x_star_;
    struct CoupledAtom {
        double prob = 0.0;
        std::uint32_t idx_a = 0, idx_b = 0;
    };
    std::vector<std::vector<CoupledAtom>> coupled_;  // per dimension
    mutable std::mutex mu_;
    mutable std::unordered_map<std::string, std::shared_ptr<std::vector<double>>> f_cache_;
    mutable std::unordered_map<std::string, double> gap_cache_;
};

struct ExactQuantities {
    double z_star = 0.0;
    std::vector<double> x_star;
    double g_x = 0.0;
    ExactOracle::SigmaSet sigma2;      // min over supplied optima
    ExactOracle::SigmaSet sigma2_max;  // max over supplied optima
};

ExactQuantities exact_quantities(const TwoStageLP& inst, std::span<const double> x,
                                 std::span<const std::vector<double>> alt_optima = {},
                                 std::size_t cap = 200000);

// Partial decomposition of f(x,.) into main effects plus residual, computed by
// enumeration. `m`/`M` bound the residual from below/above; eligibility asks
// whether eps - eps_prime exceeds m + M.
struct AnovaResult {
    double mean = 0.0;
    std::vector<std::vector<double>> effects;  // per dim, per support value
    double m = 0.0, M = 0.0;
    bool schedule_eligible(double eps, double eps_prime) const { return eps - eps_prime > m + M; }
};

AnovaResult anova_decompose(const TwoStageLP& inst, std::span<const double> x,
                            std::size_t cap = 200000);

}  // namespace seqgap
