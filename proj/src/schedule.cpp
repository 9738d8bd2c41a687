#include <cmath>

#include "seqgap/errors.hpp"
#include "seqgap/sequential.hpp"

namespace seqgap {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kTermCut = 1e-15;
constexpr double kTailCut = 1e-11;
constexpr std::size_t kMaxTerms = 50'000'000;

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
}

}  // namespace

double compute_cp(double p, double alpha) {
    if (!(p > 0.0)) throw ConfigError("schedule constant p must be positive");
    check_alpha(alpha);
    double sum = 0.0;
    for (std::size_t j = 1; j <= kMaxTerms; ++j) {
        const double lj = std::log(static_cast<double>(j));
        const double term = std::exp(-p * lj * lj);
        sum += term;
        if (term < kTermCut && j > 2) {
            // sum_{t>j} e^{-p ln^2 t} <= e^{-p ln^2 j} * j / (2p ln j - 1) once 2p ln j > 1
            if (2.0 * p * lj > 1.0 &&
                term * static_cast<double>(j) / (2.0 * p * lj - 1.0) < kTailCut)
                break;
        }
    }
    return std::max(2.0 * std::log(sum / (kSqrt2Pi * alpha)), 1.0);
}

double compute_cpq(double p, double q, double alpha) {
    if (!(p > 0.0)) throw ConfigError("schedule constant p must be positive");
    if (!(q > 1.0)) throw ConfigError("superlinear exponent q must exceed 1");
    check_alpha(alpha);
    double sum = 0.0;
    for (std::size_t j = 1; j <= kMaxTerms; ++j) {
        const double jq = std::pow(static_cast<double>(j), q);
        const double term = std::exp(-p * jq);
        sum += term;
        // e^{-p t^q} decays at least geometrically with rate p q j^{q-1}
        const double rate = p * q * jq / static_cast<double>(j);
        if (term < kTermCut && term / rate < kTailCut) break;
    }
    return std::max(2.0 * std::log(sum / (kSqrt2Pi * alpha)), 1.0);
}

Schedule Schedule::sublinear(double p, double alpha, double dh) {
    Schedule s;
    s.kind = ScheduleKind::Sublinear;
    s.p = p;
    s.alpha = alpha;
    s.dh = dh;
    s.c = compute_cp(p, alpha);
    s.validate();
    return s;
}

Schedule Schedule::superlinear(double p, double q, double alpha, double dh) {
    Schedule s;
    s.kind = ScheduleKind::Superlinear;
    s.p = p;
    s.q = q;
    s.alpha = alpha;
    s.dh = dh;
    s.c = compute_cpq(p, q, alpha);
    s.validate();
    return s;
}

void Schedule::validate() const {
    if (!(p > 0.0)) throw ConfigError("schedule constant p must be positive");
    if (kind == ScheduleKind::Superlinear && !(q > 1.0))
        throw ConfigError("superlinear exponent q must exceed 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (!(c >= 1.0)) throw ConfigError("schedule constant c must be >= 1");
    if (!(dh > 0.0)) throw ConfigError("dh = h - h' must be positive");
}

double schedule_bound(int k, const Schedule& sched) {
    if (k < 1) throw ConfigError("iteration index must be >= 1");
    if (sched.kind == ScheduleKind::Sublinear) {
        const double lk = std::log(static_cast<double>(k));
        return sched.c + 2.0 * sched.p * lk * lk;
    }
    return sched.c + 2.0 * sched.p * std::pow(static_cast<double>(k), sched.q);
}

std::size_t min_sample_size(int k, const Schedule& sched, Assess assess) {
    (void)assess;  // the shared rule is already a multiple of four
    const double inv = 1.0 / (sched.dh * sched.dh);
    const double target = 2.0 * inv * schedule_bound(k, sched);  // pair-doubled bound
    auto n = static_cast<std::size_t>(std::ceil(target / 4.0 - 1e-12)) * 4;
    return std::max<std::size_t>(n, 4);
}

std::size_t min_sample_size_method(int k, const Schedule& sched, SamplingMethod method, Assess assess) {
    const double inv = 1.0 / (sched.dh * sched.dh);
    double target = inv * schedule_bound(k, sched);
    if (is_paired(method)) target *= 2.0;
    std::size_t parity = 1;
    if (is_paired(method)) parity = assess == Assess::A2RP ? 4 : 2;
    else if (assess == Assess::A2RP) parity = 2;
    const auto blocks = static_cast<std::size_t>(std::ceil(target / static_cast<double>(parity) - 1e-12));
    return std::max<std::size_t>(blocks, 1) * parity;
}

double dh_from_initial_size(std::size_t n1, ScheduleKind kind, double p, double q, double alpha) {
    if (n1 < 4) throw ConfigError("initial sample size must be at least 4");
    const double c = kind == ScheduleKind::Sublinear ? compute_cp(p, alpha)
                                                     : compute_cpq(p, q, alpha) + 2.0 * p;
    return std::sqrt(c / (static_cast<double>(n1) / 2.0));
}

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) throw ConfigError("quantile probability must lie in (0,1)");
    // Acklam's piecewise rational approximation for the inverse normal CDF
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double cc[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double x;
    if (prob < plow) {
        const double u = std::sqrt(-2 * std::log(prob));
        x = (((((cc[0] * u + cc[1]) * u + cc[2]) * u + cc[3]) * u + cc[4]) * u + cc[5]) /
            ((((dd[0] * u + dd[1]) * u + dd[2]) * u + dd[3]) * u + 1);
    } else if (prob > phigh) {
        const double u = std::sqrt(-2 * std::log(1 - prob));
        x = -(((((cc[0] * u + cc[1]) * u + cc[2]) * u + cc[3]) * u + cc[4]) * u + cc[5]) /
            ((((dd[0] * u + dd[1]) * u + dd[2]) * u + dd[3]) * u + 1);
    } else {
        const double u = prob - 0.5, t = u * u;
        x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * u /
            (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1);
    }
    // one Newton step against the exact CDF
    const double cdf = 0.5 * std::erfc(-x / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * x * x) / kSqrt2Pi;
    return x - (cdf - prob) / pdf;
}

double nonsequential_ci_upper(const GapEstimate& est, double alpha) {
    check_alpha(alpha);
    const std::size_t units = is_paired(est.method) ? est.n / 2 : est.n;
    if (units < 2) throw ConfigError("non-sequential interval needs at least two estimator units");
    const double z = normal_quantile(1.0 - alpha);
    return est.gap + z * std::sqrt(est.sv / static_cast<double>(units));
}

}  // namespace seqgap
