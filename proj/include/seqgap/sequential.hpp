#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "seqgap/estimators.hpp"

namespace seqgap {

enum class ScheduleKind { Sublinear, Superlinear };

// c_p = max{2 ln(sum_j j^(-p ln j) / (sqrt(2 pi) alpha)), 1}. The series is
// summed directly; terms below 1e-15 with an analytic tail bound below 1e-11
// are dropped, keeping the truncation error well under 1e-10.
double compute_cp(double p, double alpha);

// c_{p,q} = max{2 ln(sum_j exp(-p j^q) / (sqrt(2 pi) alpha)), 1}, same
// truncation policy with a geometric tail bound.
double compute_cpq(double p, double q, double alpha);

// Minimal sample-size rule. The shared convention sizes every method by the
// pair-doubled bound n_k/2 >= (1/dh)^2 (c + 2p g(k)) rounded up to a multiple
// of four, so all methods consume one common n_k per iteration.
struct Schedule {
    ScheduleKind kind = ScheduleKind::Sublinear;
    double p = 0.191;
    double q = 1.5;  // used by the superlinear rule only
    double alpha = 0.10;
    double c = 0.0;   // c_p or c_{p,q}
    double dh = 0.0;  // h - h' > 0
    SamplingMethod method = SamplingMethod::IID;  // only consulted by per-method sizing

    static Schedule sublinear(double p, double alpha, double dh);
    static Schedule superlinear(double p, double q, double alpha, double dh);
    void validate() const;
};

// growth term c + 2p g(k) with g = ln^2 k (sublinear) or k^q (superlinear)
double schedule_bound(int k, const Schedule& sched);

std::size_t min_sample_size(int k, const Schedule& sched, Assess assess);

// per-method minimal sizes (no shared-n_k doubling for IID/LHS); parity per
// method and assessment
std::size_t min_sample_size_method(int k, const Schedule& sched, SamplingMethod method, Assess assess);

// dh with min_sample_size(1) ~= n1 under the shared convention
double dh_from_initial_size(std::size_t n1, ScheduleKind kind, double p, double q, double alpha);

// Standard-normal quantile: Acklam's rational approximation polished by one
// Newton step through erfc, accurate to ~1e-12.
double normal_quantile(double prob);

// GAP + z_alpha sqrt(SV/n) with n replaced by the pair count for AV/2I.
double nonsequential_ci_upper(const GapEstimate& est, double alpha);

using CandidateSource = std::function<std::vector<double>(int k, std::size_t n_k)>;

struct SequentialConfig {
    SamplingMethod method = SamplingMethod::IID;
    Assess assess = Assess::A2RP;
    Schedule schedule;
    double h_prime = 0.0;
    double eps = 2e-7;
    double eps_prime = 1e-7;
    int cap = 200;
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    std::uint32_t purpose_base = purpose::kSolution;  // solution/assess1/assess2 = base+0,+1,+2
    std::optional<double> sv_bound;  // absolute variant: also require sqrt(SV) <= b
    void validate() const;
};

struct IterationRow {
    int k = 0;
    std::size_t n = 0;
    std::vector<double> x;
    double gap = 0.0;
    double sv = 0.0;
    bool stopped = false;
};

struct RunRecord {
    SamplingMethod method = SamplingMethod::IID;
    Assess assess = Assess::SRP;
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    std::vector<IterationRow> trace;
    bool stopped = false;     // false = iteration cap reached
    int T = 0;                // stopping iteration (= cap when !stopped)
    std::size_t n_T = 0;
    std::vector<double> x_T;
    double gap_T = 0.0;
    double sv_T = 0.0;
    double ci_upper = 0.0;    // lower bound is always 0
    double h_prime = 0.0, dh = 0.0, eps = 0.0;
    double wall_seconds = 0.0;  // diagnostic only, never serialized
};

// default candidate source: solve an SAA on fresh IID draws of size n_k from
// the solution-purpose stream of (seed, replication, k)
CandidateSource make_saa_candidate_source(const TwoStageLP& inst, const SequentialConfig& cfg);
CandidateSource make_fixed_candidate_source(std::vector<double> x);

RunRecord run_sequential(const TwoStageLP& inst, const SequentialConfig& cfg,
                         const CandidateSource& candidates);
RunRecord run_sequential(const TwoStageLP& inst, const SequentialConfig& cfg);

struct CalibrationOptions {
    int reps = 25;
    int iters = 5;
    double factor = 0.8;
    int jobs = 1;
};

// Truncated pilot runs without the stopping test; h' = factor * avg GAP /
// sqrt(avg SV) at the final pilot iteration. For 2I the rule calibrates IID
// and scales by sqrt(2).
double calibrate_h_prime(const TwoStageLP& inst, const Schedule& sched, SamplingMethod method,
                         Assess assess, const CalibrationOptions& opts, std::uint64_t seed);

// trace rows as CSV plus a trailing key=value summary block in '#' comments
void write_run_csv(const RunRecord& rec, std::ostream& out);

}  // namespace seqgap
