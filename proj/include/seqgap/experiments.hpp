#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seqgap/sequential.hpp"

namespace seqgap {

// True-gap lookup used by coverage estimation: exact enumeration whenever the
// instance allows it, otherwise a flagged approximation built from a large
// stratified reference sample (its own solve for z*, a fixed evaluation
// sample for the means).
class GapReference {
public:
    static GapReference exact(const TwoStageLP& inst, std::size_t cap = 200000);
    static GapReference approximate(const TwoStageLP& inst, std::uint64_t seed,
                                    std::size_t solve_n = 1000, std::size_t eval_n = 50000);

    double gap(std::span<const double> x) const;
    bool is_approximate() const { return approx_; }
    const ExactOracle* oracle() const { return oracle_.get(); }  // null when approximate

private:
    GapReference() = default;
    bool approx_ = false;
    std::shared_ptr<ExactOracle> oracle_;
    const TwoStageLP* inst_ = nullptr;
    double z_ref_ = 0.0;
    std::shared_ptr<Sample> eval_sample_;
};

// R independent runs of one configuration; replication r uses stream ids
// derived from r, so any execution order yields the same records.
std::vector<RunRecord> run_replications(const TwoStageLP& inst, const SequentialConfig& base,
                                        int R, int jobs);

struct MethodRun {
    SamplingMethod method = SamplingMethod::IID;
    double h_prime = 0.0;
    std::vector<RunRecord> records;
};

struct ExperimentPlan {
    std::vector<SamplingMethod> methods;
    Assess assess = Assess::A2RP;
    Schedule schedule;
    std::vector<double> h_prime;  // parallel to methods
    double eps = 2e-7;
    double eps_prime = 1e-7;
    int cap = 200;
    std::uint64_t seed = 0;
    int replications = 300;
    int jobs = 1;
};

// All methods on common random numbers: within one replication every method
// sees the same candidate solutions (the candidate SAA is solved once per
// (replication, iteration) and shared).
std::vector<MethodRun> run_experiment(const TwoStageLP& inst, const ExperimentPlan& plan);

struct CoverageResult {
    double p_hat = 0.0;
    double halfwidth = 0.0;  // normal-approximation binomial, 90% by default
};

// Fraction of records whose interval [0, ci_upper] contains the true gap of
// x_T. Every record must have stopped.
CoverageResult coverage(const std::vector<RunRecord>& records, const GapReference& ref,
                        double level = 0.90);

struct SummaryRow {
    std::string method;
    std::string assess;
    int reps = 0;
    double mean_T = 0.0, hw_T = 0.0;
    double mean_ci = 0.0, hw_ci = 0.0;
    std::optional<double> ci_ratio;  // baseline width / this width; empty on baselines
    double coverage = 0.0, hw_coverage = 0.0;
};

// Summary in the coverage-table shape; LHS is paired against IID and AV
// against 2I for the CI-ratio column.
std::vector<SummaryRow> summarize(const std::vector<MethodRun>& runs, Assess assess,
                                  const GapReference& ref, double level = 0.90);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);

struct ComparisonPlan {
    std::vector<double> x;  // fixed candidate under study
    std::vector<SamplingMethod> methods;
    Assess assess = Assess::A2RP;
    Schedule schedule;
    std::vector<double> h_prime;
    double eps = 2e-7;
    double eps_prime = 1e-7;
    double alpha = 0.10;
    int cap = 200;
    std::uint64_t seed = 0;
    std::size_t n = 200;  // non-sequential estimate size = initial sequential size
    int replications = 300;
    int jobs = 1;
};

struct ComparisonRow {
    std::string mode;  // "nonseq" or "seq"
    std::string method;
    double avg_gap = 0.0, avg_sqrt_sv = 0.0, avg_ci = 0.0;
    // % reductions against the paired baseline (IID for LHS, 2I for AV);
    // positive means the variance-reduced method improved
    std::optional<double> red_gap_avg, red_gap_var, red_gap_bias;
    std::optional<double> red_sv_avg, red_sv_var, red_sv_relbias;
    std::optional<double> red_ci_avg, red_ci_var;
};

// Fixed-candidate study: one-shot estimates at size n versus sequential runs
// whose candidate source always returns x. Requires an enumerable instance
// (exact gap and per-method variances anchor the bias columns).
std::vector<ComparisonRow> compare_nonsequential(const TwoStageLP& inst, const ComparisonPlan& plan);
std::string comparison_to_csv(const std::vector<ComparisonRow>& rows);

// trace rows for a whole method run, one line per (replication, iteration)
std::string runs_to_csv(const MethodRun& run, int dim_x);

}  // namespace seqgap
