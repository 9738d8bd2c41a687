#include "seqgap/experiments.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "seqgap/errors.hpp"
#include "seqgap/textio.hpp"

namespace seqgap {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double t : v) s += t;
    return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double t : v) s += (t - mean) * (t - mean);
    return s / static_cast<double>(v.size() - 1);
}

// 90% half-width of a sample mean by default
double halfwidth_of(const std::vector<double>& v, double level) {
    const double z = normal_quantile(0.5 + 0.5 * level);
    const double m = mean_of(v);
    return z * std::sqrt(var_of(v, m) / static_cast<double>(v.size()));
}

// run indices 0..R-1 across `jobs` workers; failures collected by index
void parallel_for(int R, int jobs, const std::function<void(int)>& body) {
    if (jobs <= 1 || R <= 1) {
        std::vector<std::string> failures;
        for (int r = 0; r < R; ++r) {
            try {
                body(r);
            } catch (const std::exception& e) {
                failures.push_back("replication " + std::to_string(r) + ": " + e.what());
            }
        }
        if (!failures.empty()) {
            std::string msg = std::to_string(failures.size()) + " replication(s) failed";
            for (const auto& f : failures) msg += "\n  " + f;
            throw Error(msg);
        }
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::vector<std::string>> failures(jobs);
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= R) return;
                try {
                    body(r);
                } catch (const std::exception& e) {
                    failures[w].push_back("replication " + std::to_string(r) + ": " + e.what());
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    std::vector<std::string> all;
    for (auto& fs : failures) all.insert(all.end(), fs.begin(), fs.end());
    if (!all.empty()) {
        std::string msg = std::to_string(all.size()) + " replication(s) failed";
        for (const auto& f : all) msg += "\n  " + f;
        throw Error(msg);
    }
}

}  // namespace

GapReference GapReference::exact(const TwoStageLP& inst, std::size_t cap) {
    GapReference ref;
    ref.approx_ = false;
    ref.inst_ = &inst;
    ref.oracle_ = std::make_shared<ExactOracle>(inst, cap);
    return ref;
}

GapReference GapReference::approximate(const TwoStageLP& inst, std::uint64_t seed,
                                       std::size_t solve_n, std::size_t eval_n) {
    GapReference ref;
    ref.approx_ = true;
    ref.inst_ = &inst;
    RngStream solve_rng(seed, {0, purpose::kReference, 0});
    Sample solve_sample = sample_lhs(solve_n, inst, solve_rng);
    ref.z_ref_ = solve_saa(inst, solve_sample).z;
    RngStream eval_rng(seed, {0, purpose::kReference, 1});
    ref.eval_sample_ = std::make_shared<Sample>(sample_lhs(eval_n, inst, eval_rng));
    return ref;
}

double GapReference::gap(std::span<const double> x) const {
    if (!approx_) return oracle_->gap(x);
    const Sample& s = *eval_sample_;
    double sum = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) {
        std::span<const double> xi(s.points.data() + i * s.d, s.d);
        sum += f_value(*inst_, x, xi);
    }
    return sum / static_cast<double>(s.n) - z_ref_;
}

std::vector<RunRecord> run_replications(const TwoStageLP& inst, const SequentialConfig& base,
                                        int R, int jobs) {
    if (R < 1) throw ConfigError("replication count must be >= 1");
    std::vector<RunRecord> records(R);
    parallel_for(R, jobs, [&](int r) {
        SequentialConfig cfg = base;
        cfg.replication = static_cast<std::uint64_t>(r);
        records[r] = run_sequential(inst, cfg);
    });
    return records;
}

std::vector<MethodRun> run_experiment(const TwoStageLP& inst, const ExperimentPlan& plan) {
    if (plan.methods.empty()) throw ConfigError("experiment needs at least one sampling method");
    if (plan.methods.size() != plan.h_prime.size())
        throw ConfigError("experiment needs one h' per sampling method");
    const int R = plan.replications;
    if (R < 1) throw ConfigError("replication count must be >= 1");

    std::vector<MethodRun> out(plan.methods.size());
    for (std::size_t m = 0; m < plan.methods.size(); ++m) {
        out[m].method = plan.methods[m];
        out[m].h_prime = plan.h_prime[m];
        out[m].records.resize(R);
    }

    parallel_for(R, plan.jobs, [&](int r) {
        // one candidate per (replication, iteration), shared by every method
        std::map<int, std::vector<double>> cache;
        SequentialConfig proto;
        proto.schedule = plan.schedule;
        proto.seed = plan.seed;
        proto.replication = static_cast<std::uint64_t>(r);
        CandidateSource base = make_saa_candidate_source(inst, proto);
        CandidateSource shared = [&cache, &base](int k, std::size_t n_k) {
            auto it = cache.find(k);
            if (it != cache.end()) return it->second;
            auto x = base(k, n_k);
            cache.emplace(k, x);
            return x;
        };
        for (std::size_t m = 0; m < plan.methods.size(); ++m) {
            SequentialConfig cfg = proto;
            cfg.method = plan.methods[m];
            cfg.assess = plan.assess;
            cfg.h_prime = plan.h_prime[m];
            cfg.eps = plan.eps;
            cfg.eps_prime = plan.eps_prime;
            cfg.cap = plan.cap;
            out[m].records[r] = run_sequential(inst, cfg, shared);
        }
    });
    return out;
}

CoverageResult coverage(const std::vector<RunRecord>& records, const GapReference& ref, double level) {
    if (records.empty()) throw ConfigError("coverage needs at least one record");
    int covered = 0;
    for (const RunRecord& rec : records) {
        if (!rec.stopped)
            throw Error("coverage undefined: replication " + std::to_string(rec.replication) +
                        " hit the iteration cap");
        if (ref.gap(rec.x_T) <= rec.ci_upper) ++covered;
    }
    const auto R = static_cast<double>(records.size());
    CoverageResult res;
    res.p_hat = covered / R;
    const double z = normal_quantile(0.5 + 0.5 * level);
    res.halfwidth = z * std::sqrt(res.p_hat * (1.0 - res.p_hat) / R);
    return res;
}

std::vector<SummaryRow> summarize(const std::vector<MethodRun>& runs, Assess assess,
                                  const GapReference& ref, double level) {
    std::map<SamplingMethod, double> mean_width;
    for (const MethodRun& run : runs) {
        std::vector<double> widths;
        widths.reserve(run.records.size());
        for (const RunRecord& rec : run.records) widths.push_back(rec.ci_upper);
        mean_width[run.method] = mean_of(widths);
    }

    std::vector<SummaryRow> rows;
    for (const MethodRun& run : runs) {
        if (!runs.empty() && run.records.size() != runs.front().records.size())
            throw ConfigError("method runs carry different replication counts");
        SummaryRow row;
        row.method = method_name(run.method);
        row.assess = assess_name(assess);
        row.reps = static_cast<int>(run.records.size());

        std::vector<double> ts, widths;
        for (const RunRecord& rec : run.records) {
            ts.push_back(static_cast<double>(rec.T));
            widths.push_back(rec.ci_upper);
        }
        row.mean_T = mean_of(ts);
        row.hw_T = halfwidth_of(ts, level);
        row.mean_ci = mean_of(widths);
        row.hw_ci = halfwidth_of(widths, level);

        // pair the stratified scheme with plain sampling and the antithetic
        // scheme with paired-IID
        if (run.method == SamplingMethod::LHS && mean_width.count(SamplingMethod::IID))
            row.ci_ratio = mean_width[SamplingMethod::IID] / row.mean_ci;
        if (run.method == SamplingMethod::AV && mean_width.count(SamplingMethod::TwoI))
            row.ci_ratio = mean_width[SamplingMethod::TwoI] / row.mean_ci;

        CoverageResult cov = coverage(run.records, ref, level);
        row.coverage = cov.p_hat;
        row.hw_coverage = cov.halfwidth;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "method,assess,reps,mean_T,hw_T,mean_ci,hw_ci,ci_ratio,coverage,hw_coverage\n";
    for (const SummaryRow& r : rows) {
        out << r.method << "," << r.assess << "," << r.reps << "," << fmt_double(r.mean_T) << ","
            << fmt_double(r.hw_T) << "," << fmt_double(r.mean_ci) << "," << fmt_double(r.hw_ci)
            << ",";
        if (r.ci_ratio) out << fmt_double(*r.ci_ratio);
        out << "," << fmt_double(r.coverage) << "," << fmt_double(r.hw_coverage) << "\n";
    }
    return out.str();
}

namespace {

struct SeriesStats {
    std::vector<double> gaps, sds, cis;
};

double pct_reduction(double base, double variant) {
    return (base - variant) / base * 100.0;
}

ComparisonRow make_row(const std::string& mode, SamplingMethod method, const SeriesStats& s) {
    ComparisonRow row;
    row.mode = mode;
    row.method = method_name(method);
    row.avg_gap = mean_of(s.gaps);
    row.avg_sqrt_sv = mean_of(s.sds);
    row.avg_ci = mean_of(s.cis);
    return row;
}

void fill_reductions(ComparisonRow& row, const SeriesStats& base, const SeriesStats& var,
                     double g_exact, double sigma_base, double sigma_var) {
    const double mg_b = mean_of(base.gaps), mg_v = mean_of(var.gaps);
    row.red_gap_avg = pct_reduction(mg_b, mg_v);
    row.red_gap_var = pct_reduction(var_of(base.gaps, mg_b), var_of(var.gaps, mg_v));
    row.red_gap_bias = pct_reduction(mg_b - g_exact, mg_v - g_exact);
    const double ms_b = mean_of(base.sds), ms_v = mean_of(var.sds);
    row.red_sv_avg = pct_reduction(ms_b, ms_v);
    row.red_sv_var = pct_reduction(var_of(base.sds, ms_b), var_of(var.sds, ms_v));
    row.red_sv_relbias = pct_reduction((ms_b - sigma_base) / sigma_base, (ms_v - sigma_var) / sigma_var);
    const double mc_b = mean_of(base.cis), mc_v = mean_of(var.cis);
    row.red_ci_avg = pct_reduction(mc_b, mc_v);
    row.red_ci_var = pct_reduction(var_of(base.cis, mc_b), var_of(var.cis, mc_v));
}

}  // namespace

std::vector<ComparisonRow> compare_nonsequential(const TwoStageLP& inst, const ComparisonPlan& plan) {
    if (plan.methods.size() != plan.h_prime.size())
        throw ConfigError("comparison needs one h' per sampling method");
    if (static_cast<int>(plan.x.size()) != inst.dim_x())
        throw ConfigError("fixed candidate has wrong dimension");

    ExactOracle oracle(inst);  // throws on non-enumerable instances
    const double g_exact = oracle.gap(plan.x);
    ExactOracle::SigmaSet sig = oracle.sigma2(plan.x);
    auto sigma_of = [&](SamplingMethod m) {
        switch (m) {
            case SamplingMethod::IID:
            case SamplingMethod::LHS: return std::sqrt(sig.iid);
            case SamplingMethod::TwoI: return std::sqrt(sig.two_i);
            case SamplingMethod::AV: return std::sqrt(sig.av);
        }
        return 0.0;
    };

    const int R = plan.replications;
    std::map<SamplingMethod, SeriesStats> nonseq, seq;
    for (SamplingMethod m : plan.methods) {
        nonseq[m].gaps.resize(R);
        nonseq[m].sds.resize(R);
        nonseq[m].cis.resize(R);
        seq[m] = nonseq[m];
    }

    parallel_for(R, plan.jobs, [&](int r) {
        for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
            const SamplingMethod m = plan.methods[mi];
            const auto rep = static_cast<std::uint64_t>(r);
            // one-shot estimate at the initial size (iteration id 0)
            GapEstimate est;
            if (plan.assess == Assess::SRP) {
                RngStream rng(plan.seed, {rep, purpose::kNonSequential + 1, 0});
                Sample s = draw_sample(m, plan.n, inst, rng);
                est = gap_srp(inst, plan.x, s);
            } else {
                RngStream rng1(plan.seed, {rep, purpose::kNonSequential + 1, 0});
                RngStream rng2(plan.seed, {rep, purpose::kNonSequential + 2, 0});
                Sample h1 = draw_sample(m, plan.n / 2, inst, rng1);
                Sample h2 = draw_sample(m, plan.n / 2, inst, rng2);
                est = gap_a2rp(inst, plan.x, h1, h2);
            }
            nonseq[m].gaps[r] = est.gap;
            nonseq[m].sds[r] = std::sqrt(est.sv);
            nonseq[m].cis[r] = nonsequential_ci_upper(est, plan.alpha);

            SequentialConfig cfg;
            cfg.method = m;
            cfg.assess = plan.assess;
            cfg.schedule = plan.schedule;
            cfg.h_prime = plan.h_prime[mi];
            cfg.eps = plan.eps;
            cfg.eps_prime = plan.eps_prime;
            cfg.cap = plan.cap;
            cfg.seed = plan.seed;
            cfg.replication = rep;
            cfg.purpose_base = purpose::kNonSequential;
            RunRecord rec = run_sequential(inst, cfg, make_fixed_candidate_source(plan.x));
            seq[m].gaps[r] = rec.gap_T;
            seq[m].sds[r] = std::sqrt(rec.sv_T);
            seq[m].cis[r] = rec.ci_upper;
        }
    });

    auto baseline_of = [](SamplingMethod m) -> std::optional<SamplingMethod> {
        if (m == SamplingMethod::LHS) return SamplingMethod::IID;
        if (m == SamplingMethod::AV) return SamplingMethod::TwoI;
        return std::nullopt;
    };

    std::vector<ComparisonRow> rows;
    for (const char* mode : {"nonseq", "seq"}) {
        auto& stats = std::string(mode) == "nonseq" ? nonseq : seq;
        for (SamplingMethod m : plan.methods) {
            ComparisonRow row = make_row(mode, m, stats[m]);
            if (auto base = baseline_of(m); base && stats.count(*base))
                fill_reductions(row, stats[*base], stats[m], g_exact, sigma_of(*base), sigma_of(m));
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
    std::ostringstream out;
    out << "mode,method,avg_gap,red_gap_avg,red_gap_var,red_gap_bias,avg_sqrt_sv,red_sv_avg,"
           "red_sv_var,red_sv_relbias,avg_ci,red_ci_avg,red_ci_var\n";
    auto put = [&out](const std::optional<double>& v) {
        out << ",";
        if (v) out << fmt_double(*v);
    };
    for (const ComparisonRow& r : rows) {
        out << r.mode << "," << r.method << "," << fmt_double(r.avg_gap);
        put(r.red_gap_avg);
        put(r.red_gap_var);
        put(r.red_gap_bias);
        out << "," << fmt_double(r.avg_sqrt_sv);
        put(r.red_sv_avg);
        put(r.red_sv_var);
        put(r.red_sv_relbias);
        out << "," << fmt_double(r.avg_ci);
        put(r.red_ci_avg);
        put(r.red_ci_var);
        out << "\n";
    }
    return out.str();
}

std::string runs_to_csv(const MethodRun& run, int dim_x) {
    std::ostringstream out;
    out << "rep,k,n,gap,sv,stop";
    for (int j = 0; j < dim_x; ++j) out << ",x" << j;
    out << "\n";
    for (const RunRecord& rec : run.records) {
        for (const IterationRow& row : rec.trace) {
            out << rec.replication << "," << row.k << "," << row.n << "," << fmt_double(row.gap)
                << "," << fmt_double(row.sv) << "," << (row.stopped ? 1 : 0);
            for (double v : row.x) out << "," << fmt_double(v);
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace seqgap
