#include <chrono>
#include <cmath>
#include <future>
#include <ostream>

#include "seqgap/errors.hpp"
#include "seqgap/sequential.hpp"
#include "seqgap/textio.hpp"

namespace seqgap {

void SequentialConfig::validate() const {
    schedule.validate();
    if (!(eps > eps_prime && eps_prime > 0.0))
        throw ConfigError("need eps > eps_prime > 0");
    if (!(h_prime >= 0.0)) throw ConfigError("h' must be nonnegative");
    if (cap < 1) throw ConfigError("iteration cap must be >= 1");
    if (sv_bound && !(*sv_bound > 0.0)) throw ConfigError("absolute rule bound b must be positive");
}

CandidateSource make_saa_candidate_source(const TwoStageLP& inst, const SequentialConfig& cfg) {
    const std::uint64_t seed = cfg.seed;
    const std::uint64_t rep = cfg.replication;
    const std::uint32_t purpose = cfg.purpose_base;
    const TwoStageLP* pinst = &inst;
    return [pinst, seed, rep, purpose](int k, std::size_t n_k) {
        RngStream rng(seed, {rep, purpose, static_cast<std::uint32_t>(k)});
        Sample s = sample_iid(n_k, *pinst, rng);
        return solve_saa(*pinst, s).x;
    };
}

CandidateSource make_fixed_candidate_source(std::vector<double> x) {
    return [x = std::move(x)](int, std::size_t) { return x; };
}

RunRecord run_sequential(const TwoStageLP& inst, const SequentialConfig& cfg,
                         const CandidateSource& candidates) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    RunRecord rec;
    rec.method = cfg.method;
    rec.assess = cfg.assess;
    rec.seed = cfg.seed;
    rec.replication = cfg.replication;
    rec.h_prime = cfg.h_prime;
    rec.dh = cfg.schedule.dh;
    rec.eps = cfg.eps;

    for (int k = 1; k <= cfg.cap; ++k) {
        const std::size_t n_k = min_sample_size(k, cfg.schedule, cfg.assess);
        std::vector<double> x_k = candidates(k, n_k);

        GapEstimate est;
        const auto ik = static_cast<std::uint32_t>(k);
        if (cfg.assess == Assess::SRP) {
            RngStream rng(cfg.seed, {cfg.replication, cfg.purpose_base + 1, ik});
            Sample s = draw_sample(cfg.method, n_k, inst, rng);
            est = gap_srp(inst, x_k, s);
        } else {
            RngStream rng1(cfg.seed, {cfg.replication, cfg.purpose_base + 1, ik});
            RngStream rng2(cfg.seed, {cfg.replication, cfg.purpose_base + 2, ik});
            Sample h1 = draw_sample(cfg.method, n_k / 2, inst, rng1);
            Sample h2 = draw_sample(cfg.method, n_k / 2, inst, rng2);
            est = gap_a2rp(inst, x_k, h1, h2);
        }

        const double sd = std::sqrt(est.sv);
        bool stop = est.gap <= cfg.h_prime * sd + cfg.eps_prime;
        if (cfg.sv_bound) stop = stop && sd <= *cfg.sv_bound;

        rec.trace.push_back({k, n_k, x_k, est.gap, est.sv, stop});
        if (stop) {
            rec.stopped = true;
            rec.T = k;
            rec.n_T = n_k;
            rec.x_T = std::move(x_k);
            rec.gap_T = est.gap;
            rec.sv_T = est.sv;
            rec.ci_upper = cfg.sv_bound ? (cfg.h_prime + cfg.schedule.dh) * *cfg.sv_bound + cfg.eps
                                        : (cfg.h_prime + cfg.schedule.dh) * sd + cfg.eps;
            break;
        }
    }
    if (!rec.stopped) {
        rec.T = cfg.cap;
        const IterationRow& last = rec.trace.back();
        rec.n_T = last.n;
        rec.x_T = last.x;
        rec.gap_T = last.gap;
        rec.sv_T = last.sv;
        rec.ci_upper = (cfg.h_prime + cfg.schedule.dh) * std::sqrt(last.sv) + cfg.eps;
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

RunRecord run_sequential(const TwoStageLP& inst, const SequentialConfig& cfg) {
    return run_sequential(inst, cfg, make_saa_candidate_source(inst, cfg));
}

double calibrate_h_prime(const TwoStageLP& inst, const Schedule& sched, SamplingMethod method,
                         Assess assess, const CalibrationOptions& opts, std::uint64_t seed) {
    if (opts.reps < 2) throw ConfigError("calibration needs at least 2 replications");
    if (opts.iters < 1) throw ConfigError("calibration needs at least 1 iteration");
    if (method == SamplingMethod::TwoI) {
        // paired-IID shares the IID gap estimate while halving the variance
        return std::sqrt(2.0) * calibrate_h_prime(inst, sched, SamplingMethod::IID, assess, opts, seed);
    }

    auto pilot = [&](int rep) {
        SequentialConfig cfg;
        cfg.method = method;
        cfg.assess = assess;
        cfg.schedule = sched;
        cfg.h_prime = 0.0;
        cfg.eps = 2e-7;
        cfg.eps_prime = 1e-7;
        cfg.cap = opts.iters;
        cfg.seed = seed;
        cfg.replication = static_cast<std::uint64_t>(rep);
        cfg.purpose_base = purpose::kCalibration;

        const std::size_t n_k = min_sample_size(opts.iters, cfg.schedule, assess);
        std::vector<double> x_k = make_saa_candidate_source(inst, cfg)(opts.iters, n_k);
        const auto ik = static_cast<std::uint32_t>(opts.iters);
        if (assess == Assess::SRP) {
            RngStream rng(seed, {cfg.replication, cfg.purpose_base + 1, ik});
            Sample s = draw_sample(method, n_k, inst, rng);
            GapEstimate est = gap_srp(inst, x_k, s);
            return std::pair<double, double>(est.gap, est.sv);
        }
        RngStream rng1(seed, {cfg.replication, cfg.purpose_base + 1, ik});
        RngStream rng2(seed, {cfg.replication, cfg.purpose_base + 2, ik});
        Sample h1 = draw_sample(method, n_k / 2, inst, rng1);
        Sample h2 = draw_sample(method, n_k / 2, inst, rng2);
        GapEstimate est = gap_a2rp(inst, x_k, h1, h2);
        return std::pair<double, double>(est.gap, est.sv);
    };

    double gap_sum = 0.0, sv_sum = 0.0;
    if (opts.jobs > 1) {
        std::vector<std::future<std::pair<double, double>>> futs;
        futs.reserve(opts.reps);
        for (int r = 0; r < opts.reps; ++r)
            futs.push_back(std::async(std::launch::async, pilot, r));
        for (auto& f : futs) {
            auto [g, v] = f.get();
            gap_sum += g;
            sv_sum += v;
        }
    } else {
        for (int r = 0; r < opts.reps; ++r) {
            auto [g, v] = pilot(r);
            gap_sum += g;
            sv_sum += v;
        }
    }
    const double avg_gap = gap_sum / opts.reps;
    const double avg_sv = sv_sum / opts.reps;
    if (opts.factor == 0.0) return 0.0;
    if (!(avg_sv > 0.0))
        throw CalibrationError(inst.name + ": calibration degenerate, average sample variance is zero");
    return opts.factor * avg_gap / std::sqrt(avg_sv);
}

void write_run_csv(const RunRecord& rec, std::ostream& out) {
    const std::size_t dx = rec.x_T.size();
    out << "k,n,gap,sv,stop";
    for (std::size_t j = 0; j < dx; ++j) out << ",x" << j;
    out << "\n";
    for (const IterationRow& row : rec.trace) {
        out << row.k << "," << row.n << "," << fmt_double(row.gap) << "," << fmt_double(row.sv)
            << "," << (row.stopped ? 1 : 0);
        for (double v : row.x) out << "," << fmt_double(v);
        out << "\n";
    }
    out << "# summary\n";
    out << "# method=" << method_name(rec.method) << "\n";
    out << "# assess=" << assess_name(rec.assess) << "\n";
    out << "# seed=" << rec.seed << "\n";
    out << "# replication=" << rec.replication << "\n";
    out << "# stopped=" << (rec.stopped ? 1 : 0) << "\n";
    out << "# T=" << rec.T << "\n";
    out << "# n_T=" << rec.n_T << "\n";
    out << "# x_T=" << join_doubles(rec.x_T, ';') << "\n";
    out << "# gap=" << fmt_double(rec.gap_T) << "\n";
    out << "# sv=" << fmt_double(rec.sv_T) << "\n";
    out << "# ci_lo=0\n";
    out << "# ci_hi=" << fmt_double(rec.ci_upper) << "\n";
    out << "# h_prime=" << fmt_double(rec.h_prime) << "\n";
    out << "# dh=" << fmt_double(rec.dh) << "\n";
}

}  // namespace seqgap
