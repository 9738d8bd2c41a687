// Command-line front end: solve, assess, oracle, calibrate, sequential and
// experiment subcommands over the instance file format documented in the
// README. All primary outputs are CSV with stable schemas; a fixed seed
// reproduces every output byte for byte.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "seqgap/experiments.hpp"
#include "seqgap/textio.hpp"

using namespace seqgap;

namespace {

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<SamplingMethod> parse_methods(const std::string& text) {
    std::vector<SamplingMethod> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(method_from_name(tok));
    if (out.empty()) throw ConfigError("--methods list is empty");
    return out;
}

struct ScheduleFlags {
    std::string kind = "sublinear";
    double p = 0.0;  // 0 = pick the default for the kind
    double q = 1.5;
    double alpha = 0.10;
    std::size_t n1 = 0;
    double dh = 0.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--schedule", kind, "sample-size schedule: sublinear or superlinear")
            ->check(CLI::IsMember({"sublinear", "superlinear"}))
            ->capture_default_str();
        cmd->add_option("--p", p, "schedule rate constant (default 0.191 sublinear, 4.67e-3 superlinear)");
        cmd->add_option("--q", q, "superlinear exponent (> 1)")->capture_default_str();
        cmd->add_option("--alpha", alpha, "confidence parameter in (0,1)")->capture_default_str();
        cmd->add_option("--n1", n1, "initial sample size; sets dh = h - h'");
        cmd->add_option("--dh", dh, "h - h' directly (overrides --n1)");
    }

    Schedule build() const {
        const bool sup = kind == "superlinear";
        const double use_p = p > 0.0 ? p : (sup ? 4.67e-3 : 0.191);
        double use_dh = dh;
        if (use_dh <= 0.0) {
            if (n1 == 0) throw ConfigError("give --n1 or --dh to size the schedule");
            use_dh = dh_from_initial_size(n1, sup ? ScheduleKind::Superlinear : ScheduleKind::Sublinear,
                                          use_p, q, alpha);
        }
        return sup ? Schedule::superlinear(use_p, q, alpha, use_dh)
                   : Schedule::sublinear(use_p, alpha, use_dh);
    }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path);
    out << content;
}

GapReference make_reference(const TwoStageLP& inst, std::uint64_t seed, std::size_t solve_n,
                            std::size_t eval_n) {
    try {
        return GapReference::exact(inst);
    } catch (const InstanceError&) {
        std::cerr << "note: instance not enumerable, using an approximate stratified gap reference\n";
        return GapReference::approximate(inst, seed, solve_n, eval_n);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sequential sampling with variance reduction for two-stage stochastic LPs"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read default flag values from an INI file");

    std::string instance_path;
    std::uint64_t seed = 0;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--instance", instance_path, "instance file")->required();
        cmd->add_option("--seed", seed, "random seed")->envname("SEQGAP_SEED")->capture_default_str();
    };

    // ---- solve ----
    auto* cs = app.add_subcommand("solve", "solve one SAA (or the exact problem) by extensive form");
    add_common(cs);
    std::size_t solve_n = 0;
    bool solve_exact = false;
    std::string solve_method = "iid", export_lp;
    std::uint64_t solve_rep = 0;
    cs->add_option("--n", solve_n, "sample size for the SAA");
    cs->add_flag("--exact", solve_exact, "solve over the full scenario support");
    cs->add_option("--method", solve_method, "sampling method: iid, 2i, av, lhs")->capture_default_str();
    cs->add_option("--rep", solve_rep, "replication index for the sample stream")->capture_default_str();
    cs->add_option("--export-lp", export_lp, "also write the extensive form in LP text format");

    // ---- assess ----
    auto* ca = app.add_subcommand("assess", "one-shot gap and variance estimate for a candidate");
    add_common(ca);
    std::string assess_x, assess_method = "iid", assess_proc = "a2rp", dump_samples;
    std::size_t assess_n = 100;
    double assess_alpha = 0.10, assess_hprime = 0.0, assess_dh = 0.0;
    std::uint64_t assess_rep = 0;
    ca->add_option("--x", assess_x, "candidate first-stage point v1,v2,...")->required();
    ca->add_option("--method", assess_method, "sampling method")->capture_default_str();
    ca->add_option("--assess", assess_proc, "srp or a2rp")->capture_default_str();
    ca->add_option("--n", assess_n, "total sample size")->capture_default_str();
    ca->add_option("--alpha", assess_alpha, "confidence parameter for the one-shot interval")->capture_default_str();
    ca->add_option("--hprime", assess_hprime, "h' for the sequential-form interval")->capture_default_str();
    ca->add_option("--dh", assess_dh, "h - h' for the sequential-form interval (default: sized from n)");
    ca->add_option("--rep", assess_rep, "replication index")->capture_default_str();
    ca->add_option("--dump-samples", dump_samples, "write the drawn sample as CSV");

    // ---- oracle ----
    auto* co = app.add_subcommand("oracle", "exact gap and per-method variances by enumeration");
    add_common(co);
    std::string oracle_x, alt_optima_text;
    bool oracle_anova = false;
    std::size_t oracle_cap = 200000;
    double oracle_eps = 2e-7, oracle_eps_prime = 1e-7;
    co->add_option("--x", oracle_x, "candidate point v1,v2,...")->required();
    co->add_option("--alt-optima", alt_optima_text, "alternative optima 'v1,v2;v3,v4' for min/max variances");
    co->add_flag("--anova", oracle_anova, "also print main-effect residual bounds");
    co->add_option("--cap", oracle_cap, "scenario enumeration cap")->capture_default_str();
    co->add_option("--eps", oracle_eps, "eps for the eligibility report")->capture_default_str();
    co->add_option("--eps-prime", oracle_eps_prime, "eps' for the eligibility report")->capture_default_str();

    // ---- calibrate ----
    auto* cc = app.add_subcommand("calibrate", "estimate h' from truncated pilot runs");
    add_common(cc);
    ScheduleFlags cc_sched;
    cc_sched.attach(cc);
    std::string cal_method = "iid", cal_assess = "a2rp";
    CalibrationOptions cal_opts;
    cc->add_option("--method", cal_method, "sampling method")->capture_default_str();
    cc->add_option("--assess", cal_assess, "srp or a2rp")->capture_default_str();
    cc->add_option("--reps", cal_opts.reps, "pilot replications")->capture_default_str();
    cc->add_option("--iters", cal_opts.iters, "pilot iterations")->capture_default_str();
    cc->add_option("--factor", cal_opts.factor, "tightening factor")->capture_default_str();
    cc->add_option("--jobs", cal_opts.jobs, "parallel pilot replications")->capture_default_str();

    // ---- sequential ----
    auto* cq = app.add_subcommand("sequential", "one sequential run to the stopping rule");
    add_common(cq);
    ScheduleFlags cq_sched;
    cq_sched.attach(cq);
    std::string seq_method = "iid", seq_assess = "a2rp", seq_trace, seq_fixed_x;
    double seq_hprime = -1.0, seq_eps = 2e-7, seq_eps_prime = 1e-7, seq_sv_bound = 0.0;
    int seq_cap = 200;
    std::uint64_t seq_rep = 0;
    bool seq_calibrate = false;
    CalibrationOptions seq_cal_opts;
    cq->add_option("--method", seq_method, "sampling method")->capture_default_str();
    cq->add_option("--assess", seq_assess, "srp or a2rp")->capture_default_str();
    cq->add_option("--hprime", seq_hprime, "stopping-rule slack h'");
    cq->add_flag("--calibrate", seq_calibrate, "estimate h' from pilot runs first");
    cq->add_option("--calib-reps", seq_cal_opts.reps, "pilot replications")->capture_default_str();
    cq->add_option("--calib-iters", seq_cal_opts.iters, "pilot iterations")->capture_default_str();
    cq->add_option("--calib-jobs", seq_cal_opts.jobs, "parallel pilots")->capture_default_str();
    cq->add_option("--eps", seq_eps, "interval pad eps")->capture_default_str();
    cq->add_option("--eps-prime", seq_eps_prime, "stopping pad eps'")->capture_default_str();
    cq->add_option("--cap", seq_cap, "iteration cap")->capture_default_str();
    cq->add_option("--rep", seq_rep, "replication index")->capture_default_str();
    cq->add_option("--trace", seq_trace, "write the per-iteration trace CSV here");
    cq->add_option("--fixed-x", seq_fixed_x, "candidate source pinned to this point");
    cq->add_option("--sv-bound", seq_sv_bound, "absolute rule: also require sqrt(SV) <= b");

    // ---- experiment ----
    auto* ce = app.add_subcommand("experiment", "replicated coverage study and comparison tables");
    add_common(ce);
    ScheduleFlags ce_sched;
    ce_sched.attach(ce);
    std::string ce_methods = "iid,2i,av,lhs", ce_assess = "a2rp", ce_out = "out", ce_hprime_text;
    int ce_reps = 300, ce_jobs = 1, ce_cap = 200;
    double ce_eps = 2e-7, ce_eps_prime = 1e-7;
    bool ce_calibrate = false, ce_table6 = false;
    std::string ce_t6x;
    std::size_t ce_t6n = 0, ce_ref_solve = 500, ce_ref_eval = 50000;
    CalibrationOptions ce_cal_opts;
    ce->add_option("--methods", ce_methods, "comma list of sampling methods")->capture_default_str();
    ce->add_option("--assess", ce_assess, "srp or a2rp")->capture_default_str();
    ce->add_option("--hprime", ce_hprime_text, "h' values (one, or comma list per method)");
    ce->add_flag("--calibrate", ce_calibrate, "calibrate h' per method");
    ce->add_option("--calib-reps", ce_cal_opts.reps, "pilot replications")->capture_default_str();
    ce->add_option("--calib-iters", ce_cal_opts.iters, "pilot iterations")->capture_default_str();
    ce->add_option("--reps", ce_reps, "replications per method")->capture_default_str();
    ce->add_option("--jobs", ce_jobs, "parallel replications")->capture_default_str();
    ce->add_option("--cap", ce_cap, "iteration cap")->capture_default_str();
    ce->add_option("--eps", ce_eps, "interval pad eps")->capture_default_str();
    ce->add_option("--eps-prime", ce_eps_prime, "stopping pad eps'")->capture_default_str();
    ce->add_option("--out", ce_out, "output directory")->capture_default_str();
    ce->add_flag("--table6", ce_table6, "also run the fixed-candidate comparison table");
    ce->add_option("--table6-x", ce_t6x, "candidate for the comparison (default: an independent SAA)");
    ce->add_option("--table6-n", ce_t6n, "one-shot size for the comparison (default n1)");
    ce->add_option("--ref-solve-n", ce_ref_solve, "reference solve size for non-enumerable instances")->capture_default_str();
    ce->add_option("--ref-eval-n", ce_ref_eval, "reference evaluation size for non-enumerable instances")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        TwoStageLP inst = load_instance(instance_path);

        if (cs->parsed()) {
            SaaResult res;
            LinearProgram lp;
            if (solve_exact) {
                auto scen = enumerate_scenarios(inst, 200000);
                lp = build_extensive_form(inst, scen);
                res = solve_scenarios(inst, scen);
            } else {
                if (solve_n == 0) throw ConfigError("give --n or --exact");
                RngStream rng(seed, {solve_rep, purpose::kSolution, 1});
                Sample s = draw_sample(method_from_name(solve_method), solve_n, inst, rng);
                std::vector<Scenario> scen(s.n);
                for (std::size_t i = 0; i < s.n; ++i) {
                    scen[i].xi.assign(s.points.begin() + i * s.d, s.points.begin() + (i + 1) * s.d);
                    scen[i].prob = 1.0 / static_cast<double>(s.n);
                }
                lp = build_extensive_form(inst, scen);
                res = solve_saa(inst, s);
            }
            if (!export_lp.empty()) {
                std::ofstream out(export_lp);
                export_lp_text(lp, out);
            }
            std::cout << "z";
            for (int j = 0; j < inst.dim_x(); ++j) std::cout << ",x" << j;
            std::cout << "\n" << fmt_double(res.z);
            for (double v : res.x) std::cout << "," << fmt_double(v);
            std::cout << "\n";
            return 0;
        }

        if (ca->parsed()) {
            std::vector<double> x = parse_point(assess_x);
            const SamplingMethod m = method_from_name(assess_method);
            const Assess a = assess_from_name(assess_proc);
            GapEstimate est;
            if (a == Assess::SRP) {
                RngStream rng(seed, {assess_rep, purpose::kAssess1, 1});
                Sample s = draw_sample(m, assess_n, inst, rng);
                if (!dump_samples.empty()) {
                    std::ofstream out(dump_samples);
                    dump_sample_csv(s, out);
                }
                est = gap_srp(inst, x, s);
            } else {
                RngStream r1(seed, {assess_rep, purpose::kAssess1, 1});
                RngStream r2(seed, {assess_rep, purpose::kAssess2, 1});
                Sample h1 = draw_sample(m, assess_n / 2, inst, r1);
                Sample h2 = draw_sample(m, assess_n / 2, inst, r2);
                if (!dump_samples.empty()) {
                    std::ofstream out(dump_samples);
                    dump_sample_csv(h1, out);
                    dump_sample_csv(h2, out);
                }
                est = gap_a2rp(inst, x, h1, h2);
            }
            const double dh = assess_dh > 0.0
                                  ? assess_dh
                                  : dh_from_initial_size(assess_n, ScheduleKind::Sublinear, 0.191, 1.5, assess_alpha);
            const double ci_seq = (assess_hprime + dh) * std::sqrt(est.sv) + 2e-7;
            std::cout << "method,assess,n,gap,sv,ci_nonseq,ci_seq\n";
            std::cout << method_name(est.method) << "," << assess_name(est.assess) << "," << est.n
                      << "," << fmt_double(est.gap) << "," << fmt_double(est.sv) << ","
                      << fmt_double(nonsequential_ci_upper(est, assess_alpha)) << ","
                      << fmt_double(ci_seq) << "\n";
            return 0;
        }

        if (co->parsed()) {
            std::vector<double> x = parse_point(oracle_x);
            std::vector<std::vector<double>> alts;
            if (!alt_optima_text.empty()) {
                std::stringstream ss(alt_optima_text);
                std::string tok;
                while (std::getline(ss, tok, ';')) alts.push_back(parse_point(tok));
            }
            ExactQuantities q = exact_quantities(inst, x, alts, oracle_cap);
            std::cout << "g_x,sigma_iid,sigma_2i,sigma_av,z_star\n";
            std::cout << fmt_double(q.g_x) << "," << fmt_double(std::sqrt(q.sigma2.iid)) << ","
                      << fmt_double(std::sqrt(q.sigma2.two_i)) << ","
                      << fmt_double(std::sqrt(q.sigma2.av)) << "," << fmt_double(q.z_star) << "\n";
            if (oracle_anova) {
                AnovaResult an = anova_decompose(inst, x, oracle_cap);
                std::cout << "m,M,eligible\n";
                std::cout << fmt_double(an.m) << "," << fmt_double(an.M) << ","
                          << (an.schedule_eligible(oracle_eps, oracle_eps_prime) ? 1 : 0) << "\n";
            }
            return 0;
        }

        if (cc->parsed()) {
            Schedule sched = cc_sched.build();
            const double hp = calibrate_h_prime(inst, sched, method_from_name(cal_method),
                                                assess_from_name(cal_assess), cal_opts, seed);
            std::cout << "method,assess,h_prime\n";
            std::cout << cal_method << "," << cal_assess << "," << fmt_double(hp) << "\n";
            return 0;
        }

        if (cq->parsed()) {
            SequentialConfig cfg;
            cfg.method = method_from_name(seq_method);
            cfg.assess = assess_from_name(seq_assess);
            cfg.schedule = cq_sched.build();
            cfg.eps = seq_eps;
            cfg.eps_prime = seq_eps_prime;
            cfg.cap = seq_cap;
            cfg.seed = seed;
            cfg.replication = seq_rep;
            if (seq_sv_bound > 0.0) cfg.sv_bound = seq_sv_bound;
            if (seq_calibrate)
                cfg.h_prime = calibrate_h_prime(inst, cfg.schedule, cfg.method, cfg.assess, seq_cal_opts, seed);
            else if (seq_hprime >= 0.0)
                cfg.h_prime = seq_hprime;
            else
                throw ConfigError("give --hprime or --calibrate");

            RunRecord rec = seq_fixed_x.empty()
                                ? run_sequential(inst, cfg)
                                : run_sequential(inst, cfg, make_fixed_candidate_source(parse_point(seq_fixed_x)));
            if (!seq_trace.empty()) {
                std::ofstream out(seq_trace, std::ios::binary);
                write_run_csv(rec, out);
            }
            std::cout << "method,assess,h_prime,stopped,T,n_T,gap,sv,ci_lo,ci_hi,x_T\n";
            std::cout << method_name(rec.method) << "," << assess_name(rec.assess) << ","
                      << fmt_double(rec.h_prime) << "," << (rec.stopped ? 1 : 0) << "," << rec.T
                      << "," << rec.n_T << "," << fmt_double(rec.gap_T) << ","
                      << fmt_double(rec.sv_T) << ",0," << fmt_double(rec.ci_upper) << ","
                      << join_doubles(rec.x_T, ';') << "\n";
            std::cerr << "wall seconds: " << rec.wall_seconds << "\n";
            return 0;
        }

        if (ce->parsed()) {
            ExperimentPlan plan;
            plan.methods = parse_methods(ce_methods);
            plan.assess = assess_from_name(ce_assess);
            plan.schedule = ce_sched.build();
            plan.eps = ce_eps;
            plan.eps_prime = ce_eps_prime;
            plan.cap = ce_cap;
            plan.seed = seed;
            plan.replications = ce_reps;
            plan.jobs = ce_jobs;

            if (ce_calibrate) {
                ce_cal_opts.jobs = ce_jobs;
                for (SamplingMethod m : plan.methods)
                    plan.h_prime.push_back(
                        calibrate_h_prime(inst, plan.schedule, m, plan.assess, ce_cal_opts, seed));
            } else if (!ce_hprime_text.empty()) {
                std::vector<double> hs = parse_point(ce_hprime_text);
                if (hs.size() == 1) hs.assign(plan.methods.size(), hs[0]);
                if (hs.size() != plan.methods.size())
                    throw ConfigError("--hprime needs one value or one per method");
                plan.h_prime = hs;
            } else {
                throw ConfigError("give --hprime or --calibrate");
            }

            std::filesystem::create_directories(ce_out);
            std::filesystem::create_directories(ce_out + "/runs");

            auto runs = run_experiment(inst, plan);
            GapReference ref = make_reference(inst, seed, ce_ref_solve, ce_ref_eval);
            std::string summary = summary_to_csv(summarize(runs, plan.assess, ref));
            write_file(ce_out + "/table4.csv", summary);
            for (const MethodRun& run : runs) {
                const std::string path = ce_out + "/runs/" + method_name(run.method) + "_" +
                                         assess_name(plan.assess) + ".csv";
                write_file(path, runs_to_csv(run, inst.dim_x()));
            }
            std::cout << summary;

            if (ce_table6) {
                ComparisonPlan cp;
                cp.methods = plan.methods;
                cp.assess = plan.assess;
                cp.schedule = plan.schedule;
                cp.h_prime = plan.h_prime;
                cp.eps = ce_eps;
                cp.eps_prime = ce_eps_prime;
                cp.alpha = plan.schedule.alpha;
                cp.cap = ce_cap;
                cp.seed = seed;
                cp.replications = ce_reps;
                cp.jobs = ce_jobs;
                cp.n = ce_t6n ? ce_t6n : min_sample_size(1, plan.schedule, plan.assess);
                if (!ce_t6x.empty()) {
                    cp.x = parse_point(ce_t6x);
                } else {
                    RngStream rng(seed, {0, purpose::kReference, 2});
                    Sample s = sample_iid(cp.n, inst, rng);
                    cp.x = solve_saa(inst, s).x;
                }
                std::string table6 = comparison_to_csv(compare_nonsequential(inst, cp));
                write_file(ce_out + "/table6.csv", table6);
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
