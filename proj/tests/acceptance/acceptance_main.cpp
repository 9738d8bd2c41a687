// Acceptance gate: one check per criterion, each printing a single PASS/FAIL
// line with its runtime. Exit status is the number of failed criteria.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "seqgap/experiments.hpp"
#include "test_support.hpp"

using namespace seqgap;
namespace ts = testsupport;

namespace {

struct Criterion {
    int id;
    const char* label;
    double budget_seconds;
    std::function<void(std::string&)> body;  // throws or appends to the detail string on failure
};

int g_failures = 0;

void expect(bool ok, const std::string& what, std::string& detail) {
    if (!ok) detail += (detail.empty() ? "" : "; ") + what;
}

int hw_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

void run_criterion(const Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    try {
        c.body(detail);
    } catch (const std::exception& e) {
        detail += (detail.empty() ? "" : "; ") + std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_seconds)
        detail += (detail.empty() ? "" : "; ") + std::string("runtime ") + std::to_string(secs) +
                  "s exceeds budget " + std::to_string(c.budget_seconds) + "s";
    if (detail.empty()) {
        std::printf("criterion %2d: PASS  (%6.2fs)  %s\n", c.id, secs, c.label);
    } else {
        ++g_failures;
        std::printf("criterion %2d: FAIL  (%6.2fs)  %s\n    %s\n", c.id, secs, c.label, detail.c_str());
    }
    std::fflush(stdout);
}

Schedule desk_schedule(std::size_t n1 = 100) {
    return Schedule::sublinear(0.191, 0.10,
                               dh_from_initial_size(n1, ScheduleKind::Sublinear, 0.191, 1.5, 0.10));
}

// simple deterministic parallel map over replication indices
void parallel_reps(int reps, const std::function<void(int)>& body) {
    const int jobs = hw_jobs();
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= reps) return;
                body(r);
            }
        });
    for (auto& th : pool) th.join();
}

// ---- criterion bodies -----------------------------------------------------

void c1_constants(std::string& detail) {
    const double cp = compute_cp(0.191, 0.10);
    expect(std::abs(cp - 8.146) <= 1e-3,
           "compute_cp(0.191, 0.10) = " + std::to_string(cp) + ", expected 8.146 +- 1e-3", detail);
    const double cpq = compute_cpq(4.67e-3, 1.5, 0.10);
    expect(std::abs(cpq - 9.69945) <= 1e-4,
           "compute_cpq(4.67e-3, 1.5, 0.10) = " + std::to_string(cpq) +
               ", expected 9.69945 +- 1e-4 (series value for p = 4.67e-3 is 9.686942; the "
               "published constant matches p = 4.627e-3)",
           detail);
}

void c2_sample_sizes(std::string& detail) {
    Schedule s1 = Schedule::sublinear(0.191, 0.10, 0.4039);
    Schedule s2 = Schedule::sublinear(0.191, 0.10, 0.2855);
    Schedule s3 = Schedule::sublinear(0.191, 0.10, 0.1806);
    Schedule s4 = Schedule::superlinear(4.67e-3, 1.5, 0.10, 0.1971);
    expect(min_sample_size(1, s1, Assess::A2RP) == 100, "dh 0.4039 should give n1 = 100", detail);
    expect(min_sample_size(1, s2, Assess::A2RP) == 200, "dh 0.2855 should give n1 = 200", detail);
    expect(min_sample_size(1, s3, Assess::A2RP) == 500, "dh 0.1806 should give n1 = 500", detail);
    expect(min_sample_size(1, s4, Assess::A2RP) == 500, "dh 0.1971 should give n1 = 500", detail);
}

void c3_estimator_inequalities(std::string& detail) {
    std::atomic<int> bad_nonneg{0}, bad_dominance{0};
    std::atomic<long> done{0};
    parallel_reps(1000, [&](int case_i) {
        std::mt19937_64 gen(777000 + static_cast<std::uint64_t>(case_i));
        TwoStageLP inst = ts::random_instance(gen);
        ExactOracle oracle(inst, 5000);
        std::vector<double> x = ts::random_feasible_x(inst, gen);
        const SamplingMethod methods[] = {SamplingMethod::IID, SamplingMethod::TwoI,
                                          SamplingMethod::AV, SamplingMethod::LHS};
        RngStream rng(31337, {static_cast<std::uint64_t>(case_i), purpose::kAssess1, 0});
        Sample s = draw_sample(methods[case_i % 4], 8 + 4 * (case_i % 4), inst, rng);
        GapEstimate est = gap_srp(inst, x, s);
        const double d = d_estimator(inst, x, oracle.x_star(), s);
        if (!(est.gap >= -1e-9)) ++bad_nonneg;
        if (!(est.gap >= d - 1e-9)) ++bad_dominance;
        ++done;
    });
    expect(done == 1000, "expected 1000 cases", detail);
    expect(bad_nonneg == 0, std::to_string(bad_nonneg) + " cases with GAP < -1e-9", detail);
    expect(bad_dominance == 0, std::to_string(bad_dominance) + " cases with GAP < D - 1e-9", detail);
}

void c4_unbiasedness(std::string& detail) {
    TwoStageLP inst = ts::load_bundled("newsvendor4.inst");
    ExactOracle oracle(inst);
    const std::vector<double> x{5.0, 5.0, 5.0, 3.0};
    const double g = oracle.gap(x);
    const int reps = 10000;
    const std::size_t n = 32;
    for (SamplingMethod m : {SamplingMethod::IID, SamplingMethod::TwoI, SamplingMethod::AV,
                             SamplingMethod::LHS}) {
        std::vector<double> ds(reps);
        parallel_reps(reps, [&](int r) {
            RngStream rng(555, {static_cast<std::uint64_t>(r), purpose::kAssess1,
                                static_cast<std::uint32_t>(m)});
            Sample s = draw_sample(m, n, inst, rng);
            ds[r] = d_estimator(inst, x, oracle.x_star(), s);
        });
        const double mean = ts::mean_of(ds);
        const double se = std::sqrt(ts::variance_of(ds) / reps);
        expect(std::abs(mean - g) <= 4 * se,
               std::string(method_name(m)) + ": |" + std::to_string(mean) + " - " +
                   std::to_string(g) + "| > 4se (se = " + std::to_string(se) + ")",
               detail);
    }
}

void c5_variance_ordering(std::string& detail) {
    {
        TwoStageLP inst = ts::load_bundled("newsvendor4.inst");
        ExactOracle oracle(inst);
        const std::vector<double> x{5.0, 5.0, 5.0, 3.0};
        ExactOracle::SigmaSet s = oracle.sigma2(x);
        expect(s.av <= s.iid + 1e-9, "newsvendor4: sigma2_av > sigma2_iid", detail);
        expect(s.two_i == 0.5 * s.iid, "newsvendor4: sigma2_2i != sigma2_iid / 2", detail);
    }
    {
        TwoStageLP inst = ts::load_bundled("margin1.inst");
        ExactOracle oracle(inst);
        const std::vector<double> x{2.0};
        ExactOracle::SigmaSet s = oracle.sigma2(x);
        expect(s.av <= s.iid + 1e-9, "margin1: sigma2_av > sigma2_iid", detail);
        expect(s.two_i == 0.5 * s.iid, "margin1: sigma2_2i != sigma2_iid / 2", detail);
        expect(std::sqrt(s.av) < 0.8 * std::sqrt(s.two_i),
               "margin1 should exhibit sigma_av < 0.8 sigma_2i, got " +
                   std::to_string(std::sqrt(s.av)) + " vs " + std::to_string(std::sqrt(s.two_i)),
               detail);
    }
}

void c6_lhs_variance_reduction(std::string& detail) {
    TwoStageLP inst = ts::load_bundled("uniform3.inst");
    auto additive_mean = [&](const Sample& s) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s.n; ++i)
            for (std::size_t j = 0; j < s.d; ++j) acc += s.point(i, j);
        return acc / static_cast<double>(s.n);
    };

    {  // variance reduction at n = 16 with one-sided 99% confidence
        const int reps = 2000;
        const std::size_t n = 16;
        std::vector<double> lhs(reps), iid(reps);
        parallel_reps(reps, [&](int r) {
            RngStream rl(606, {static_cast<std::uint64_t>(r), 1, 0});
            RngStream ri(606, {static_cast<std::uint64_t>(r), 2, 0});
            lhs[r] = additive_mean(sample_lhs(n, inst, rl));
            iid[r] = additive_mean(sample_iid(n, inst, ri));
        });
        const double v_l = ts::variance_of(lhs), v_i = ts::variance_of(iid);
        const double se = std::sqrt(4.0 / (reps - 1.0));
        expect(std::log(v_i / v_l) > 2.326 * se,
               "log variance ratio " + std::to_string(std::log(v_i / v_l)) + " not > " +
                   std::to_string(2.326 * se),
               detail);
    }

    {  // mean-variance bound at n = 8: Var <= sigma^2 / (n - 1), sigma^2 = 3/12
        const int reps = 5000;
        const std::size_t n = 8;
        std::vector<double> means(reps);
        parallel_reps(reps, [&](int r) {
            RngStream rng(707, {static_cast<std::uint64_t>(r), 1, 0});
            means[r] = additive_mean(sample_lhs(n, inst, rng));
        });
        const double v = ts::variance_of(means);
        const double bound = 0.25 / static_cast<double>(n - 1);
        const double rel_se = std::sqrt(2.0 / (reps - 1.0));
        expect(v <= bound * (1.0 + 3.0 * rel_se),
               "Var(LHS mean) = " + std::to_string(v) + " above bound " + std::to_string(bound),
               detail);
    }
}

void c7_sequential_coverage(std::string& detail) {
    TwoStageLP inst = ts::load_bundled("newsvendor2.inst");
    ExperimentPlan plan;
    plan.methods = {SamplingMethod::IID, SamplingMethod::TwoI, SamplingMethod::AV,
                    SamplingMethod::LHS};
    plan.assess = Assess::A2RP;
    plan.schedule = desk_schedule();
    plan.seed = 20240811;
    plan.replications = 300;
    plan.jobs = hw_jobs();

    CalibrationOptions cal;
    cal.jobs = plan.jobs;
    for (SamplingMethod m : plan.methods)
        plan.h_prime.push_back(calibrate_h_prime(inst, plan.schedule, m, plan.assess, cal, plan.seed));

    auto runs = run_experiment(inst, plan);
    GapReference ref = GapReference::exact(inst);
    for (const MethodRun& run : runs) {
        int capouts = 0;
        double mean_t = 0.0;
        for (const RunRecord& rec : run.records) {
            capouts += rec.stopped ? 0 : 1;
            mean_t += rec.T;
        }
        mean_t /= static_cast<double>(run.records.size());
        expect(capouts == 0,
               std::string(method_name(run.method)) + ": " + std::to_string(capouts) + " cap-outs",
               detail);
        if (capouts) continue;
        CoverageResult cov = coverage(run.records, ref);
        expect(cov.p_hat >= 0.85, std::string(method_name(run.method)) + ": coverage " +
                                      std::to_string(cov.p_hat) + " < 0.85",
               detail);
        expect(std::isfinite(mean_t), "mean T not finite", detail);
    }

    std::filesystem::create_directories("acceptance_out");
    const std::string csv = summary_to_csv(summarize(runs, plan.assess, ref));
    std::ofstream out("acceptance_out/table4.csv", std::ios::binary);
    out << csv;
    expect(csv.rfind("method,assess,reps,mean_T,hw_T,mean_ci,hw_ci,ci_ratio,coverage,hw_coverage",
                     0) == 0,
           "summary csv header mismatch", detail);
    expect(std::count(csv.begin(), csv.end(), '\n') == 5, "summary csv should have 4 method rows",
           detail);
}

void c8_a2rp_conservatism(std::string& detail) {
    TwoStageLP inst = ts::load_bundled("newsvendor2.inst");
    const std::vector<double> x{8.0, 11.0};
    const int reps = 10000;
    const std::size_t n = 16;
    std::vector<double> srp(reps), a2rp(reps);
    parallel_reps(reps, [&](int r) {
        const auto rep = static_cast<std::uint64_t>(r);
        RngStream rs(808, {rep, purpose::kAssess1, 1});
        Sample s = sample_iid(n, inst, rs);
        srp[r] = gap_srp(inst, x, s).gap;
        RngStream r1(808, {rep, purpose::kAssess1, 2});
        RngStream r2(808, {rep, purpose::kAssess2, 2});
        Sample h1 = sample_iid(n / 2, inst, r1);
        Sample h2 = sample_iid(n / 2, inst, r2);
        a2rp[r] = gap_a2rp(inst, x, h1, h2).gap;
    });
    const double mean_srp = ts::mean_of(srp), mean_a2rp = ts::mean_of(a2rp);
    expect(mean_a2rp >= mean_srp,
           "mean A2RP gap " + std::to_string(mean_a2rp) + " < mean SRP gap " +
               std::to_string(mean_srp),
           detail);
}

void c9_anova(std::string& detail) {
    {
        TwoStageLP inst = ts::load_bundled("newsvendor2.inst");
        AnovaResult a = anova_decompose(inst, std::vector<double>{7.0, 8.0});
        expect(std::abs(a.m) <= 1e-9 && std::abs(a.M) <= 1e-9,
               "additive instance: m = " + std::to_string(a.m) + ", M = " + std::to_string(a.M),
               detail);
        expect(a.schedule_eligible(2e-7, 1e-7), "additive instance should be eligible", detail);
    }
    {
        TwoStageLP inst = ts::load_bundled("product2.inst");
        AnovaResult a = anova_decompose(inst, std::vector<double>{0.0});
        expect(a.m == 1.0 && a.M == 1.0,
               "interaction instance: m = " + std::to_string(a.m) + ", M = " + std::to_string(a.M),
               detail);
        expect(!a.schedule_eligible(2e-7, 1e-7), "interaction instance must be ineligible", detail);
        expect(a.schedule_eligible(2.5, 0.25), "eligibility with eps - eps' = 2.25 > 2", detail);
    }
}

void c10_determinism(std::string& detail) {
    namespace fs = std::filesystem;
    const std::string cli = SEQGAP_CLI_PATH;
    const std::string inst = ts::instance_path("newsvendor2.inst");
    auto run = [&](const std::string& outdir, int jobs) {
        fs::remove_all(outdir);
        const std::string cmd = cli + " experiment --instance " + inst +
                                " --methods iid,2i,av,lhs --assess a2rp --n1 100 --hprime 0.05" +
                                " --reps 24 --jobs " + std::to_string(jobs) +
                                " --seed 99 --out " + outdir + " > " + outdir + ".stdout 2>/dev/null";
        return std::system(cmd.c_str());
    };
    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const int rc1 = run("acceptance_out/det1", 1);
    const int rc8 = run("acceptance_out/det8", 8);
    expect(rc1 == 0 && rc8 == 0, "experiment subcommand exited nonzero", detail);
    for (const char* rel : {"/table4.csv", "/runs/iid_a2rp.csv", "/runs/2i_a2rp.csv",
                            "/runs/av_a2rp.csv", "/runs/lhs_a2rp.csv"}) {
        const std::string a = slurp("acceptance_out/det1" + std::string(rel));
        const std::string b = slurp("acceptance_out/det8" + std::string(rel));
        expect(!a.empty(), std::string(rel) + " missing or empty", detail);
        expect(a == b, std::string(rel) + " differs between parallel degrees 1 and 8", detail);
    }
}

void c11_lp_kernel(std::string& detail) {
    std::atomic<int> mismatches{0}, residual_failures{0};
    parallel_reps(200, [&](int case_i) {
        std::mt19937_64 gen(424200 + static_cast<std::uint64_t>(case_i));
        ts::BoxedLP blp = ts::random_boxed_lp(8, 12, gen);
        LPSolution sol = solve_lp(blp.lp);  // internal residual checks at 1e-7
        if (sol.status != LPStatus::Optimal) {
            ++residual_failures;
            return;
        }
        const double oracle = ts::vertex_enum_min(blp);
        if (std::abs(sol.objective - oracle) > 1e-8 * std::max(1.0, std::abs(oracle))) ++mismatches;
        // independent residual re-check in the original space
        for (std::size_t i = 0; i < blp.rows.size(); ++i) {
            double act = 0.0;
            for (int j = 0; j < blp.lp.nvars; ++j) act += blp.rows[i][j] * sol.x[j];
            if (act > blp.rhs[i] + 1e-7 * std::max(1.0, std::abs(blp.rhs[i]))) ++residual_failures;
            if (sol.y[i] > 1e-7) ++residual_failures;  // <= rows price nonpositive
        }
        for (int j = 0; j < blp.lp.nvars; ++j)
            if (sol.x[j] < -1e-7) ++residual_failures;
    });
    expect(mismatches == 0, std::to_string(mismatches) + " objective mismatches vs oracle", detail);
    expect(residual_failures == 0, std::to_string(residual_failures) + " residual failures", detail);
}

}  // namespace

int main() {
    std::printf("acceptance suite (hardware jobs: %d)\n", hw_jobs());
    const std::vector<Criterion> criteria{
        {1, "schedule constants", 1.0, c1_constants},
        {2, "published (dh, n1) sample-size pairs", 1.0, c2_sample_sizes},
        {3, "gap nonnegativity and dominance over D (1000 random cases)", 120.0, c3_estimator_inequalities},
        {4, "D-estimator unbiasedness per sampling method (1e4 replications)", 300.0, c4_unbiasedness},
        {5, "exact variance ordering across sampling methods", 60.0, c5_variance_ordering},
        {6, "stratified variance reduction and the n-1 mean-variance bound", 120.0, c6_lhs_variance_reduction},
        {7, "sequential coverage at alpha = 0.10 with calibrated h'", 600.0, c7_sequential_coverage},
        {8, "averaged two-replication conservatism at equal total n", 180.0, c8_a2rp_conservatism},
        {9, "main-effect residual bounds and schedule eligibility", 10.0, c9_anova},
        {10, "byte-identical experiment outputs across parallel degrees", 300.0, c10_determinism},
        {11, "LP kernel against vertex enumeration with residual checks", 60.0, c11_lp_kernel},
    };
    for (const Criterion& c : criteria) run_criterion(c);
    if (g_failures == 0) {
        std::printf("all %zu criteria passed\n", criteria.size());
    } else {
        std::printf("%d criteria FAILED\n", g_failures);
    }
    return g_failures;
}
