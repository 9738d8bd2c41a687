#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "seqgap/saa.hpp"
#include "seqgap/sampling.hpp"
#include "test_support.hpp"

using namespace seqgap;
namespace ts = testsupport;

TEST_CASE("simplex handles the textbook cases") {
    SUBCASE("max x st x <= 1") {
        LinearProgram lp;
        lp.nvars = 1;
        lp.obj = {-1.0};  // maximize x
        lp.lb = {0.0};
        lp.ub = {kInf};
        lp.rows.push_back({RowSense::LE, 1.0});
        lp.entries.push_back({0, 0, 1.0});
        LPSolution sol = solve_lp(lp);
        REQUIRE(sol.status == LPStatus::Optimal);
        CHECK(sol.x[0] == doctest::Approx(1.0));
        CHECK(sol.objective == doctest::Approx(-1.0));
        CHECK(sol.dual_objective == doctest::Approx(sol.objective).epsilon(1e-9));
    }

    SUBCASE("infeasible") {
        LinearProgram lp;
        lp.nvars = 1;
        lp.obj = {0.0};
        lp.lb = {0.0};
        lp.ub = {kInf};
        lp.rows.push_back({RowSense::LE, -1.0});
        lp.entries.push_back({0, 0, 1.0});
        CHECK(solve_lp(lp).status == LPStatus::Infeasible);
    }

    SUBCASE("unbounded") {
        LinearProgram lp;
        lp.nvars = 1;
        lp.obj = {-1.0};
        lp.lb = {0.0};
        lp.ub = {kInf};
        CHECK(solve_lp(lp).status == LPStatus::Unbounded);
    }

    SUBCASE("equality rows and general bounds") {
        // min x0 + 2 x1  st  x0 + x1 = 3, x0 - x1 >= -1, 0.5 <= x <= 4
        // x1 drops to its bound: x = (2.5, 0.5), objective 3.5
        LinearProgram lp;
        lp.nvars = 2;
        lp.obj = {1.0, 2.0};
        lp.lb = {0.5, 0.5};
        lp.ub = {4.0, 4.0};
        lp.rows.push_back({RowSense::EQ, 3.0});
        lp.rows.push_back({RowSense::GE, -1.0});
        lp.entries = {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, -1.0}};
        LPSolution sol = solve_lp(lp);
        REQUIRE(sol.status == LPStatus::Optimal);
        CHECK(sol.x[0] == doctest::Approx(2.5));
        CHECK(sol.x[1] == doctest::Approx(0.5));
        CHECK(sol.objective == doctest::Approx(3.5));
        CHECK(std::abs(sol.objective - sol.dual_objective) <= 1e-7);
    }
}

TEST_CASE("pivot cap reports stalled instead of a wrong answer") {
    std::mt19937_64 gen(8);
    ts::BoxedLP blp = ts::random_boxed_lp(8, 12, gen);
    SimplexOptions opts;
    opts.max_pivots = 1;
    LPSolution sol = solve_lp(blp.lp, opts);
    CHECK(sol.status == LPStatus::Stalled);
    CHECK_FALSE(sol.message.empty());
}

TEST_CASE("200 random LPs match the vertex-enumeration oracle") {
    std::mt19937_64 gen(20240811);
    for (int case_i = 0; case_i < 200; ++case_i) {
        ts::BoxedLP blp = ts::random_boxed_lp(8, 12, gen);
        LPSolution sol = solve_lp(blp.lp);
        REQUIRE_MESSAGE(sol.status == LPStatus::Optimal, "case ", case_i, ": ", sol.message);
        const double oracle = ts::vertex_enum_min(blp);
        CHECK_MESSAGE(std::abs(sol.objective - oracle) <= 1e-8 * std::max(1.0, std::abs(oracle)),
                      "case ", case_i, " simplex ", sol.objective, " oracle ", oracle);
        CHECK(std::abs(sol.objective - sol.dual_objective) <= 1e-7 * std::max(1.0, std::abs(sol.objective)));
    }
}

TEST_CASE("extensive form basics") {
    TwoStageLP inst = ts::load_bundled("newsvendor2.inst");

    SUBCASE("single scenario is the deterministic program") {
        std::vector<Scenario> one{{{8.0, 7.0}, 1.0}};
        SaaResult res = solve_scenarios(inst, one);
        // order exactly the demand: stock beyond demand loses money on both products
        CHECK(res.x[0] == doctest::Approx(8.0));
        CHECK(res.x[1] == doctest::Approx(7.0));
        const double expect = 8.0 + 7.0 + ts::newsvendor_recourse(8.0, 8.0, 3.0, 0.25) +
                              ts::newsvendor_recourse(7.0, 7.0, 4.0, 0.5);
        CHECK(res.z == doctest::Approx(expect).epsilon(1e-9));
    }

    SUBCASE("weights must be positive and sum to one") {
        std::vector<Scenario> bad{{{8.0, 7.0}, 0.5}};
        CHECK_THROWS_AS(solve_scenarios(inst, bad), SolveError);
    }

    SUBCASE("duplicate scenarios merged or not give the same value") {
        std::vector<Scenario> dup{{{8.0, 7.0}, 0.25}, {{8.0, 7.0}, 0.25}, {{6.0, 9.0}, 0.5}};
        std::vector<Scenario> merged{{{8.0, 7.0}, 0.5}, {{6.0, 9.0}, 0.5}};
        CHECK(solve_scenarios(inst, dup).z ==
              doctest::Approx(solve_scenarios(inst, merged).z).epsilon(1e-9));
    }

    SUBCASE("scenario order does not move the optimum") {
        auto scen = enumerate_scenarios(inst, 1000);
        SaaResult a = solve_scenarios(inst, scen);
        std::reverse(scen.begin(), scen.end());
        SaaResult b = solve_scenarios(inst, scen);
        CHECK(std::abs(a.z - b.z) <= 1e-9 * std::max(1.0, std::abs(a.z)));
    }
}

TEST_CASE("solve_saa") {
    TwoStageLP inst = ts::load_bundled("newsvendor2.inst");

    SUBCASE("full support with true weights reproduces the true problem") {
        auto scen = enumerate_scenarios(inst, 1000);
        SaaResult truth = solve_scenarios(inst, scen);
        CHECK(truth.x[0] == doctest::Approx(8.0));
        CHECK(truth.x[1] == doctest::Approx(9.0));
        // SAA over a sample that happens to be the full support, equal weights
        // differs (weights), but both must solve to optimality
        RngStream rng(1, {0, 1, 1});
        Sample s = sample_iid(40, inst, rng);
        SaaResult saa = solve_saa(inst, s);
        CHECK(std::isfinite(saa.z));
        REQUIRE(saa.x.size() == 2);
    }

    SUBCASE("n = 1 gives the deterministic program for that draw") {
        RngStream rng(2, {0, 1, 1});
        Sample s = sample_iid(1, inst, rng);
        SaaResult saa = solve_saa(inst, s);
        std::vector<Scenario> one{{{s.point(0, 0), s.point(0, 1)}, 1.0}};
        CHECK(saa.z == doctest::Approx(solve_scenarios(inst, one).z).epsilon(1e-10));
    }

    SUBCASE("sampled optimal value is biased low on average") {
        auto scen = enumerate_scenarios(inst, 1000);
        const double z_true = solve_scenarios(inst, scen).z;
        const int reps = 500;
        std::vector<double> zs;
        for (int r = 0; r < reps; ++r) {
            RngStream rng(33, {static_cast<std::uint64_t>(r), 1, 0});
            Sample s = sample_iid(40, inst, rng);
            zs.push_back(solve_saa(inst, s).z);
        }
        CHECK(ts::mean_of(zs) <= z_true + 1e-9);
    }
}

TEST_CASE("second-stage evaluation") {
    TwoStageLP inst = ts::load_bundled("newsvendor2.inst");

    SUBCASE("zero-cost recourse evaluates to zero") {
        TwoStageLP zero = inst;
        zero.q0.assign(zero.q0.size(), 0.0);
        std::vector<double> x{5.0, 5.0};
        std::vector<double> xi{8.0, 7.0};
        CHECK(second_stage_value(zero, x, xi) == doctest::Approx(0.0));
    }

    SUBCASE("matches the closed-form newsvendor recourse") {
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> xr(0.0, 14.0);
        for (int rep = 0; rep < 64; ++rep) {
            std::vector<double> x{xr(gen), xr(gen)};
            for (double d1 : inst.marginals[0].values)
                for (double d2 : inst.marginals[1].values) {
                    std::vector<double> xi{d1, d2};
                    const double expect = ts::newsvendor_recourse(x[0], d1, 3.0, 0.25) +
                                          ts::newsvendor_recourse(x[1], d2, 4.0, 0.5);
                    CHECK(second_stage_value(inst, x, xi) == doctest::Approx(expect).epsilon(1e-9));
                }
        }
    }

    SUBCASE("monotone instance responds monotonically along a component") {
        // uniform3: larger xi tightens y >= sum(xi) - x, so h is nondecreasing
        TwoStageLP u3 = ts::load_bundled("uniform3.inst");
        std::vector<double> x{1.0};
        double prev = -1e300;
        for (double v : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            std::vector<double> xi{v, 0.4, 0.6};
            const double h = second_stage_value(u3, x, xi);
            CHECK(h >= prev - 1e-12);
            prev = h;
        }
    }

    SUBCASE("infeasible recourse names the contract") {
        TwoStageLP broken = inst;
        // impossible row: 0*y <= -1
        broken.W.push_back({0.0, 0.0, 0.0, 0.0});
        broken.R0.push_back(-1.0);
        broken.T0.push_back({0.0, 0.0});
        std::vector<double> x{5.0, 5.0};
        std::vector<double> xi{8.0, 7.0};
        CHECK_THROWS_WITH_AS(second_stage_value(broken, x, xi),
                             doctest::Contains("relatively complete recourse"), SolveError);
    }
}

TEST_CASE("f_value consistency checks") {
    TwoStageLP inst = ts::load_bundled("newsvendor2.inst");

    SUBCASE("c = 0 collapses to the recourse value") {
        TwoStageLP free = inst;
        free.c.assign(free.c.size(), 0.0);
        std::vector<double> x{6.0, 6.0};
        std::vector<double> xi{8.0, 7.0};
        CHECK(f_value(free, x, xi) == doctest::Approx(second_stage_value(free, x, xi)));
    }

    SUBCASE("f at a single scenario equals the pinned extensive form") {
        std::vector<double> xi{6.0, 5.0};
        std::vector<Scenario> one{{xi, 1.0}};
        // pin x by shrinking the box
        TwoStageLP pinned = inst;
        pinned.lb = {5.0, 5.0};
        pinned.ub = {5.0, 5.0};
        std::vector<double> x{5.0, 5.0};
        CHECK(solve_scenarios(pinned, one).z == doctest::Approx(f_value(inst, x, xi)).epsilon(1e-10));
    }

    SUBCASE("declared bound holds on random probes") {
        std::mt19937_64 gen(77);
        for (const char* name : {"newsvendor2.inst", "newsvendor4.inst", "margin1.inst",
                                 "product2.inst", "uniform3.inst"}) {
            TwoStageLP bd = ts::load_bundled(name);
            REQUIRE(bd.declared_bound.has_value());
            RngStream rng(19, {0, 1, 0});
            Sample s = sample_iid(1000 / 5, bd, rng);
            for (std::size_t i = 0; i < s.n; ++i) {
                std::vector<double> x = ts::random_feasible_x(bd, gen);
                std::vector<double> xi(s.d);
                for (std::size_t j = 0; j < s.d; ++j) xi[j] = s.point(i, j);
                CHECK(std::abs(f_value(bd, x, xi)) <= *bd.declared_bound);
            }
        }
    }
}

TEST_CASE("saa lower-bound property") {
    TwoStageLP inst = ts::load_bundled("newsvendor2.inst");
    std::mt19937_64 gen(4242);
    for (int rep = 0; rep < 30; ++rep) {
        RngStream rng(55, {static_cast<std::uint64_t>(rep), 1, 0});
        Sample s = sample_iid(16, inst, rng);
        SaaResult saa = solve_saa(inst, s);
        std::vector<double> y = ts::random_feasible_x(inst, gen);
        double mean_f = 0.0;
        for (std::size_t i = 0; i < s.n; ++i) {
            std::vector<double> xi{s.point(i, 0), s.point(i, 1)};
            mean_f += f_value(inst, y, xi);
        }
        mean_f /= static_cast<double>(s.n);
        CHECK(saa.z <= mean_f + 1e-8);
    }
}

TEST_CASE("first-stage rows bind in the extensive form") {
    TwoStageLP inst = ts::load_bundled("newsvendor2.inst");
    // unconstrained optimum is (8, 9); a joint budget forces it down
    FirstStageRow budget;
    budget.sense = RowSense::LE;
    budget.rhs = 13.0;
    budget.coeffs = {1.0, 1.0};
    inst.rows.push_back(budget);
    auto scen = enumerate_scenarios(inst, 1000);
    SaaResult res = solve_scenarios(inst, scen);
    CHECK(res.x[0] + res.x[1] <= 13.0 + 1e-9);
    // the constrained value cannot beat the unconstrained one
    TwoStageLP free = ts::load_bundled("newsvendor2.inst");
    CHECK(res.z >= solve_scenarios(free, scen).z - 1e-9);
}

TEST_CASE("lp text export") {
    LinearProgram lp;
    lp.nvars = 2;
    lp.obj = {1.0, -2.0};
    lp.lb = {0.0, 0.0};
    lp.ub = {4.0, kInf};
    lp.rows.push_back({RowSense::LE, 5.0});
    lp.entries = {{0, 0, 1.0}, {0, 1, 3.0}};
    std::ostringstream out;
    export_lp_text(lp, out);
    const std::string text = out.str();
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("r0: + 1 x0 + 3 x1 <= 5") != std::string::npos);
    CHECK(text.find("Bounds") != std::string::npos);
}
