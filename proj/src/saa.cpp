#include "seqgap/saa.hpp"

#include <cmath>

#include "seqgap/errors.hpp"

namespace seqgap {

LinearProgram build_extensive_form(const TwoStageLP& inst, std::span<const Scenario> scenarios) {
    const int dx = inst.dim_x();
    const int m2 = inst.m2();
    const int S = static_cast<int>(scenarios.size());
    if (S == 0) throw SolveError(inst.name + ": extensive form needs at least one scenario");

    double wsum = 0.0;
    for (const Scenario& sc : scenarios) {
        if (!(sc.prob > 0.0)) throw SolveError(inst.name + ": scenario weights must be positive");
        wsum += sc.prob;
    }
    if (std::abs(wsum - 1.0) > 1e-10)
        throw SolveError(inst.name + ": scenario weights sum to " + std::to_string(wsum) + ", expected 1");

    LinearProgram lp;
    lp.nvars = dx + S * inst.n2;
    lp.obj.assign(lp.nvars, 0.0);
    lp.lb.assign(lp.nvars, 0.0);
    lp.ub.assign(lp.nvars, kInf);
    for (int j = 0; j < dx; ++j) {
        lp.obj[j] = inst.c[j];
        lp.lb[j] = inst.lb[j];
        lp.ub[j] = inst.ub[j];
    }

    for (std::size_t r = 0; r < inst.rows.size(); ++r) {
        lp.rows.push_back({inst.rows[r].sense, inst.rows[r].rhs});
        for (int j = 0; j < dx; ++j)
            if (inst.rows[r].coeffs[j] != 0.0)
                lp.entries.push_back({static_cast<int>(r), j, inst.rows[r].coeffs[j]});
    }

    int row = static_cast<int>(inst.rows.size());
    for (int s = 0; s < S; ++s) {
        const Realization rz = realize(inst, scenarios[s].xi);
        const int ybase = dx + s * inst.n2;
        for (int v = 0; v < inst.n2; ++v)
            lp.obj[ybase + v] = scenarios[s].prob * rz.q[v];
        for (int i = 0; i < m2; ++i) {
            lp.rows.push_back({RowSense::LE, rz.R[i]});
            for (int j = 0; j < dx; ++j)
                if (rz.T[i][j] != 0.0) lp.entries.push_back({row, j, rz.T[i][j]});
            for (int v = 0; v < inst.n2; ++v)
                if (inst.W[i][v] != 0.0) lp.entries.push_back({row, ybase + v, inst.W[i][v]});
            ++row;
        }
    }
    return lp;
}

namespace {

SaaResult extract_first_stage(const TwoStageLP& inst, const LPSolution& sol, const char* what) {
    if (sol.status != LPStatus::Optimal)
        throw SolveError(inst.name + ": " + what + " solve " + status_name(sol.status) +
                         (sol.message.empty() ? "" : (": " + sol.message)));
    SaaResult out;
    out.z = sol.objective;
    out.x.assign(sol.x.begin(), sol.x.begin() + inst.dim_x());
    return out;
}

}  // namespace

SaaResult solve_scenarios(const TwoStageLP& inst, std::span<const Scenario> scenarios,
                          const SimplexOptions& opts) {
    LinearProgram lp = build_extensive_form(inst, scenarios);
    return extract_first_stage(inst, solve_lp(lp, opts), "extensive-form");
}

SaaResult solve_saa(const TwoStageLP& inst, const Sample& sample, const SimplexOptions& opts) {
    if (sample.n == 0) throw SolveError(inst.name + ": empty sample");
    std::vector<Scenario> scen(sample.n);
    const double w = 1.0 / static_cast<double>(sample.n);
    for (std::size_t i = 0; i < sample.n; ++i) {
        scen[i].xi.assign(sample.points.begin() + i * sample.d, sample.points.begin() + (i + 1) * sample.d);
        scen[i].prob = w;
    }
    return solve_scenarios(inst, scen, opts);
}

double second_stage_value(const TwoStageLP& inst, std::span<const double> x,
                          std::span<const double> xi, const SimplexOptions& opts) {
    const Realization rz = realize(inst, xi);
    LinearProgram lp;
    lp.nvars = inst.n2;
    lp.obj = rz.q;
    lp.lb.assign(inst.n2, 0.0);
    lp.ub.assign(inst.n2, kInf);
    for (int i = 0; i < inst.m2(); ++i) {
        double b = rz.R[i];
        for (int j = 0; j < inst.dim_x(); ++j) b -= rz.T[i][j] * x[j];
        lp.rows.push_back({RowSense::LE, b});
        for (int v = 0; v < inst.n2; ++v)
            if (inst.W[i][v] != 0.0) lp.entries.push_back({i, v, inst.W[i][v]});
    }
    LPSolution sol = solve_lp(lp, opts);
    if (sol.status == LPStatus::Infeasible)
        throw SolveError(inst.name + ": infeasible recourse; instance violates relatively complete recourse");
    if (sol.status != LPStatus::Optimal)
        throw SolveError(inst.name + ": recourse solve " + status_name(sol.status) +
                         (sol.message.empty() ? "" : (": " + sol.message)));
    return sol.objective;
}

double f_value(const TwoStageLP& inst, std::span<const double> x, std::span<const double> xi,
               const SimplexOptions& opts) {
    double cx = 0.0;
    for (int j = 0; j < inst.dim_x(); ++j) cx += inst.c[j] * x[j];
    return cx + second_stage_value(inst, x, xi, opts);
}

}  // namespace seqgap
