#include <algorithm>
#include <cmath>
#include <ostream>

#include "seqgap/errors.hpp"
#include "seqgap/lp.hpp"
#include "seqgap/textio.hpp"

namespace seqgap {

const char* status_name(LPStatus s) {
    switch (s) {
        case LPStatus::Optimal: return "optimal";
        case LPStatus::Infeasible: return "infeasible";
        case LPStatus::Unbounded: return "unbounded";
        case LPStatus::Stalled: return "stalled";
    }
    return "?";
}

namespace {

struct Tableau {
    int m = 0;       // internal rows
    int ncols = 0;   // structural + slack + artificial
    int wid = 0;     // ncols + 1, rhs in the last column
    std::vector<double> a;    // m x wid
    std::vector<double> z;    // reduced costs; z[wid-1] = -objective
    std::vector<int> basis;   // basic column per row
    std::vector<char> banned; // columns barred from entering (artificials in phase 2)

    double* row(int r) { return a.data() + static_cast<std::size_t>(r) * wid; }
    const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * wid; }

    void pivot(int pr, int pc) {
        double* prow = row(pr);
        const double inv = 1.0 / prow[pc];
        for (int j = 0; j < wid; ++j) prow[j] *= inv;
        prow[pc] = 1.0;
        for (int r = 0; r < m; ++r) {
            if (r == pr) continue;
            double* rr = row(r);
            const double f = rr[pc];
            if (f == 0.0) continue;
            for (int j = 0; j < wid; ++j) rr[j] -= f * prow[j];
            rr[pc] = 0.0;
        }
        const double f = z[pc];
        if (f != 0.0) {
            for (int j = 0; j < wid; ++j) z[j] -= f * prow[j];
            z[pc] = 0.0;
        }
        basis[pr] = pc;
    }

    // reduced costs for cost vector c over all columns (basis costs priced out)
    void reset_costs(const std::vector<double>& c) {
        z.assign(wid, 0.0);
        for (int j = 0; j < ncols; ++j) z[j] = c[j];
        for (int r = 0; r < m; ++r) {
            const double cb = c[basis[r]];
            if (cb == 0.0) continue;
            const double* rr = row(r);
            for (int j = 0; j < wid; ++j) z[j] -= cb * rr[j];
        }
    }

    double objective() const { return -z[wid - 1]; }
};

enum class IterResult { OptimalReached, Unbounded, PivotCapHit };

IterResult run_phase(Tableau& t, const SimplexOptions& opts, int dantzig_budget, int max_pivots, int* pivots) {
    while (*pivots < max_pivots) {
        const bool bland = *pivots >= dantzig_budget;
        int enter = -1;
        if (bland) {
            for (int j = 0; j < t.ncols; ++j) {
                if (!t.banned[j] && t.z[j] < -opts.opt_tol) {
                    enter = j;
                    break;
                }
            }
        } else {
            double best = -opts.opt_tol;
            for (int j = 0; j < t.ncols; ++j) {
                if (!t.banned[j] && t.z[j] < best) {
                    best = t.z[j];
                    enter = j;
                }
            }
        }
        if (enter < 0) return IterResult::OptimalReached;

        int leave = -1;
        double best_ratio = 0.0;
        for (int r = 0; r < t.m; ++r) {
            const double arj = t.row(r)[enter];
            if (arj <= opts.pivot_tol) continue;
            const double ratio = t.row(r)[t.wid - 1] / arj;
            if (leave < 0 || ratio < best_ratio - 1e-12 ||
                (ratio <= best_ratio + 1e-12 && t.basis[r] < t.basis[leave])) {
                leave = r;
                best_ratio = ratio;
            }
        }
        if (leave < 0) return IterResult::Unbounded;
        t.pivot(leave, enter);
        ++*pivots;
    }
    return IterResult::PivotCapHit;
}

struct Residuals {
    double primal = 0.0, dual = 0.0, compl_slack = 0.0, duality_gap = 0.0;
};

Residuals check_solution(const LinearProgram& lp, const std::vector<std::vector<double>>& dense,
                         LPSolution& sol) {
    Residuals res;
    const int m0 = static_cast<int>(lp.rows.size());
    std::vector<double> activity(m0, 0.0);
    for (int i = 0; i < m0; ++i)
        for (int j = 0; j < lp.nvars; ++j) activity[i] += dense[i][j] * sol.x[j];

    for (int i = 0; i < m0; ++i) {
        const double scale = std::max({1.0, std::abs(lp.rows[i].rhs), std::abs(activity[i])});
        double viol = 0.0;
        const double slack = lp.rows[i].rhs - activity[i];
        switch (lp.rows[i].sense) {
            case RowSense::LE: viol = std::max(0.0, -slack); break;
            case RowSense::GE: viol = std::max(0.0, slack); break;
            case RowSense::EQ: viol = std::abs(slack); break;
        }
        res.primal = std::max(res.primal, viol / scale);
        // dual sign: minimization, <= rows price nonpositive, >= nonnegative
        if (lp.rows[i].sense == RowSense::LE) res.dual = std::max(res.dual, sol.y[i] / scale);
        if (lp.rows[i].sense == RowSense::GE) res.dual = std::max(res.dual, -sol.y[i] / scale);
        res.compl_slack = std::max(res.compl_slack, std::abs(sol.y[i] * slack) / scale);
    }
    for (int j = 0; j < lp.nvars; ++j) {
        const double scale = std::max(1.0, std::abs(sol.x[j]));
        res.primal = std::max(res.primal, (lp.lb[j] - sol.x[j]) / scale);
        if (std::isfinite(lp.ub[j])) res.primal = std::max(res.primal, (sol.x[j] - lp.ub[j]) / scale);
    }

    // reduced costs and the bound part of the dual objective
    double dual_obj = 0.0;
    for (int i = 0; i < m0; ++i) dual_obj += sol.y[i] * lp.rows[i].rhs;
    for (int j = 0; j < lp.nvars; ++j) {
        double d = lp.obj[j];
        for (int i = 0; i < m0; ++i) d -= sol.y[i] * dense[i][j];
        const double scale = std::max(1.0, std::abs(lp.obj[j]));
        if (d > 0.0) {
            dual_obj += d * lp.lb[j];
            res.compl_slack = std::max(res.compl_slack, d * (sol.x[j] - lp.lb[j]) / std::max(scale, std::abs(sol.x[j])));
        } else if (d < 0.0) {
            if (std::isfinite(lp.ub[j])) {
                dual_obj += d * lp.ub[j];
                res.compl_slack = std::max(res.compl_slack, -d * (lp.ub[j] - sol.x[j]) / std::max(scale, std::abs(sol.x[j])));
            } else {
                res.dual = std::max(res.dual, -d / scale);  // no upper bound to lean on
            }
        }
    }
    sol.dual_objective = dual_obj;
    res.duality_gap = std::abs(sol.objective - dual_obj) / std::max(1.0, std::abs(sol.objective));
    return res;
}

}  // namespace

LPSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opts) {
    const int n = lp.nvars;
    if (static_cast<int>(lp.obj.size()) != n || static_cast<int>(lp.lb.size()) != n ||
        static_cast<int>(lp.ub.size()) != n)
        throw SolveError("LP dimensions inconsistent");
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(lp.lb[j])) throw SolveError("LP variable " + std::to_string(j) + " needs a finite lower bound");
        if (lp.lb[j] > lp.ub[j]) throw SolveError("LP variable " + std::to_string(j) + " has empty bound interval");
    }
    const int m0 = static_cast<int>(lp.rows.size());

    std::vector<std::vector<double>> dense(m0, std::vector<double>(n, 0.0));
    for (const Triplet& e : lp.entries) {
        if (e.row < 0 || e.row >= m0 || e.col < 0 || e.col >= n)
            throw SolveError("LP entry out of range");
        dense[e.row][e.col] += e.value;
    }

    // shift to t = x - lb >= 0; finite upper bounds become extra rows
    std::vector<int> bound_var;
    for (int j = 0; j < n; ++j)
        if (std::isfinite(lp.ub[j])) bound_var.push_back(j);

    const int m = m0 + static_cast<int>(bound_var.size());
    std::vector<double> rhs(m);
    std::vector<RowSense> sense(m);
    std::vector<double> flip(m, 1.0);
    double obj_shift = 0.0;
    for (int j = 0; j < n; ++j) obj_shift += lp.obj[j] * lp.lb[j];
    for (int i = 0; i < m0; ++i) {
        double b = lp.rows[i].rhs;
        for (int j = 0; j < n; ++j) b -= dense[i][j] * lp.lb[j];
        rhs[i] = b;
        sense[i] = lp.rows[i].sense;
    }
    for (std::size_t k = 0; k < bound_var.size(); ++k) {
        const int j = bound_var[k];
        rhs[m0 + k] = lp.ub[j] - lp.lb[j];
        sense[m0 + k] = RowSense::LE;
    }

    // column layout: structural t | slack/surplus per inequality | artificials
    std::vector<int> slack_col(m, -1), art_col(m, -1);
    int ncols = n;
    for (int i = 0; i < m; ++i) {
        if (rhs[i] < 0.0) {  // normalize to nonnegative rhs
            flip[i] = -1.0;
            rhs[i] = -rhs[i];
            if (sense[i] == RowSense::LE) sense[i] = RowSense::GE;
            else if (sense[i] == RowSense::GE) sense[i] = RowSense::LE;
        }
        if (sense[i] != RowSense::EQ) slack_col[i] = ncols++;
    }
    bool need_phase1 = false;
    for (int i = 0; i < m; ++i) {
        if (sense[i] != RowSense::LE) {
            art_col[i] = ncols++;
            need_phase1 = true;
        }
    }

    Tableau t;
    t.m = m;
    t.ncols = ncols;
    t.wid = ncols + 1;
    t.a.assign(static_cast<std::size_t>(m) * t.wid, 0.0);
    t.basis.resize(m);
    t.banned.assign(ncols, 0);
    for (int i = 0; i < m; ++i) {
        double* r = t.row(i);
        if (i < m0) {
            for (int j = 0; j < n; ++j) r[j] = flip[i] * dense[i][j];
        } else {
            r[bound_var[i - m0]] = flip[i];
        }
        if (slack_col[i] >= 0) r[slack_col[i]] = (sense[i] == RowSense::LE) ? 1.0 : -1.0;
        if (art_col[i] >= 0) r[art_col[i]] = 1.0;
        r[t.wid - 1] = rhs[i];
        t.basis[i] = (sense[i] == RowSense::LE) ? slack_col[i] : art_col[i];
    }

    const int dantzig_budget = 2000 + 5 * (m + ncols);
    const int max_pivots = opts.max_pivots > 0 ? opts.max_pivots : 20000 + 40 * (m + ncols);

    LPSolution sol;
    sol.x.assign(n, 0.0);
    sol.y.assign(m0, 0.0);
    int pivots = 0;

    if (need_phase1) {
        std::vector<double> c1(ncols, 0.0);
        for (int i = 0; i < m; ++i)
            if (art_col[i] >= 0) c1[art_col[i]] = 1.0;
        t.reset_costs(c1);
        IterResult r = run_phase(t, opts, dantzig_budget, max_pivots, &pivots);
        sol.pivots = pivots;
        if (r == IterResult::PivotCapHit) {
            sol.status = LPStatus::Stalled;
            sol.message = "phase 1 pivot cap reached";
            return sol;
        }
        if (t.objective() > opts.feas_tol) {
            sol.status = LPStatus::Infeasible;
            return sol;
        }
        // pivot basic artificials to other columns where possible; a row whose
        // artificial cannot leave is redundant and stays basic at zero
        std::vector<char> is_art_col(ncols, 0);
        for (int i = 0; i < m; ++i)
            if (art_col[i] >= 0) is_art_col[art_col[i]] = 1;
        for (int i = 0; i < m; ++i) {
            if (!is_art_col[t.basis[i]]) continue;
            const double* rr = t.row(i);
            int pc = -1;
            for (int j = 0; j < ncols && pc < 0; ++j)
                if (!is_art_col[j] && std::abs(rr[j]) > opts.pivot_tol) pc = j;
            if (pc >= 0) {
                t.pivot(i, pc);
                ++pivots;
            }
        }
    }

    // artificials may not re-enter
    for (int i = 0; i < m; ++i)
        if (art_col[i] >= 0) t.banned[art_col[i]] = 1;

    std::vector<double> c2(ncols, 0.0);
    for (int j = 0; j < n; ++j) c2[j] = lp.obj[j];
    t.reset_costs(c2);
    IterResult r = run_phase(t, opts, dantzig_budget, max_pivots, &pivots);
    sol.pivots = pivots;
    if (r == IterResult::PivotCapHit) {
        sol.status = LPStatus::Stalled;
        sol.message = "pivot cap reached";
        return sol;
    }
    if (r == IterResult::Unbounded) {
        sol.status = LPStatus::Unbounded;
        return sol;
    }

    // nonbasic structural variables sit at their lower bound
    sol.x = lp.lb;
    for (int i = 0; i < m; ++i) {
        const int b = t.basis[i];
        if (b < n) sol.x[b] = lp.lb[b] + t.row(i)[t.wid - 1];
    }
    sol.objective = t.objective() + obj_shift;

    // duals from the priced-out initial identity columns
    for (int i = 0; i < m0; ++i) {
        const int col = (art_col[i] >= 0) ? art_col[i] : slack_col[i];
        const double y_norm = (sense[i] == RowSense::LE || art_col[i] >= 0) ? -t.z[col] : t.z[col];
        sol.y[i] = flip[i] * y_norm;
    }

    sol.status = LPStatus::Optimal;
    if (opts.verify) {
        Residuals res = check_solution(lp, dense, sol);
        const double lim = opts.feas_tol;
        if (res.primal > lim || res.dual > lim || res.compl_slack > 10 * lim || res.duality_gap > 10 * lim) {
            sol.status = LPStatus::Stalled;
            sol.message = "residual check failed (primal " + fmt_double(res.primal) + ", dual " +
                          fmt_double(res.dual) + ", cs " + fmt_double(res.compl_slack) + ", gap " +
                          fmt_double(res.duality_gap) + ")";
        }
    }
    return sol;
}

void export_lp_text(const LinearProgram& lp, std::ostream& out) {
    const int m0 = static_cast<int>(lp.rows.size());
    std::vector<std::vector<std::pair<int, double>>> by_row(m0);
    for (const Triplet& e : lp.entries) by_row[e.row].push_back({e.col, e.value});

    out << "Minimize\n obj:";
    for (int j = 0; j < lp.nvars; ++j) {
        if (lp.obj[j] == 0.0) continue;
        out << (lp.obj[j] >= 0 ? " + " : " - ") << fmt_double(std::abs(lp.obj[j])) << " x" << j;
    }
    out << "\nSubject To\n";
    for (int i = 0; i < m0; ++i) {
        out << " r" << i << ":";
        std::sort(by_row[i].begin(), by_row[i].end());
        for (auto [col, v] : by_row[i]) {
            if (v == 0.0) continue;
            out << (v >= 0 ? " + " : " - ") << fmt_double(std::abs(v)) << " x" << col;
        }
        const char* rel = lp.rows[i].sense == RowSense::LE ? "<=" : (lp.rows[i].sense == RowSense::EQ ? "=" : ">=");
        out << " " << rel << " " << fmt_double(lp.rows[i].rhs) << "\n";
    }
    out << "Bounds\n";
    for (int j = 0; j < lp.nvars; ++j) {
        out << " " << fmt_double(lp.lb[j]) << " <= x" << j;
        if (std::isfinite(lp.ub[j])) out << " <= " << fmt_double(lp.ub[j]);
        out << "\n";
    }
    out << "End\n";
}

}  // namespace seqgap
