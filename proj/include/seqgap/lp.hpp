#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "seqgap/model.hpp"  // RowSense

namespace seqgap {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Triplet {
    int row = 0, col = 0;
    double value = 0.0;
};

// min obj'x  s.t. rows (<=,=,>=) rhs, lb <= x <= ub.
// Lower bounds must be finite; upper bounds may be +inf.
struct LinearProgram {
    int nvars = 0;
    std::vector<double> obj;
    std::vector<Triplet> entries;
    struct Row {
        RowSense sense = RowSense::LE;
        double rhs = 0.0;
    };
    std::vector<Row> rows;
    std::vector<double> lb, ub;
};

enum class LPStatus { Optimal, Infeasible, Unbounded, Stalled };

const char* status_name(LPStatus s);

struct LPSolution {
    LPStatus status = LPStatus::Stalled;
    double objective = 0.0;
    double dual_objective = 0.0;
    std::vector<double> x;  // primal, original variable space
    std::vector<double> y;  // one dual per declared row
    int pivots = 0;
    std::string message;  // set for Stalled / residual failures
};

struct SimplexOptions {
    double feas_tol = 1e-7;
    double opt_tol = 1e-9;    // reduced-cost threshold
    double pivot_tol = 1e-9;  // smallest usable pivot element
    int max_pivots = 0;       // 0 = scale with problem size
    bool verify = true;       // residual checks on optimal solves
};

// Two-phase dense-tableau primal simplex. Dantzig pricing with a deterministic
// tie-break, switching to Bland's rule after a size-scaled pivot budget, so a
// given input always walks the same pivot path. Optimal results are checked
// for primal/dual feasibility and complementary slackness; a failed check
// reports Stalled rather than returning a silently wrong answer.
LPSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opts = {});

// Plain-text export (LP interchange format) for cross-checking externally.
void export_lp_text(const LinearProgram& lp, std::ostream& out);

}  // namespace seqgap
