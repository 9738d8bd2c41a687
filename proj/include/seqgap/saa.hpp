#pragma once

#include <span>
#include <vector>

#include "seqgap/lp.hpp"
#include "seqgap/model.hpp"
#include "seqgap/sampling.hpp"

namespace seqgap {

// One first-stage block plus a recourse block per scenario:
//   min c x + sum_s w_s q(xi_s) y_s
//   s.t. first-stage rows,  T(xi_s) x + W y_s <= R(xi_s),  lb <= x <= ub, y >= 0.
// Weights must be positive and sum to one.
LinearProgram build_extensive_form(const TwoStageLP& inst, std::span<const Scenario> scenarios);

struct SaaResult {
    double z = 0.0;             // optimal value of the sampled problem
    std::vector<double> x;      // one optimizer (deterministic pivot path)
};

// Equal weights 1/n over the sample rows; antithetic pairs enter as two
// ordinary scenarios, which optimizes the same pair-averaged objective.
SaaResult solve_saa(const TwoStageLP& inst, const Sample& sample, const SimplexOptions& opts = {});

// Extensive form over an explicit scenario list (true weights); used by the
// enumeration oracles.
SaaResult solve_scenarios(const TwoStageLP& inst, std::span<const Scenario> scenarios,
                          const SimplexOptions& opts = {});

// h(x, xi): optimal recourse value. Throws SolveError when the recourse is
// infeasible (the instance then violates relatively complete recourse).
double second_stage_value(const TwoStageLP& inst, std::span<const double> x,
                          std::span<const double> xi, const SimplexOptions& opts = {});

// f(x, xi) = c x + h(x, xi)
double f_value(const TwoStageLP& inst, std::span<const double> x, std::span<const double> xi,
               const SimplexOptions& opts = {});

}  // namespace seqgap
