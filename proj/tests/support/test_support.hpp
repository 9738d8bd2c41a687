#pragma once

// Shared helpers for the test suites: brute-force oracles kept independent of
// the library's computation paths, plus small generators and statistics.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "seqgap/lp.hpp"
#include "seqgap/model.hpp"

namespace testsupport {

std::string instance_path(const std::string& name);
seqgap::TwoStageLP load_bundled(const std::string& name);

// --- series oracles ------------------------------------------------------
// direct summation, no tail logic; `terms` chosen by the caller
double cp_series_direct(double p, double alpha, std::size_t terms);
double cpq_series_direct(double p, double q, double alpha, std::size_t terms);

// --- LP vertex enumeration -----------------------------------------------
// Feasible-bounded test LPs: min c x, A x <= b (b > 0), x >= 0, e'x <= budget.
struct BoxedLP {
    seqgap::LinearProgram lp;       // as handed to the kernel
    std::vector<std::vector<double>> rows;  // dense A incl. budget row
    std::vector<double> rhs;
    std::vector<double> cost;
};
BoxedLP random_boxed_lp(int nrows, int nvars, std::mt19937_64& gen);

// Enumerates active sets (k rows tight, n-k variables pinned to zero) and
// minimizes over feasible vertices. Exact up to linear-solver roundoff.
double vertex_enum_min(const BoxedLP& blp);

// --- random two-stage instances ------------------------------------------
// Small all-discrete instances with relatively complete recourse (R lifted so
// y = 0 stays feasible) and capped recourse variables (bounded below).
seqgap::TwoStageLP random_instance(std::mt19937_64& gen);
std::vector<double> random_feasible_x(const seqgap::TwoStageLP& inst, std::mt19937_64& gen);

// --- closed forms ----------------------------------------------------------
// single-product newsvendor recourse: sell min(x, d) at r, salvage rest at s
double newsvendor_recourse(double x, double demand, double r, double s);

// --- statistics ------------------------------------------------------------
double ks_statistic_vs_marginal(std::vector<double> draws, const seqgap::Marginal& mg);
double mean_of(const std::vector<double>& v);
double variance_of(const std::vector<double>& v);

}  // namespace testsupport
