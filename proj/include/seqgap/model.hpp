#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqgap/errors.hpp"

namespace seqgap {

// One independent component of the random vector. Discrete supports are kept
// sorted; probabilities must sum to one. Continuous components are bounded
// uniforms so the whole problem datum stays bounded.
struct Marginal {
    enum class Kind { Discrete, Uniform };

    Kind kind = Kind::Discrete;
    std::vector<double> values;  // discrete support, strictly increasing
    std::vector<double> probs;   // same length as values
    double lo = 0.0, hi = 0.0;   // uniform endpoints

    double lower() const;
    double upper() const;
    double mean() const;
    double variance() const;
    std::size_t support_size() const;  // discrete only

    // Right-continuous generalized inverse: min{v : F(v) > u}. At u exactly on
    // a CDF step the next support value is returned (a measure-zero event for
    // generated uniforms). Monotone nondecreasing in u.
    double inverse_cdf(double u) const;

    void validate(int index) const;
};

enum class MapTarget { Q, R, T };

// R/q/T entries are base value plus a linear form in xi. `row` indexes R rows
// and T rows, `col` indexes q entries and T columns.
struct AffineMap {
    MapTarget target = MapTarget::R;
    int row = -1;
    int col = -1;
    std::vector<double> coeffs;  // one per xi component
};

enum class RowSense : char { LE = 'L', EQ = 'E', GE = 'G' };

struct FirstStageRow {
    RowSense sense = RowSense::LE;
    double rhs = 0.0;
    std::vector<double> coeffs;  // dense over first-stage variables
};

// Two-stage stochastic LP with fixed recourse:
//   min  c x + E[h(x, xi)]   s.t.  first-stage rows, lb <= x <= ub
//   h(x, xi) = min { q(xi) y : W y <= R(xi) - T(xi) x, y >= 0 }.
// W never depends on xi; q, R, T are affine in xi via `maps`. Components of
// xi are mutually independent. Immutable after load; share freely.
struct TwoStageLP {
    std::string name;

    std::vector<double> c;
    std::vector<FirstStageRow> rows;  // may be empty
    std::vector<double> lb, ub;       // finite box, one per first-stage var

    int n2 = 0;  // recourse variables
    std::vector<double> q0;
    std::vector<std::vector<double>> W;   // m2 x n2
    std::vector<double> R0;               // m2
    std::vector<std::vector<double>> T0;  // m2 x dim_x

    std::vector<AffineMap> maps;
    std::vector<Marginal> marginals;
    std::optional<double> declared_bound;  // C with sup |f| <= C, when known

    int dim_x() const { return static_cast<int>(c.size()); }
    int dim_xi() const { return static_cast<int>(marginals.size()); }
    int m2() const { return static_cast<int>(W.size()); }

    void validate() const;  // throws InstanceError
};

struct Realization {
    std::vector<double> q;
    std::vector<double> R;
    std::vector<std::vector<double>> T;
};

// Applies the affine maps exactly: entry = base + sum_j coeff_j * xi_j.
// Accepts any xi inside the support box (not only atoms), so it stays linear
// along segments between support points.
Realization realize(const TwoStageLP& inst, std::span<const double> xi);

struct Scenario {
    std::vector<double> xi;
    double prob = 0.0;
};

// Cartesian product of discrete supports with product probabilities, in
// lexicographic order of component indices. Requires every marginal discrete
// and the product of support sizes within `cap`.
std::vector<Scenario> enumerate_scenarios(const TwoStageLP& inst, std::size_t cap);

enum class StructureVerdict { VerifiedMonotone, VerifiedAdditive, Unverified };

struct ComponentEvidence {
    int component = 0;
    bool sign_consistent = false;  // all nonzero coefficients push h one way
    int direction = 0;             // +1 nondecreasing, -1 nonincreasing, 0 no effect
    std::string note;
};

// Structural sufficient-condition report. `verified-*` verdicts are sound;
// `unverified` only means the checker could not certify anything.
struct MonotonicityReport {
    StructureVerdict verdict = StructureVerdict::Unverified;
    bool fixed_recourse = true;    // guaranteed by the schema
    bool inequality_form = true;   // guaranteed by the schema
    std::vector<ComponentEvidence> components;
    std::string summary;
};

// verified-additive: every map targets R, every recourse row touches at least
// one recourse variable, and the connected blocks of W are each influenced by
// at most one xi component, so h decouples into per-component terms.
// verified-monotone: per component, R-map signs, T-map signs (with x >= 0) and
// q-map signs all push the recourse value in one direction.
MonotonicityReport check_monotone_structure(const TwoStageLP& inst);

TwoStageLP load_instance(const std::string& path);
TwoStageLP parse_instance(std::istream& in, const std::string& origin);
void save_instance(const TwoStageLP& inst, const std::string& path);
void write_instance(const TwoStageLP& inst, std::ostream& out);

}  // namespace seqgap
