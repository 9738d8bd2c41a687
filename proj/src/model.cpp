#include "seqgap/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace seqgap {

namespace {

std::string fmt_component_note(const char* what, int j) {
    std::ostringstream os;
    os << what << " (component " << j << ")";
    return os.str();
}

}  // namespace

double Marginal::lower() const {
    return kind == Kind::Discrete ? values.front() : lo;
}

double Marginal::upper() const {
    return kind == Kind::Discrete ? values.back() : hi;
}

double Marginal::mean() const {
    if (kind == Kind::Uniform) return 0.5 * (lo + hi);
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
    return m;
}

double Marginal::variance() const {
    if (kind == Kind::Uniform) {
        double w = hi - lo;
        return w * w / 12.0;
    }
    double m = mean(), s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += probs[i] * (values[i] - m) * (values[i] - m);
    return s;
}

std::size_t Marginal::support_size() const {
    return kind == Kind::Discrete ? values.size() : 0;
}

double Marginal::inverse_cdf(double u) const {
    if (kind == Kind::Uniform) return lo + u * (hi - lo);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        acc += probs[i];
        if (acc > u) return values[i];
    }
    return values.back();
}

void Marginal::validate(int index) const {
    if (kind == Kind::Uniform) {
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw InstanceError("marginal " + std::to_string(index) + ": uniform requires finite lo < hi");
        return;
    }
    if (values.empty() || values.size() != probs.size())
        throw InstanceError("marginal " + std::to_string(index) + ": empty or mismatched discrete support");
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw InstanceError("marginal " + std::to_string(index) + ": non-finite value");
        if (!(probs[i] > 0.0)) throw InstanceError("marginal " + std::to_string(index) + ": probabilities must be positive");
        if (i > 0 && !(values[i] > values[i - 1]))
            throw InstanceError("marginal " + std::to_string(index) + ": discrete values must be strictly increasing");
        sum += probs[i];
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw InstanceError("marginal " + std::to_string(index) + ": marginal probabilities sum != 1 (got " + std::to_string(sum) + ")");
}

void TwoStageLP::validate() const {
    const int dx = dim_x();
    if (dx < 1) throw InstanceError(name + ": at least one first-stage variable required");
    if (static_cast<int>(lb.size()) != dx || static_cast<int>(ub.size()) != dx)
        throw InstanceError(name + ": bounds must cover every first-stage variable");
    for (int j = 0; j < dx; ++j) {
        if (!std::isfinite(lb[j]) || !std::isfinite(ub[j]))
            throw InstanceError(name + ": first-stage feasible set must be bounded (variable " + std::to_string(j) + ")");
        if (lb[j] > ub[j])
            throw InstanceError(name + ": variable " + std::to_string(j) + " has lb > ub");
    }
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (static_cast<int>(rows[r].coeffs.size()) != dx)
            throw InstanceError(name + ": first-stage row " + std::to_string(r) + " has wrong width");

    const int m = m2();
    if (n2 < 0) throw InstanceError(name + ": negative recourse variable count");
    if (static_cast<int>(q0.size()) != n2) throw InstanceError(name + ": q0 length != recourse variable count");
    if (static_cast<int>(R0.size()) != m) throw InstanceError(name + ": R0 length != recourse row count");
    if (static_cast<int>(T0.size()) != m) throw InstanceError(name + ": T0 row count != recourse row count");
    for (int i = 0; i < m; ++i) {
        if (static_cast<int>(W[i].size()) != n2)
            throw InstanceError(name + ": W row " + std::to_string(i) + " has wrong width");
        if (static_cast<int>(T0[i].size()) != dx)
            throw InstanceError(name + ": T0 row " + std::to_string(i) + " has wrong width");
    }

    if (marginals.empty()) throw InstanceError(name + ": d_xi >= 1 required");
    for (int j = 0; j < dim_xi(); ++j) marginals[j].validate(j);

    for (std::size_t k = 0; k < maps.size(); ++k) {
        const AffineMap& mp = maps[k];
        if (static_cast<int>(mp.coeffs.size()) != dim_xi())
            throw InstanceError(name + ": map " + std::to_string(k) + " needs one coefficient per xi component");
        switch (mp.target) {
            case MapTarget::Q:
                if (mp.col < 0 || mp.col >= n2)
                    throw InstanceError(name + ": map " + std::to_string(k) + " q index out of range");
                break;
            case MapTarget::R:
                if (mp.row < 0 || mp.row >= m)
                    throw InstanceError(name + ": map " + std::to_string(k) + " R index out of range");
                break;
            case MapTarget::T:
                if (mp.row < 0 || mp.row >= m || mp.col < 0 || mp.col >= dx)
                    throw InstanceError(name + ": map " + std::to_string(k) + " T index out of range");
                break;
        }
    }
    if (declared_bound && !(*declared_bound > 0.0))
        throw InstanceError(name + ": declared bound must be positive");
}

Realization realize(const TwoStageLP& inst, std::span<const double> xi) {
    if (static_cast<int>(xi.size()) != inst.dim_xi())
        throw InstanceError(inst.name + ": realization vector has wrong dimension");
    for (int j = 0; j < inst.dim_xi(); ++j) {
        const Marginal& mg = inst.marginals[j];
        if (xi[j] < mg.lower() - 1e-12 || xi[j] > mg.upper() + 1e-12)
            throw InstanceError(inst.name + ": xi component " + std::to_string(j) + " outside marginal support");
    }
    Realization out{inst.q0, inst.R0, inst.T0};
    for (const AffineMap& mp : inst.maps) {
        double add = 0.0;
        for (int j = 0; j < inst.dim_xi(); ++j) add += mp.coeffs[j] * xi[j];
        switch (mp.target) {
            case MapTarget::Q: out.q[mp.col] += add; break;
            case MapTarget::R: out.R[mp.row] += add; break;
            case MapTarget::T: out.T[mp.row][mp.col] += add; break;
        }
    }
    return out;
}

std::vector<Scenario> enumerate_scenarios(const TwoStageLP& inst, std::size_t cap) {
    std::size_t total = 1;
    for (const Marginal& mg : inst.marginals) {
        if (mg.kind != Marginal::Kind::Discrete)
            throw InstanceError(inst.name + ": continuous marginal present; enumeration requires finite supports");
        total *= mg.support_size();
        if (total > cap)
            throw InstanceError(inst.name + ": cap exceeded (" + std::to_string(total) + " > " + std::to_string(cap) + ")");
    }
    const int d = inst.dim_xi();
    std::vector<Scenario> out;
    out.reserve(total);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t s = 0; s < total; ++s) {
        Scenario sc;
        sc.xi.resize(d);
        sc.prob = 1.0;
        for (int j = 0; j < d; ++j) {
            sc.xi[j] = inst.marginals[j].values[idx[j]];
            sc.prob *= inst.marginals[j].probs[idx[j]];
        }
        out.push_back(std::move(sc));
        for (int j = d - 1; j >= 0; --j) {
            if (++idx[j] < inst.marginals[j].support_size()) break;
            idx[j] = 0;
        }
    }
    return out;
}

namespace {

// union-find over recourse rows and variables; vars are offset by m2
struct Blocks {
    std::vector<int> parent;
    explicit Blocks(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

int sgn(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

bool check_additive(const TwoStageLP& inst, std::string* why) {
    for (const AffineMap& mp : inst.maps) {
        if (mp.target != MapTarget::R) {
            *why = "maps into q or T present";
            return false;
        }
    }
    const int m = inst.m2();
    Blocks blocks(m + inst.n2);
    for (int i = 0; i < m; ++i) {
        bool touched = false;
        for (int c = 0; c < inst.n2; ++c) {
            if (inst.W[i][c] != 0.0) {
                blocks.unite(i, m + c);
                touched = true;
            }
        }
        if (!touched) {
            // a row without recourse variables couples xi to x through
            // feasibility alone, which this checker cannot certify
            bool mapped = false;
            for (const AffineMap& mp : inst.maps) mapped = mapped || mp.row == i;
            if (mapped || inst.R0[i] != 0.0) {
                *why = "recourse row " + std::to_string(i) + " has empty W support";
                return false;
            }
        }
    }
    // every W block may be driven by at most one xi component
    std::vector<int> owner(m + inst.n2, -1);
    for (const AffineMap& mp : inst.maps) {
        for (int j = 0; j < inst.dim_xi(); ++j) {
            if (mp.coeffs[j] == 0.0) continue;
            int root = blocks.find(mp.row);
            if (owner[root] == -1) {
                owner[root] = j;
            } else if (owner[root] != j) {
                *why = "recourse block shared by components " + std::to_string(owner[root]) + " and " + std::to_string(j);
                return false;
            }
        }
    }
    return true;
}

}  // namespace

MonotonicityReport check_monotone_structure(const TwoStageLP& inst) {
    MonotonicityReport rep;
    rep.fixed_recourse = true;
    rep.inequality_form = true;

    std::string why;
    if (check_additive(inst, &why)) {
        rep.verdict = StructureVerdict::VerifiedAdditive;
        rep.summary = "recourse decouples into per-component blocks";
        for (int j = 0; j < inst.dim_xi(); ++j)
            rep.components.push_back({j, true, 0, fmt_component_note("separable", j)});
        return rep;
    }

    bool x_nonneg = true;
    for (double v : inst.lb) x_nonneg = x_nonneg && v >= 0.0;

    bool all_consistent = true;
    for (int j = 0; j < inst.dim_xi(); ++j) {
        ComponentEvidence ev;
        ev.component = j;
        int dir = 0;
        bool consistent = true;
        for (const AffineMap& mp : inst.maps) {
            int s = sgn(mp.coeffs[j]);
            if (s == 0) continue;
            int effect = 0;  // direction of h as xi_j increases
            switch (mp.target) {
                case MapTarget::R:
                    effect = -s;  // larger RHS relaxes the row
                    break;
                case MapTarget::T:
                    // tightens through T x only when x stays nonnegative
                    if (!x_nonneg) {
                        consistent = false;
                        ev.note = fmt_component_note("T map with sign-indefinite x", j);
                    }
                    effect = s;
                    break;
                case MapTarget::Q:
                    effect = s;  // recourse value is nondecreasing in each cost entry
                    break;
            }
            if (!consistent) break;
            if (dir == 0) {
                dir = effect;
            } else if (effect != dir) {
                consistent = false;
                ev.note = fmt_component_note("maps push the recourse value both ways", j);
            }
        }
        ev.sign_consistent = consistent;
        ev.direction = consistent ? dir : 0;
        if (ev.note.empty())
            ev.note = fmt_component_note(consistent ? "sign-consistent" : "inconsistent", j);
        all_consistent = all_consistent && consistent;
        rep.components.push_back(std::move(ev));
    }

    if (all_consistent) {
        rep.verdict = StructureVerdict::VerifiedMonotone;
        rep.summary = "fixed recourse, inequality rows, sign-consistent maps";
    } else {
        rep.verdict = StructureVerdict::Unverified;
        rep.summary = why.empty() ? "sign-inconsistent maps" : why;
    }
    return rep;
}

}  // namespace seqgap
