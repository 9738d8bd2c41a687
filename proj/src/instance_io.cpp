#include <charconv>
#include <fstream>
#include <sstream>

#include "seqgap/model.hpp"
#include "seqgap/textio.hpp"

// Instance files are UTF-8 text, line oriented:
//   [meta]        name = <id>            bound = <C>        (bound optional)
//   [first-stage] c = v...               bounds = lo:hi ...  row = <=|=|>= rhs : coeffs...
//   [recourse]    q0 = v...   w-row = v... (m2 lines)   r0 = v...   t-row = v... (m2 lines)
//   [random]      map = target=q|R|T index=i[,c] coeffs=g1,...,gd
//   [marginals]   marginal = discrete v1:p1,v2:p2,...  |  uniform lo hi
// '#' starts a comment; blank lines are ignored. Values written back with
// shortest round-trip formatting, so load(save(x)) == x bit for bit.

namespace seqgap {

namespace {

struct Cursor {
    const std::string& origin;
    int line = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw InstanceError(origin + ":" + std::to_string(line) + ": " + msg);
    }
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& tok, const Cursor& at) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        at.fail("bad number '" + tok + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            cur = trim(cur);
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<double> parse_vector(const std::string& s, const Cursor& at) {
    std::vector<double> out;
    for (const std::string& tok : split(s, ' ')) out.push_back(parse_double(tok, at));
    return out;
}

AffineMap parse_map(const std::string& s, const Cursor& at) {
    AffineMap mp;
    bool have_target = false, have_index = false, have_coeffs = false;
    for (const std::string& tok : split(s, ' ')) {
        std::size_t eq = tok.find('=');
        if (eq == std::string::npos) at.fail("map field '" + tok + "' is not key=value");
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "target") {
            if (val == "q" || val == "Q") mp.target = MapTarget::Q;
            else if (val == "r" || val == "R") mp.target = MapTarget::R;
            else if (val == "t" || val == "T") mp.target = MapTarget::T;
            else at.fail("map target must be q, R or T");
            have_target = true;
        } else if (key == "index") {
            std::vector<std::string> parts = split(val, ',');
            if (parts.size() == 1) {
                mp.row = static_cast<int>(parse_double(parts[0], at));
                mp.col = mp.row;
            } else if (parts.size() == 2) {
                mp.row = static_cast<int>(parse_double(parts[0], at));
                mp.col = static_cast<int>(parse_double(parts[1], at));
            } else {
                at.fail("map index must be i or r,c");
            }
            have_index = true;
        } else if (key == "coeffs") {
            for (const std::string& cs : split(val, ',')) mp.coeffs.push_back(parse_double(cs, at));
            have_coeffs = true;
        } else {
            at.fail("unknown map field '" + key + "'");
        }
    }
    if (!have_target || !have_index || !have_coeffs) at.fail("map needs target=, index= and coeffs=");
    if (mp.target == MapTarget::Q) mp.row = -1;
    if (mp.target == MapTarget::R) mp.col = -1;
    return mp;
}

Marginal parse_marginal(const std::string& s, const Cursor& at) {
    Marginal mg;
    std::vector<std::string> toks = split(s, ' ');
    if (toks.empty()) at.fail("empty marginal");
    if (toks[0] == "uniform") {
        if (toks.size() != 3) at.fail("uniform marginal needs lo hi");
        mg.kind = Marginal::Kind::Uniform;
        mg.lo = parse_double(toks[1], at);
        mg.hi = parse_double(toks[2], at);
        return mg;
    }
    if (toks[0] != "discrete") at.fail("marginal kind must be 'discrete' or 'uniform'");
    if (toks.size() != 2) at.fail("discrete marginal needs v1:p1,v2:p2,...");
    mg.kind = Marginal::Kind::Discrete;
    for (const std::string& pair : split(toks[1], ',')) {
        std::vector<std::string> vp = split(pair, ':');
        if (vp.size() != 2) at.fail("bad discrete atom '" + pair + "'");
        mg.values.push_back(parse_double(vp[0], at));
        mg.probs.push_back(parse_double(vp[1], at));
    }
    return mg;
}

}  // namespace

TwoStageLP parse_instance(std::istream& in, const std::string& origin) {
    TwoStageLP inst;
    Cursor at{origin};
    std::string section, raw;
    bool have_bounds = false;

    while (std::getline(in, raw)) {
        ++at.line;
        std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') at.fail("unterminated section header");
            section = line.substr(1, line.size() - 2);
            if (section != "meta" && section != "first-stage" && section != "recourse" &&
                section != "random" && section != "marginals")
                at.fail("unknown section [" + section + "]");
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos) at.fail("expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (section.empty()) at.fail("field before any section");

        if (section == "meta") {
            if (key == "name") inst.name = val;
            else if (key == "bound") inst.declared_bound = parse_double(val, at);
            else at.fail("unknown meta field '" + key + "'");
        } else if (section == "first-stage") {
            if (key == "c") {
                inst.c = parse_vector(val, at);
            } else if (key == "bounds") {
                for (const std::string& tok : split(val, ' ')) {
                    std::vector<std::string> lh = split(tok, ':');
                    if (lh.size() != 2) at.fail("bound must be lo:hi");
                    inst.lb.push_back(parse_double(lh[0], at));
                    inst.ub.push_back(parse_double(lh[1], at));
                }
                have_bounds = true;
            } else if (key == "row") {
                std::size_t colon = val.find(':');
                if (colon == std::string::npos) at.fail("row needs 'sense rhs : coeffs'");
                std::vector<std::string> head = split(val.substr(0, colon), ' ');
                if (head.size() != 2) at.fail("row head must be 'sense rhs'");
                FirstStageRow row;
                if (head[0] == "<=") row.sense = RowSense::LE;
                else if (head[0] == "=") row.sense = RowSense::EQ;
                else if (head[0] == ">=") row.sense = RowSense::GE;
                else at.fail("row sense must be <=, = or >=");
                row.rhs = parse_double(head[1], at);
                row.coeffs = parse_vector(val.substr(colon + 1), at);
                inst.rows.push_back(std::move(row));
            } else {
                at.fail("unknown first-stage field '" + key + "'");
            }
        } else if (section == "recourse") {
            if (key == "q0") {
                inst.q0 = parse_vector(val, at);
                inst.n2 = static_cast<int>(inst.q0.size());
            } else if (key == "w-row") {
                inst.W.push_back(parse_vector(val, at));
            } else if (key == "r0") {
                inst.R0 = parse_vector(val, at);
            } else if (key == "t-row") {
                inst.T0.push_back(parse_vector(val, at));
            } else {
                at.fail("unknown recourse field '" + key + "'");
            }
        } else if (section == "random") {
            if (key != "map") at.fail("unknown random field '" + key + "'");
            inst.maps.push_back(parse_map(val, at));
        } else {  // marginals
            if (key != "marginal") at.fail("unknown marginals field '" + key + "'");
            inst.marginals.push_back(parse_marginal(val, at));
        }
    }

    if (!have_bounds) throw InstanceError(origin + ": missing first-stage bounds (X must be bounded)");
    try {
        inst.validate();
    } catch (const InstanceError& e) {
        throw InstanceError(origin + ": " + e.what());
    }
    return inst;
}

TwoStageLP load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InstanceError(path + ": cannot open instance file");
    return parse_instance(in, path);
}

void write_instance(const TwoStageLP& inst, std::ostream& out) {
    out << "[meta]\n";
    out << "name = " << inst.name << "\n";
    if (inst.declared_bound) out << "bound = " << fmt_double(*inst.declared_bound) << "\n";

    out << "\n[first-stage]\n";
    out << "c = " << join_doubles(inst.c) << "\n";
    out << "bounds =";
    for (int j = 0; j < inst.dim_x(); ++j)
        out << " " << fmt_double(inst.lb[j]) << ":" << fmt_double(inst.ub[j]);
    out << "\n";
    for (const FirstStageRow& row : inst.rows) {
        const char* sense = row.sense == RowSense::LE ? "<=" : (row.sense == RowSense::EQ ? "=" : ">=");
        out << "row = " << sense << " " << fmt_double(row.rhs) << " : " << join_doubles(row.coeffs) << "\n";
    }

    out << "\n[recourse]\n";
    out << "q0 = " << join_doubles(inst.q0) << "\n";
    for (const auto& w : inst.W) out << "w-row = " << join_doubles(w) << "\n";
    out << "r0 = " << join_doubles(inst.R0) << "\n";
    for (const auto& t : inst.T0) out << "t-row = " << join_doubles(t) << "\n";

    if (!inst.maps.empty()) {
        out << "\n[random]\n";
        for (const AffineMap& mp : inst.maps) {
            out << "map = target=";
            out << (mp.target == MapTarget::Q ? "q" : (mp.target == MapTarget::R ? "R" : "T"));
            out << " index=";
            if (mp.target == MapTarget::Q) out << mp.col;
            else if (mp.target == MapTarget::R) out << mp.row;
            else out << mp.row << "," << mp.col;
            out << " coeffs=";
            for (std::size_t j = 0; j < mp.coeffs.size(); ++j) {
                if (j) out << ",";
                out << fmt_double(mp.coeffs[j]);
            }
            out << "\n";
        }
    }

    out << "\n[marginals]\n";
    for (const Marginal& mg : inst.marginals) {
        if (mg.kind == Marginal::Kind::Uniform) {
            out << "marginal = uniform " << fmt_double(mg.lo) << " " << fmt_double(mg.hi) << "\n";
        } else {
            out << "marginal = discrete ";
            for (std::size_t i = 0; i < mg.values.size(); ++i) {
                if (i) out << ",";
                out << fmt_double(mg.values[i]) << ":" << fmt_double(mg.probs[i]);
            }
            out << "\n";
        }
    }
}

void save_instance(const TwoStageLP& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InstanceError(path + ": cannot open for writing");
    write_instance(inst, out);
}

}  // namespace seqgap
