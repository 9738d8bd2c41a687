#include <algorithm>
#include <cmath>

#include "seqgap/estimators.hpp"
#include "seqgap/errors.hpp"

namespace seqgap {

namespace {

std::string key_of(std::span<const double> v) {
    return std::string(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
}

}  // namespace

ExactOracle::ExactOracle(const TwoStageLP& inst, std::size_t cap) : inst_(inst) {
    scenarios_ = enumerate_scenarios(inst, cap);
    const int d = inst.dim_xi();
    strides_.assign(d, 1);
    for (int j = d - 2; j >= 0; --j)
        strides_[j] = strides_[j + 1] * inst.marginals[j + 1].support_size();

    SaaResult best = solve_scenarios(inst, scenarios_);
    z_star_ = best.z;
    x_star_ = std::move(best.x);

    // coupled antithetic distribution per dimension: split [0,1) at every CDF
    // step of u and of 1-u, one atom per piece
    coupled_.resize(d);
    for (int j = 0; j < d; ++j) {
        const Marginal& mg = inst.marginals[j];
        std::vector<double> cuts{0.0, 1.0};
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < mg.values.size(); ++i) {
            acc += mg.probs[i];
            cuts.push_back(acc);
            cuts.push_back(1.0 - acc);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                   cuts.end());
        auto index_at = [&mg](double u) {
            double c = 0.0;
            for (std::size_t i = 0; i + 1 < mg.values.size(); ++i) {
                c += mg.probs[i];
                if (c > u) return static_cast<std::uint32_t>(i);
            }
            return static_cast<std::uint32_t>(mg.values.size() - 1);
        };
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double len = cuts[k + 1] - cuts[k];
            if (len <= 1e-14) continue;
            const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
            coupled_[j].push_back({len, index_at(mid), index_at(1.0 - mid)});
        }
    }
}

std::shared_ptr<const std::vector<double>> ExactOracle::f_table(std::span<const double> x) const {
    const std::string key = key_of(x);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = f_cache_.find(key);
        if (it != f_cache_.end()) return it->second;
    }
    auto vals = std::make_shared<std::vector<double>>();
    vals->reserve(scenarios_.size());
    for (const Scenario& sc : scenarios_) vals->push_back(f_value(inst_, x, sc.xi));
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = f_cache_.emplace(key, vals);
    return it->second;
}

double ExactOracle::mean_f(std::span<const double> x) const {
    auto vals = f_table(x);
    double s = 0.0;
    for (std::size_t i = 0; i < scenarios_.size(); ++i) s += scenarios_[i].prob * (*vals)[i];
    return s;
}

double ExactOracle::var_f(std::span<const double> x) const {
    auto vals = f_table(x);
    const double m = mean_f(x);
    double s = 0.0;
    for (std::size_t i = 0; i < scenarios_.size(); ++i) {
        const double dev = (*vals)[i] - m;
        s += scenarios_[i].prob * dev * dev;
    }
    return s;
}

double ExactOracle::gap(std::span<const double> x) const {
    const std::string key = key_of(x);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = gap_cache_.find(key);
        if (it != gap_cache_.end()) return it->second;
    }
    const double g = mean_f(x) - z_star_;
    std::lock_guard<std::mutex> lock(mu_);
    gap_cache_.emplace(key, g);
    return g;
}

double ExactOracle::plain_variance(const std::vector<double>& fx, const std::vector<double>& fy) const {
    double mean = 0.0;
    for (std::size_t i = 0; i < scenarios_.size(); ++i)
        mean += scenarios_[i].prob * (fx[i] - fy[i]);
    double s = 0.0;
    for (std::size_t i = 0; i < scenarios_.size(); ++i) {
        const double dev = fx[i] - fy[i] - mean;
        s += scenarios_[i].prob * dev * dev;
    }
    return s;
}

double ExactOracle::pair_variance(const std::vector<double>& fx, const std::vector<double>& fy) const {
    // odometer over per-dimension coupled atoms
    const int d = inst_.dim_xi();
    std::vector<std::size_t> idx(d, 0);
    double mean = 0.0, second = 0.0;
    for (;;) {
        double prob = 1.0;
        std::size_t sa = 0, sb = 0;
        for (int j = 0; j < d; ++j) {
            const CoupledAtom& at = coupled_[j][idx[j]];
            prob *= at.prob;
            sa += at.idx_a * strides_[j];
            sb += at.idx_b * strides_[j];
        }
        const double v = 0.5 * ((fx[sa] - fy[sa]) + (fx[sb] - fy[sb]));
        mean += prob * v;
        second += prob * v * v;
        int j = d - 1;
        for (; j >= 0; --j) {
            if (++idx[j] < coupled_[j].size()) break;
            idx[j] = 0;
        }
        if (j < 0) break;
    }
    return std::max(0.0, second - mean * mean);
}

ExactOracle::SigmaSet ExactOracle::sigma2(std::span<const double> x,
                                          std::span<const std::vector<double>> alt_optima) const {
    auto fx = f_table(x);
    SigmaSet out;
    bool first = true;
    auto consider = [&](std::span<const double> y) {
        auto fy = f_table(y);
        const double v_iid = plain_variance(*fx, *fy);
        const double v_av = pair_variance(*fx, *fy);
        if (first) {
            out.iid = v_iid;
            out.av = v_av;
            first = false;
        } else {
            out.iid = std::min(out.iid, v_iid);
            out.av = std::min(out.av, v_av);
        }
    };
    consider(x_star_);
    for (const auto& y : alt_optima) consider(y);
    out.two_i = 0.5 * out.iid;  // averaging two independent copies halves the variance
    return out;
}

ExactOracle::SigmaSet ExactOracle::sigma2_max(std::span<const double> x,
                                              std::span<const std::vector<double>> alt_optima) const {
    auto fx = f_table(x);
    SigmaSet out;
    bool first = true;
    auto consider = [&](std::span<const double> y) {
        auto fy = f_table(y);
        const double v_iid = plain_variance(*fx, *fy);
        const double v_av = pair_variance(*fx, *fy);
        if (first) {
            out.iid = v_iid;
            out.av = v_av;
            first = false;
        } else {
            out.iid = std::max(out.iid, v_iid);
            out.av = std::max(out.av, v_av);
        }
    };
    consider(x_star_);
    for (const auto& y : alt_optima) consider(y);
    out.two_i = 0.5 * out.iid;
    return out;
}

ExactQuantities exact_quantities(const TwoStageLP& inst, std::span<const double> x,
                                 std::span<const std::vector<double>> alt_optima, std::size_t cap) {
    ExactOracle oracle(inst, cap);
    ExactQuantities q;
    q.z_star = oracle.z_star();
    q.x_star = oracle.x_star();
    q.g_x = oracle.gap(x);
    q.sigma2 = oracle.sigma2(x, alt_optima);
    q.sigma2_max = oracle.sigma2_max(x, alt_optima);
    return q;
}

AnovaResult anova_decompose(const TwoStageLP& inst, std::span<const double> x, std::size_t cap) {
    ExactOracle oracle(inst, cap);
    const auto& scen = oracle.scenarios();
    auto fv = oracle.f_table(x);
    const int d = inst.dim_xi();

    AnovaResult res;
    res.mean = oracle.mean_f(x);

    std::vector<std::size_t> strides(d, 1);
    for (int j = d - 2; j >= 0; --j)
        strides[j] = strides[j + 1] * inst.marginals[j + 1].support_size();

    res.effects.resize(d);
    for (int j = 0; j < d; ++j) {
        const std::size_t card = inst.marginals[j].support_size();
        std::vector<double> cond(card, 0.0);
        for (std::size_t s = 0; s < scen.size(); ++s) {
            const std::size_t t = (s / strides[j]) % card;
            cond[t] += scen[s].prob * (*fv)[s];
        }
        for (std::size_t t = 0; t < card; ++t)
            cond[t] = cond[t] / inst.marginals[j].probs[t] - res.mean;
        res.effects[j] = std::move(cond);
    }

    double lo = 0.0, hi = 0.0;
    for (std::size_t s = 0; s < scen.size(); ++s) {
        double resid = (*fv)[s] - res.mean;
        for (int j = 0; j < d; ++j)
            resid -= res.effects[j][(s / strides[j]) % inst.marginals[j].support_size()];
        lo = std::min(lo, resid);
        hi = std::max(hi, resid);
    }
    res.m = -lo;
    res.M = hi;
    return res;
}

}  // namespace seqgap
