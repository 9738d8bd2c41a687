#include "seqgap/sampling.hpp"

#include <cstring>
#include <numeric>
#include <ostream>

#include "seqgap/errors.hpp"
#include "seqgap/textio.hpp"

namespace seqgap {

const char* method_name(SamplingMethod s) {
    switch (s) {
        case SamplingMethod::IID: return "iid";
        case SamplingMethod::TwoI: return "2i";
        case SamplingMethod::AV: return "av";
        case SamplingMethod::LHS: return "lhs";
    }
    return "?";
}

SamplingMethod method_from_name(const std::string& s) {
    if (s == "iid" || s == "IID") return SamplingMethod::IID;
    if (s == "2i" || s == "2I") return SamplingMethod::TwoI;
    if (s == "av" || s == "AV") return SamplingMethod::AV;
    if (s == "lhs" || s == "LHS") return SamplingMethod::LHS;
    throw ConfigError("unknown sampling method '" + s + "' (expected iid, 2i, av or lhs)");
}

bool is_paired(SamplingMethod s) {
    return s == SamplingMethod::TwoI || s == SamplingMethod::AV;
}

std::uint64_t Sample::fingerprint() const {
    // FNV-1a over the raw bytes of both matrices plus the shape
    std::uint64_t h = 1469598103934665603ull;
    auto eat = [&h](const void* data, std::size_t len) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    std::uint64_t shape[3] = {static_cast<std::uint64_t>(method), n, d};
    eat(shape, sizeof shape);
    eat(points.data(), points.size() * sizeof(double));
    eat(uniforms.data(), uniforms.size() * sizeof(double));
    return h;
}

double inverse_cdf(const Marginal& dist, double u) {
    return dist.inverse_cdf(u);
}

namespace {

Sample make_empty(SamplingMethod m, std::size_t n, const TwoStageLP& inst) {
    Sample s;
    s.method = m;
    s.n = n;
    s.d = static_cast<std::size_t>(inst.dim_xi());
    s.points.resize(n * s.d);
    s.uniforms.resize(n * s.d);
    return s;
}

void transform_all(Sample& s, const TwoStageLP& inst) {
    for (std::size_t i = 0; i < s.n; ++i)
        for (std::size_t j = 0; j < s.d; ++j)
            s.points[i * s.d + j] = inst.marginals[j].inverse_cdf(s.uniforms[i * s.d + j]);
}

void require_even(std::size_t n, const char* what) {
    if (n % 2 != 0) throw ConfigError(std::string(what) + " requires an even sample size, got " + std::to_string(n));
}

}  // namespace

Sample sample_iid(std::size_t n, const TwoStageLP& inst, RngStream& rng) {
    if (n < 1) throw ConfigError("sample size must be >= 1");
    Sample s = make_empty(SamplingMethod::IID, n, inst);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < s.d; ++j)
            s.uniforms[i * s.d + j] = rng.next_uniform();
    transform_all(s, inst);
    return s;
}

Sample sample_2i(std::size_t n, const TwoStageLP& inst, RngStream& rng) {
    require_even(n, "2i sampling");
    Sample s = sample_iid(n, inst, rng);
    s.method = SamplingMethod::TwoI;
    for (std::size_t p = 0; p < n / 2; ++p)
        s.pairs.emplace_back(2 * p, 2 * p + 1);
    return s;
}

Sample sample_av(std::size_t n, const TwoStageLP& inst, RngStream& rng) {
    require_even(n, "antithetic sampling");
    Sample s = make_empty(SamplingMethod::AV, n, inst);
    for (std::size_t p = 0; p < n / 2; ++p) {
        for (std::size_t j = 0; j < s.d; ++j) {
            double u = rng.next_uniform();
            s.uniforms[(2 * p) * s.d + j] = u;
            s.uniforms[(2 * p + 1) * s.d + j] = 1.0 - u;
        }
        s.pairs.emplace_back(2 * p, 2 * p + 1);
    }
    transform_all(s, inst);
    return s;
}

Sample sample_lhs(std::size_t n, const TwoStageLP& inst, RngStream& rng) {
    if (n < 1) throw ConfigError("sample size must be >= 1");
    Sample s = make_empty(SamplingMethod::LHS, n, inst);
    std::vector<double> strata(n);
    std::vector<std::uint32_t> perm(n);
    for (std::size_t j = 0; j < s.d; ++j) {
        // one uniform inside each of the n equal cells
        for (std::size_t i = 0; i < n; ++i)
            strata[i] = (static_cast<double>(i) + rng.next_uniform()) / static_cast<double>(n);
        std::iota(perm.begin(), perm.end(), 0u);
        for (std::size_t i = n; i > 1; --i) {
            std::uint32_t r = rng.next_below(static_cast<std::uint32_t>(i));
            std::swap(perm[i - 1], perm[r]);
        }
        for (std::size_t i = 0; i < n; ++i)
            s.uniforms[i * s.d + j] = strata[perm[i]];
    }
    transform_all(s, inst);
    return s;
}

Sample draw_sample(SamplingMethod method, std::size_t n, const TwoStageLP& inst, RngStream& rng) {
    switch (method) {
        case SamplingMethod::IID: return sample_iid(n, inst, rng);
        case SamplingMethod::TwoI: return sample_2i(n, inst, rng);
        case SamplingMethod::AV: return sample_av(n, inst, rng);
        case SamplingMethod::LHS: return sample_lhs(n, inst, rng);
    }
    throw ConfigError("unknown sampling method");
}

void dump_sample_csv(const Sample& s, std::ostream& out) {
    out << "row,partner";
    for (std::size_t j = 0; j < s.d; ++j) out << ",u" << j;
    for (std::size_t j = 0; j < s.d; ++j) out << ",xi" << j;
    out << "\n";
    std::vector<long> partner(s.n, -1);
    for (auto [a, b] : s.pairs) {
        partner[a] = static_cast<long>(b);
        partner[b] = static_cast<long>(a);
    }
    for (std::size_t i = 0; i < s.n; ++i) {
        out << i << "," << partner[i];
        for (std::size_t j = 0; j < s.d; ++j) out << "," << fmt_double(s.uniform(i, j));
        for (std::size_t j = 0; j < s.d; ++j) out << "," << fmt_double(s.point(i, j));
        out << "\n";
    }
}

}  // namespace seqgap
