#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "seqgap/model.hpp"
#include "seqgap/rng.hpp"

namespace seqgap {

enum class SamplingMethod { IID, TwoI, AV, LHS };

const char* method_name(SamplingMethod s);
SamplingMethod method_from_name(const std::string& s);
bool is_paired(SamplingMethod s);  // TwoI and AV form pair-averaged estimators

// A batch of xi realizations together with the uniforms that generated them.
// Row-major n x d storage. For AV the partner uniform of u is stored as the
// computed complement 1 - u, never recomputed downstream.
struct Sample {
    SamplingMethod method = SamplingMethod::IID;
    std::size_t n = 0, d = 0;
    std::vector<double> points;    // n*d
    std::vector<double> uniforms;  // n*d
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // AV/2I only

    double point(std::size_t i, std::size_t j) const { return points[i * d + j]; }
    double uniform(std::size_t i, std::size_t j) const { return uniforms[i * d + j]; }
    std::uint64_t fingerprint() const;
};

double inverse_cdf(const Marginal& dist, double u);

// Draw order is part of the contract (it pins byte-level determinism):
// IID/2I fill row by row, component by component; AV draws one uniform vector
// per pair and stores its complement in the partner row; LHS works dimension
// by dimension, stratified uniforms first, then an unbiased shuffle.
Sample sample_iid(std::size_t n, const TwoStageLP& inst, RngStream& rng);
Sample sample_2i(std::size_t n, const TwoStageLP& inst, RngStream& rng);   // n even
Sample sample_av(std::size_t n, const TwoStageLP& inst, RngStream& rng);   // n even
Sample sample_lhs(std::size_t n, const TwoStageLP& inst, RngStream& rng);

Sample draw_sample(SamplingMethod method, std::size_t n, const TwoStageLP& inst, RngStream& rng);

void dump_sample_csv(const Sample& s, std::ostream& out);

}  // namespace seqgap
