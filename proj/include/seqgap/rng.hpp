#pragma once

#include <cstdint>

namespace seqgap {

// Well-known stream purposes. Streams with distinct purposes never overlap,
// which keeps solution generation independent of quality assessment.
namespace purpose {
inline constexpr std::uint32_t kSolution = 1;   // candidate-generating SAAs
inline constexpr std::uint32_t kAssess1 = 2;    // assessment sample (first/only replicate)
inline constexpr std::uint32_t kAssess2 = 3;    // second half-sample for averaged two-replication runs
inline constexpr std::uint32_t kCalibration = 11;  // base for calibration runs (uses +0,+1,+2)
inline constexpr std::uint32_t kNonSequential = 21;
inline constexpr std::uint32_t kReference = 31;  // reference solves for approximate gap oracles
}  // namespace purpose

struct StreamId {
    std::uint64_t replication = 0;
    std::uint32_t purpose = 0;
    std::uint32_t iteration = 0;
};

// Seedable, splittable counter-mode generator. The key is derived by chaining
// an avalanche mix over (seed, replication, purpose, iteration); draws are the
// SplitMix64 sequence for that key. Same (seed, id) reproduces the same
// uniforms bit for bit, distinct ids give statistically independent streams,
// and results never depend on which thread owns the stream.
class RngStream {
public:
    RngStream(std::uint64_t seed, StreamId id);

    std::uint64_t next_u64();
    double next_uniform();                     // in [0, 1), 53-bit resolution
    std::uint32_t next_below(std::uint32_t n); // uniform on {0,...,n-1}, unbiased

private:
    std::uint64_t state_;
};

}  // namespace seqgap
