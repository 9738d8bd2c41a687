#include "seqgap/rng.hpp"

namespace seqgap {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, StreamId id) {
    std::uint64_t k = mix64(seed + kGolden);
    k = mix64(k ^ (id.replication + kGolden));
    k = mix64(k ^ (static_cast<std::uint64_t>(id.purpose) + 0xD1B54A32D192ED03ull));
    k = mix64(k ^ (static_cast<std::uint64_t>(id.iteration) + 0x8BB84B93962EACC9ull));
    state_ = k;
}

std::uint64_t RngStream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double RngStream::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint32_t RngStream::next_below(std::uint32_t n) {
    if (n <= 1) return 0;
    // rejection below the largest multiple of n
    const std::uint64_t threshold = (0ull - n) % n;
    for (;;) {
        std::uint64_t x = next_u64();
        if (x >= threshold) return static_cast<std::uint32_t>(x % n);
    }
}

}  // namespace seqgap
