#pragma once

#include "bfem/sparse_matrix.hpp"

#include <cstdint>

namespace bfem {

/// Counter-based 64-bit generator: output k of a stream is a fixed mix of
/// (key, k), so streams can be split without shared state.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    /// Independent stream `stream_id` derived from `seed`.
    static CounterRng split(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64() { return mix(key_ + kGolden * ++counter_); }

    /// Uniform on (0, 1].
    double next_unit() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the second value of each pair is cached.
    double next_normal();

    [[nodiscard]] std::uint64_t key() const noexcept { return key_; }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

Vector gaussian_vector(CounterRng& rng, Index n);

}  // namespace bfem
