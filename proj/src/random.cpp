#include "bfem/random.hpp"

#include <cmath>
#include <numbers>

namespace bfem {

CounterRng CounterRng::split(std::uint64_t seed, std::uint64_t stream_id) {
    CounterRng rng(seed);
    rng.key_ = mix(rng.key_ ^ mix(stream_id + kGolden));
    return rng;
}

double CounterRng::next_normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double radius = std::sqrt(-2.0 * std::log(next_unit()));
    const double angle = 2.0 * std::numbers::pi * next_unit();
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

Vector gaussian_vector(CounterRng& rng, Index n) {
    Vector z(n);
    for (Index i = 0; i < n; ++i) z[i] = rng.next_normal();
    return z;
}

}  // namespace bfem
