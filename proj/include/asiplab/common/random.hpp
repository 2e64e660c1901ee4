#pragma once

#include <cstdint>
#include <random>

namespace asiplab {

using Rng = std::mt19937_64;

/// Seed for trajectory `index` of an ensemble; a splitmix64 finalizer over
/// (master, index) so nearby indices give unrelated streams.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1].
inline double uniform01_open_low(Rng& rng) noexcept {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

/// Standard normal draw.  Uses the polar method on our own uniforms so the
/// stream is the same across standard libraries.
double standard_normal(Rng& rng) noexcept;

/// Polar-method sampler that keeps the second variate of each pair.
class NormalSampler {
public:
    double operator()(Rng& rng) noexcept;

private:
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// 64-bit FNV-1a, used for config fingerprints.
std::uint64_t fnv1a64(const void* data, std::size_t size) noexcept;

}  // namespace asiplab
