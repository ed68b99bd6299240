// random.hpp
// Reproducible randomness: SplitMix64 with its published constants, a
// seed/index -> substream map for order-independent parallel work, and Haar
// random kets and bases.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ablkit/linalg.hpp"

namespace ablkit {

// SplitMix64 finalizer (Steele, Lea & Flood; constants as in Vigna's
// reference implementation).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    using result_type = std::uint64_t;
    static constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    // Independent stream for work item `index` under `seed`.
    static constexpr SplitMix64 substream(std::uint64_t seed, std::uint64_t index) noexcept {
        return SplitMix64(mix64(mix64(seed) ^ (index * golden_gamma + golden_gamma)));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~std::uint64_t{0}; }

    constexpr result_type operator()() noexcept {
        state_ += golden_gamma;
        return mix64(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; uses libm only, no std::*_distribution,
    // so streams match across standard libraries.
    double normal() noexcept;

private:
    std::uint64_t state_;
};

// Haar-distributed unit vector: normalized i.i.d. complex Gaussians.
Ket haar_ket(std::size_t dim, SplitMix64& rng);

// Haar-distributed orthonormal basis: Gram-Schmidt on a complex Gaussian
// matrix.
std::vector<Ket> haar_basis(std::size_t dim, SplitMix64& rng);

// Index of the branch selected by inverse CDF of `u` in [0, 1) over the given
// weights. The last branch with positive weight absorbs rounding shortfall.
std::size_t sample_index(const std::vector<double>& weights, double u);

}  // namespace ablkit
