#include "ablkit/random.hpp"

#include <cmath>
#include <numbers>

#include "ablkit/errors.hpp"

namespace ablkit {

double SplitMix64::normal() noexcept {
    // 1 - uniform() lies in (0, 1], so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Ket haar_ket(std::size_t dim, SplitMix64& rng) {
    if (dim == 0) throw InvalidArgument("dimension must be positive");
    std::vector<Complex> v(dim);
    for (auto& z : v) {
        const double re = rng.normal();
        const double im = rng.normal();
        z = Complex(re, im);
    }
    return Ket::normalized(std::move(v));
}

std::vector<Ket> haar_basis(std::size_t dim, SplitMix64& rng) {
    if (dim == 0) throw InvalidArgument("dimension must be positive");
    std::vector<std::vector<Complex>> cols(dim, std::vector<Complex>(dim));
    for (auto& c : cols) {
        for (auto& z : c) {
            const double re = rng.normal();
            const double im = rng.normal();
            z = Complex(re, im);
        }
    }
    return orthonormalize(cols);
}

std::size_t sample_index(const std::vector<double>& weights, double u) {
    if (weights.empty()) throw InvalidArgument("cannot sample from an empty distribution");
    // Rounding shortfall goes to the last branch that can actually occur.
    std::size_t last = weights.size() - 1;
    while (last > 0 && !(weights[last] > 0.0)) --last;
    double cdf = 0.0;
    for (std::size_t k = 0; k < last; ++k) {
        cdf += weights[k];
        if (u < cdf && weights[k] > 0.0) return k;
    }
    return last;
}

}  // namespace ablkit
