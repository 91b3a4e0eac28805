#include "entsim/random.hpp"

#include <cmath>
#include <stdexcept>

namespace entsim {

std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t s = base;
    std::uint64_t a = splitmix64_next(s);
    s = a ^ (index * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
    return splitmix64_next(s);
}

Rng::Rng(std::uint64_t seed) : gen_(seed) {}

double Rng::uniform() {
    return double(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    double u1 = 1.0 - uniform(); // (0,1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {

// product-of-uniforms method, fine for small means
std::uint64_t poisson_small(Rng& rng, double mean) {
    const double limit = std::exp(-mean);
    double prod = 1.0;
    std::uint64_t k = 0;
    do {
        ++k;
        prod *= rng.uniform();
    } while (prod > limit);
    return k - 1;
}

// Hormann's PTRS transformed rejection, valid for mean >= 10
std::uint64_t poisson_ptrs(Rng& rng, double mean) {
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        double u = rng.uniform() - 0.5;
        double v = rng.uniform();
        double us = 0.5 - std::abs(u);
        double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return std::uint64_t(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_mean - mean - std::lgamma(k + 1.0))
            return std::uint64_t(k);
    }
}

} // namespace

std::uint64_t Rng::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean < 30.0) return poisson_small(*this, mean);
    // PTRS's acceptance test cancels catastrophically for huge means; the
    // normal limit is exact to O(1/sqrt(mean)) there.
    if (mean < 1e7) return poisson_ptrs(*this, mean);
    double k = std::round(mean + std::sqrt(mean) * normal());
    return k <= 0.0 ? 0 : std::uint64_t(k);
}

} // namespace entsim
