#pragma once

#include <cstdint>
#include <random>

namespace entsim {

// One SplitMix64 step. Used to whiten seeds and to derive independent
// per-trial streams: Monte Carlo results must not depend on scheduling order,
// so every trial gets its own generator seeded from (base, index).
std::uint64_t splitmix64_next(std::uint64_t& state);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// mt19937_64 with fixed mappings to doubles and a fixed Poisson algorithm.
// std::poisson_distribution is implementation-defined, which would break the
// byte-identical reproducibility contract, so the sampler is spelled out here.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    double uniform();          // [0,1), 53-bit resolution
    double normal();           // standard normal, Box-Muller (no caching)
    std::uint64_t poisson(double mean);

private:
    std::mt19937_64 gen_;
};

} // namespace entsim
