#pragma once

#include <cstdint>
#include <random>

namespace entsim::rng {

using Engine = std::mt19937_64;

// Stateless seed mixer (splitmix64). Used to derive independent streams
// (bootstrap replicates, per-setting simulation) from one master seed.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

Engine make_engine(std::uint64_t seed);

// Uniform double in [0, 1) with 53 random bits.
double uniform(Engine& eng);

// Standard normal via Box-Muller; consumes exactly two uniforms per call.
double gaussian(Engine& eng);

// Poisson sample. Exact: multiplication method below mean 10, Hormann's
// PTRS transformed rejection above. Valid for mean in [0, ~1e9].
long long poisson(Engine& eng, double mean);

} // namespace entsim::rng
