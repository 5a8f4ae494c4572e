#include "entsim/random.hpp"

#include <cmath>
#include <stdexcept>

namespace entsim::rng {

std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    return mix_seed(mix_seed(master) ^ mix_seed(index + 1));
}

Engine make_engine(std::uint64_t seed)
{
    return Engine(mix_seed(seed));
}

double uniform(Engine& eng)
{
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double gaussian(Engine& eng)
{
    double u1 = uniform(eng);
    double u2 = uniform(eng);
    // 1-u1 keeps the log argument in (0, 1]
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {

long long poisson_small(Engine& eng, double mean)
{
    const double limit = std::exp(-mean);
    long long k = 0;
    double prod = uniform(eng);
    while (prod > limit) {
        ++k;
        prod *= uniform(eng);
    }
    return k;
}

// Hormann (1993), transformed rejection with squeeze. Exact for mean >= 10.
long long poisson_ptrs(Engine& eng, double mean)
{
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);

    for (;;) {
        double u = uniform(eng) - 0.5;
        double v = uniform(eng);
        double us = 0.5 - std::abs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r)
            return static_cast<long long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us))
            continue;
        double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_mean - mean - std::lgamma(k + 1.0))
            return static_cast<long long>(kf);
    }
}

} // namespace

long long poisson(Engine& eng, double mean)
{
    if (!(mean >= 0.0))
        throw std::invalid_argument("poisson: mean must be non-negative");
    if (mean == 0.0)
        return 0;
    if (mean < 10.0)
        return poisson_small(eng, mean);
    return poisson_ptrs(eng, mean);
}

} // namespace entsim::rng
