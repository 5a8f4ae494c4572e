#pragma once

#include <cstdint>
#include <optional>
#include <vector>

// Hong-Ou-Mandel dip model and Gaussian least-squares fit. Delay units are
// opaque; all outputs carry the input's units.

namespace entsim::hom {

struct HomCurve {
    std::vector<double> delays;
    std::vector<double> counts;
    std::optional<std::vector<double>> count_errors;
};

struct HomFit {
    double baseline = 0.0;     // counts far from the dip
    double visibility = 0.0;   // dip depth, in [0, 1]
    double center = 0.0;       // dip position
    double width = 0.0;        // Gaussian std, > 0
    double residual_rms = 0.0;
};

/// baseline * (1 - visibility * exp(-(delay - center)^2 / (2 width^2)))
double hom_model(const HomFit& f, double delay);

/// Weighted Levenberg-Marquardt fit of the four dip parameters. Weights are
/// 1/error^2 when errors are given, else uniform. Throws std::runtime_error
/// on flat data (min count >= 0.9 max count) or non-convergence.
HomFit fit_gaussian_dip(const HomCurve& c);

/// Poisson counts with mean hom_model at each delay; errors set to
/// sqrt(max(count, 1)). Deterministic given the seed.
HomCurve simulate_hom_scan(const HomFit& f, const std::vector<double>& delays,
                           std::uint64_t rng_seed);

} // namespace entsim::hom
