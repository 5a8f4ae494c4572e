#pragma once

#include "entsim/qmat.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Polarization tomography: simulated coincidence counting over the 3^n
// X/Y/Z product bases and maximum-likelihood state reconstruction.
//
// Outcome indices mirror the basis-index convention: the per-qubit result
// bits form a bit string with qubit 0 leftmost (most significant), result
// bit 0 meaning the +1 eigenvector.

namespace entsim::tomo {

using qmat::CMatrix;
using qmat::CVector;
using qmat::DensityMatrix;

enum class Basis { X, Y, Z };

struct MeasurementSetting {
    std::vector<Basis> bases;

    int n_qubits() const { return static_cast<int>(bases.size()); }
};

std::string to_string(const MeasurementSetting& s);
MeasurementSetting parse_setting(const std::string& text);

/// All 3^n settings, lexicographic in (X, Y, Z) with qubit 0 varying slowest.
std::vector<MeasurementSetting> all_settings(int n_qubits);

struct CountRecord {
    MeasurementSetting setting;
    std::vector<double> counts; // integral for real datasets; expected-value
                                // datasets may carry fractional entries
    double duration_s = 0.0;
};

struct TomographyDataset {
    int n_qubits = 0;
    std::vector<CountRecord> records;
};

/// Exactly one record per setting, all 3^n present, 2^n counts each.
bool is_complete(const TomographyDataset& d);
void require_complete(const TomographyDataset& d);

enum class CollectionMode { Pulsed, Fast };

struct ExperimentConfig {
    double fourfold_rate_hz = 2.0;
    double pair_rate_hz = 1.0e4;
    double duration_per_setting_s = 3600.0;
    CollectionMode collection_mode = CollectionMode::Pulsed;
    double misalign_sigma = 0.0;
    std::uint64_t rng_seed = 0;
    bool rotation_dead_time = false; // 10 s hold per 30 s noise interval
};

/// Mean detected four-fold event rate for the configured collection mode.
double effective_event_rate_hz(const ExperimentConfig& cfg);

/// Effective counting duration per setting (dead-time corrected if enabled).
double effective_duration_s(const ExperimentConfig& cfg);

/// Product eigenkets of the setting, outcome-indexed.
std::vector<CVector> setting_eigenkets(const MeasurementSetting& s);

/// Rank-1 projectors onto the setting's eigenkets; they sum to identity.
std::vector<CMatrix> setting_projectors(const MeasurementSetting& s);

/// Born-rule outcome probabilities, clamped to [0, 1].
std::vector<double> outcome_probs(const DensityMatrix& rho, const MeasurementSetting& s);

/// Poisson-sample counts for every setting; deterministic given cfg.rng_seed.
TomographyDataset simulate_counts(const DensityMatrix& rho, const ExperimentConfig& cfg);

/// Noise-free dataset with counts set to their expected values.
TomographyDataset expected_dataset(const DensityMatrix& rho, const ExperimentConfig& cfg);

/// Reconstruction from empirical Pauli correlators, averaged over every
/// setting that measures each correlator. Hermitian and unit trace by
/// construction; not guaranteed PSD.
CMatrix linear_inversion(const TomographyDataset& d);

struct MleOptions {
    double dilution = 0.5;   // epsilon of the diluted fixed-point step
    double tol = 1e-10;      // stop when the log-likelihood gain drops below
    int max_iterations = 5000;
    bool record_loglik = true;
};

struct MleDiagnostics {
    int iterations = 0;
    std::vector<double> loglik_trace;
    bool converged = false;
    double dilution = 0.0;
};

/// Maximum-likelihood reconstruction via the diluted R-rho-R fixed point.
/// The recorded log-likelihood is non-decreasing; non-convergence is
/// reported through the diagnostics, not thrown.
std::pair<DensityMatrix, MleDiagnostics> mle_reconstruct(const TomographyDataset& d,
                                                         const MleOptions& opts = {});

/// n_rep re-simulations of rho_hat under cfg (seeds derived from
/// cfg.rng_seed), each reconstructed by MLE. Replicates run concurrently;
/// results are deterministic and ordered by replicate index.
std::vector<DensityMatrix> bootstrap_ensemble(const DensityMatrix& rho_hat,
                                              const ExperimentConfig& cfg, int n_rep);

} // namespace entsim::tomo
