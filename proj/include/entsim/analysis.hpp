#pragma once

#include "entsim/qmat.hpp"

#include <vector>

// Entanglement, privacy and nonlocality functionals.

namespace entsim::analysis {

using qmat::CMatrix;
using qmat::DensityMatrix;
using qmat::QubitPartition;

/// Unit vector on the Bloch sphere (checked where consumed).
struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Measurement directions (a, a') for one side and (b, b') for the other.
struct ChshSetting {
    BlochVector a;
    BlochVector a_prime;
    BlochVector b;
    BlochVector b_prime;
};

struct PptReport {
    QubitPartition partition;
    std::vector<double> eigenvalues; // ascending, sums to 1
    double negativity = 0.0;         // sum of |negative eigenvalues|
};

/// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)), clamped to [0, 1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Half the trace norm of rho - sigma.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// <1 + sx^4 + sy^4 + sz^4> on a four-qubit state. The companion
/// witness_minus flips the sign of the correlator sum; published
/// experimental values for Smolin-type states use that opposite convention,
/// so reports carry both.
double witness_plus(const DensityMatrix& rho);
double witness_minus(const DensityMatrix& rho);

/// Spectrum of the partial transpose over partition.group_b.
PptReport ppt_spectrum(const DensityMatrix& rho, const QubitPartition& partition);

/// C(a; b) = <(a.sigma) (x) (b.sigma)> on a two-qubit state.
double correlation(const DensityMatrix& rho2, const BlochVector& a, const BlochVector& b);

/// C(a;b) + C(a';b) + C(a;b') - C(a';b').
double chsh_value(const DensityMatrix& rho2, const ChshSetting& s);

struct ChshOptimum {
    double value = 0.0;
    ChshSetting setting;
};

/// Maximal CHSH value 2 sqrt(u1 + u2) from the two largest eigenvalues of
/// T^T T, with measurement vectors built from the singular directions of
/// the correlation matrix T so that chsh_value reproduces the optimum.
ChshOptimum chsh_optimal(const DensityMatrix& rho2);

struct KeyCorrelationReport {
    double p00 = 0.0;
    double p11 = 0.0;
    double p01 = 0.0;
    double p10 = 0.0;
    double off_diag_magnitude = 0.0; // |<00|rho_AB|11>| in the key basis
};

/// sigma_y (x) sigma_y outcome statistics of the key qubits (A, B) after
/// tracing out the shield (A', B').
KeyCorrelationReport key_correlation_report(const DensityMatrix& rho4);

/// Analytic CHSH optimum for the ideal reduced key state, the 1:3 mixture
/// of phi- and psi+: a = y, a' = z, b/b' = (2 y -+ z)/sqrt(5).
ChshSetting reference_key_chsh_setting();

/// The three partitions of (A, B, A', B') into two photon pairs.
std::vector<QubitPartition> pair_pair_partitions();

} // namespace entsim::analysis
