#pragma once

#include "entsim/qmat.hpp"

#include <cstdint>
#include <optional>
#include <vector>

// Polarization states and correlated wave-plate noise channels.
//
// Four-qubit states live on photons (A, B, A', B') = qubits (0, 1, 2, 3);
// the noise channels act on B and B'.

namespace entsim::states {

using qmat::CMatrix;
using qmat::CVector;
using qmat::DensityMatrix;
using qmat::PureState;

enum class PauliLabel { I, X, Y, Z };
enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };
enum class Retardance { Half, Quarter };

/// Birefringent plate with a fast axis at the given angle (normalized to
/// [0, pi); the Jones matrices are pi-periodic).
struct WavePlate {
    WavePlate(Retardance r, double angle);

    Retardance retardance;
    double fast_axis_angle;
};

/// One weighted term of a correlated two-photon noise channel. The plate
/// lists record how each operator is realized optically; they are required
/// for misaligned application and may be empty for raw-matrix terms.
/// shared_plates marks terms where B and B' pass through the same physical
/// plates, so angle errors are common to both photons.
struct NoiseTerm {
    double weight = 0.0;
    CMatrix op_b;
    CMatrix op_bprime;
    std::vector<WavePlate> plates_b;
    std::vector<WavePlate> plates_bprime;
    std::optional<PauliLabel> pauli_b;
    std::optional<PauliLabel> pauli_bprime;
    bool shared_plates = false;
};

/// Weighted list of correlated local unitaries on B and B'.
/// Weights must be positive and sum to 1; ops must be 2x2 unitaries.
class NoiseSchedule {
public:
    explicit NoiseSchedule(std::vector<NoiseTerm> terms);

    const std::vector<NoiseTerm>& terms() const { return terms_; }

private:
    std::vector<NoiseTerm> terms_;
};

CMatrix pauli(PauliLabel label);

/// Bell state on two qubits in the (H, V) basis.
PureState bell_state(BellKind kind);

/// Key-basis vector (|H> + i(-1)^v |V>)/sqrt(2); sigma_y eigenvector with
/// eigenvalue +1 for v = 0, -1 for v = 1.
PureState key_basis_state(int v);

/// Equal mixture of the four identical Bell-pair products on (AB)(A'B').
DensityMatrix smolin_state();

/// Equal mixture of phi-.psi-, psi+.phi+, psi+.psi+, psi+.phi- on (AB)(A'B').
DensityMatrix private_state();

/// Jones matrix of a wave plate. HWP(t) = [[cos2t, sin2t], [sin2t, -cos2t]];
/// QWP(t) = R(t) diag(1, i) R(-t), R the real rotation matrix.
CMatrix waveplate_unitary(const WavePlate& p);

/// Ordered product of plate transforms; the first plate acts first.
CMatrix compose_plates(const std::vector<WavePlate>& plates);

/// True iff u = exp(i a) v entrywise within tol (max norm), for the best a.
bool equal_up_to_phase(const CMatrix& u, const CMatrix& v, double tol = 1e-9);

/// Three-plate bank setting [QWP, QWP, HWP] realizing the given Pauli up to
/// global phase.
std::vector<WavePlate> pauli_plate_setting(PauliLabel label);

/// Single-HWP realization, defined for X and Z only.
std::vector<WavePlate> pauli_half_wave_setting(PauliLabel label);

NoiseSchedule smolin_schedule();
NoiseSchedule private_schedule();

/// Apply the channel sum_k w_k (1 (x) U_k (x) 1 (x) V_k) rho (.)^dag to a
/// four-qubit state. With misalign_sigma > 0 every physical plate angle is
/// perturbed by an independent Gaussian draw, once per term; terms realized
/// by shared plates receive common draws for B and B'.
DensityMatrix apply_schedule(const DensityMatrix& rho, const NoiseSchedule& schedule,
                             double misalign_sigma, std::uint64_t rng_seed);

} // namespace entsim::states
