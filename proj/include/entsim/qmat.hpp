#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

// Dense complex-matrix kernel for small multi-qubit Hilbert spaces.
//
// Conventions used throughout the project:
//  - qubit 0 is the leftmost (most significant) tensor factor, so basis
//    index i has qubit k's bit at position (n-1-k);
//  - bit value 0 of qubit k means |H>, bit value 1 means |V>.

namespace entsim::qmat {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kHermTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;

double max_abs(const CMatrix& m);
bool all_finite(const CMatrix& m);

inline int qubit_bit(int index, int qubit, int n_qubits)
{
    return (index >> (n_qubits - 1 - qubit)) & 1;
}

/// Normalized pure state on n qubits.
class PureState {
public:
    PureState(int n_qubits, CVector amplitudes);

    int n_qubits() const { return n_qubits_; }
    int dim() const { return static_cast<int>(amps_.size()); }
    const CVector& amplitudes() const { return amps_; }

private:
    int n_qubits_;
    CVector amps_;
};

/// Hermitian, unit-trace, positive-semidefinite operator on n qubits.
/// All three invariants are checked on construction.
class DensityMatrix {
public:
    DensityMatrix(int n_qubits, CMatrix matrix);

    static DensityMatrix maximally_mixed(int n_qubits);
    static DensityMatrix from_pure(const PureState& psi);

    int n_qubits() const { return n_qubits_; }
    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }

private:
    int n_qubits_;
    CMatrix m_;
};

/// Bipartition of qubits {0..n-1} into two disjoint non-empty groups.
struct QubitPartition {
    QubitPartition(std::vector<int> a, std::vector<int> b);

    int n_qubits() const { return static_cast<int>(group_a.size() + group_b.size()); }

    std::vector<int> group_a;
    std::vector<int> group_b;
};

/// Kronecker product; qubit order of the result is a's qubits then b's.
CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(const CVector& a, const CVector& b);

/// Reduced state on the kept qubits (keep: non-empty, strictly increasing).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

/// Transpose over the given qubit subset. The result stays Hermitian and
/// unit-trace but may be non-PSD, hence the plain matrix return type.
CMatrix partial_transpose(const DensityMatrix& rho, const std::vector<int>& subset);

struct HermEig {
    Eigen::VectorXd eigenvalues; // ascending
    CMatrix eigenvectors;        // columns, unitary
};

/// Eigendecomposition of a Hermitian matrix (symmetrized internally;
/// rejects inputs farther than 1e-8 from Hermitian).
HermEig herm_eig(const CMatrix& m);

/// Hermitian PSD square root; eigenvalues in [-1e-9, 0) are clamped to 0.
CMatrix psd_sqrt(const DensityMatrix& rho);

/// Relabel qubits: qubit k of the result is qubit perm[k] of the input.
CMatrix permute_qubits(const CMatrix& m, const std::vector<int>& perm);

} // namespace entsim::qmat
