#include "entsim/qmat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace entsim::qmat {

namespace {

int checked_qubit_count(const CMatrix& m)
{
    if (m.rows() != m.cols())
        throw std::invalid_argument("matrix must be square");
    int dim = static_cast<int>(m.rows());
    int n = 0;
    while ((1 << n) < dim)
        ++n;
    if ((1 << n) != dim)
        throw std::invalid_argument("dimension must be a power of two");
    return n;
}

void check_index_list(const std::vector<int>& idx, int n_qubits, const char* what)
{
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= n_qubits)
            throw std::invalid_argument(std::string(what) + ": qubit index out of range");
        if (i > 0 && idx[i] <= idx[i - 1])
            throw std::invalid_argument(std::string(what) + ": indices must be strictly increasing");
    }
}

} // namespace

double max_abs(const CMatrix& m)
{
    if (m.size() == 0)
        return 0.0;
    return m.cwiseAbs().maxCoeff();
}

bool all_finite(const CMatrix& m)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                return false;
    return true;
}

PureState::PureState(int n_qubits, CVector amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes))
{
    if (n_qubits_ < 1)
        throw std::invalid_argument("PureState: need at least one qubit");
    if (amps_.size() != (Eigen::Index{1} << n_qubits_))
        throw std::invalid_argument("PureState: amplitude count must be 2^n");
    double norm2 = amps_.squaredNorm();
    if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > 1e-12)
        throw std::invalid_argument("PureState: not normalized");
}

DensityMatrix::DensityMatrix(int n_qubits, CMatrix matrix)
    : n_qubits_(n_qubits), m_(std::move(matrix))
{
    if (n_qubits_ < 1)
        throw std::invalid_argument("DensityMatrix: need at least one qubit");
    if (m_.rows() != m_.cols() || m_.rows() != (Eigen::Index{1} << n_qubits_))
        throw std::invalid_argument("DensityMatrix: dimension must be 2^n x 2^n");
    if (!all_finite(m_))
        throw std::invalid_argument("DensityMatrix: non-finite entries");
    if (max_abs(m_ - m_.adjoint().eval()) > kHermTol)
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m_.trace().real() - 1.0) > kTraceTol || std::abs(m_.trace().imag()) > kTraceTol)
        throw std::invalid_argument("DensityMatrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("DensityMatrix: eigensolve failed");
    if (es.eigenvalues().minCoeff() < -kPsdTol)
        throw std::invalid_argument("DensityMatrix: not positive semidefinite");
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits)
{
    Eigen::Index dim = Eigen::Index{1} << n_qubits;
    return DensityMatrix(n_qubits, CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi)
{
    const CVector& v = psi.amplitudes();
    return DensityMatrix(psi.n_qubits(), v * v.adjoint());
}

QubitPartition::QubitPartition(std::vector<int> a, std::vector<int> b)
    : group_a(std::move(a)), group_b(std::move(b))
{
    if (group_a.empty() || group_b.empty())
        throw std::invalid_argument("QubitPartition: both groups must be non-empty");
    int n = n_qubits();
    check_index_list(group_a, n, "QubitPartition");
    check_index_list(group_b, n, "QubitPartition");
    std::vector<bool> seen(n, false);
    for (int q : group_a)
        seen[q] = true;
    for (int q : group_b) {
        if (seen[q])
            throw std::invalid_argument("QubitPartition: groups overlap");
        seen[q] = true;
    }
    // disjoint + sizes summing to n forces the union to be {0..n-1}
}

CMatrix kron(const CMatrix& a, const CMatrix& b)
{
    if (!all_finite(a) || !all_finite(b))
        throw std::invalid_argument("kron: non-finite entries");
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CVector kron(const CVector& a, const CVector& b)
{
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep)
{
    const int n = rho.n_qubits();
    if (keep.empty())
        throw std::invalid_argument("partial_trace: keep list must be non-empty");
    check_index_list(keep, n, "partial_trace");

    std::vector<int> traced;
    for (int q = 0; q < n; ++q)
        if (!std::binary_search(keep.begin(), keep.end(), q))
            traced.push_back(q);

    const int nk = static_cast<int>(keep.size());
    const int nt = static_cast<int>(traced.size());
    const int dim_out = 1 << nk;
    const int dim_tr = 1 << nt;

    const CMatrix& m = rho.matrix();
    CMatrix out = CMatrix::Zero(dim_out, dim_out);
    for (int r = 0; r < dim_out; ++r) {
        for (int c = 0; c < dim_out; ++c) {
            Complex sum = 0.0;
            for (int t = 0; t < dim_tr; ++t) {
                int full_r = 0;
                int full_c = 0;
                for (int k = 0; k < nk; ++k) {
                    int shift = n - 1 - keep[k];
                    full_r |= qubit_bit(r, k, nk) << shift;
                    full_c |= qubit_bit(c, k, nk) << shift;
                }
                for (int k = 0; k < nt; ++k) {
                    int shift = n - 1 - traced[k];
                    int bit = qubit_bit(t, k, nt);
                    full_r |= bit << shift;
                    full_c |= bit << shift;
                }
                sum += m(full_r, full_c);
            }
            out(r, c) = sum;
        }
    }
    return DensityMatrix(nk, std::move(out));
}

CMatrix partial_transpose(const DensityMatrix& rho, const std::vector<int>& subset)
{
    const int n = rho.n_qubits();
    check_index_list(subset, n, "partial_transpose");
    const int dim = rho.dim();

    int mask = 0;
    for (int q : subset)
        mask |= 1 << (n - 1 - q);

    const CMatrix& m = rho.matrix();
    CMatrix out(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            // swap the subset bits between row and column index
            int rp = (r & ~mask) | (c & mask);
            int cp = (c & ~mask) | (r & mask);
            out(rp, cp) = m(r, c);
        }
    }
    return out;
}

HermEig herm_eig(const CMatrix& m)
{
    if (m.rows() != m.cols())
        throw std::invalid_argument("herm_eig: matrix must be square");
    if (!all_finite(m))
        throw std::invalid_argument("herm_eig: non-finite entries");
    if (max_abs(m - m.adjoint().eval()) > 1e-8)
        throw std::invalid_argument("herm_eig: matrix is not Hermitian");

    CMatrix sym = 0.5 * (m + m.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("herm_eig: eigensolver did not converge");
    return HermEig{es.eigenvalues(), es.eigenvectors()};
}

CMatrix psd_sqrt(const DensityMatrix& rho)
{
    HermEig eig = herm_eig(rho.matrix());
    Eigen::VectorXd lam = eig.eigenvalues;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < -kPsdTol)
            throw std::invalid_argument("psd_sqrt: matrix is not PSD");
        lam(i) = lam(i) < 0.0 ? 0.0 : lam(i);
    }
    CMatrix s = eig.eigenvectors * lam.cwiseSqrt().asDiagonal() * eig.eigenvectors.adjoint();
    return 0.5 * (s + s.adjoint().eval());
}

CMatrix permute_qubits(const CMatrix& m, const std::vector<int>& perm)
{
    const int n = checked_qubit_count(m);
    if (static_cast<int>(perm.size()) != n)
        throw std::invalid_argument("permute_qubits: permutation size mismatch");
    std::vector<bool> seen(n, false);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[p])
            throw std::invalid_argument("permute_qubits: not a permutation");
        seen[p] = true;
    }

    const int dim = 1 << n;
    auto map_index = [&](int i) {
        int out = 0;
        for (int k = 0; k < n; ++k)
            out |= qubit_bit(i, perm[k], n) << (n - 1 - k);
        return out;
    };
    CMatrix out(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            out(map_index(r), map_index(c)) = m(r, c);
    return out;
}

} // namespace entsim::qmat
