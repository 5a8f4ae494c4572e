#pragma once

#include "entsim/qmat.hpp"
#include "entsim/random.hpp"

#include <cstdint>

// Shared fixtures for the test suites. Reference values are built by hand
// here, independent of the library construction paths they check.

namespace test_helpers {

using entsim::qmat::CMatrix;
using entsim::qmat::Complex;
using entsim::qmat::CVector;
using entsim::qmat::DensityMatrix;

inline double max_diff(const CMatrix& a, const CMatrix& b)
{
    return entsim::qmat::max_abs(a - b);
}

// hand-written Bell kets in the (H,V) basis, order |HH>,|HV>,|VH>,|VV>
inline CVector bell_ket(char which, int sign)
{
    const double s = 1.0 / std::sqrt(2.0);
    CVector v = CVector::Zero(4);
    if (which == 'p') { // phi
        v(0) = s;
        v(3) = sign * s;
    } else { // psi
        v(1) = s;
        v(2) = sign * s;
    }
    return v;
}

inline CMatrix projector(const CVector& v)
{
    return v * v.adjoint();
}

// Ginibre-sampled full-rank density matrix
inline DensityMatrix random_density(int n_qubits, std::uint64_t seed)
{
    entsim::rng::Engine eng = entsim::rng::make_engine(seed);
    const int dim = 1 << n_qubits;
    CMatrix g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            g(r, c) = Complex(entsim::rng::gaussian(eng), entsim::rng::gaussian(eng));
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(n_qubits, rho);
}

inline CVector random_ket(int dim, entsim::rng::Engine& eng)
{
    CVector v(dim);
    for (int i = 0; i < dim; ++i)
        v(i) = Complex(entsim::rng::gaussian(eng), entsim::rng::gaussian(eng));
    v /= v.norm();
    return v;
}

inline DensityMatrix random_pure_density(int n_qubits, std::uint64_t seed)
{
    entsim::rng::Engine eng = entsim::rng::make_engine(seed);
    CVector v = random_ket(1 << n_qubits, eng);
    return DensityMatrix(n_qubits, projector(v));
}

// random Hermitian with entries O(1)
inline CMatrix random_hermitian(int dim, std::uint64_t seed)
{
    entsim::rng::Engine eng = entsim::rng::make_engine(seed);
    CMatrix g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            g(r, c) = Complex(entsim::rng::gaussian(eng), entsim::rng::gaussian(eng));
    return 0.5 * (g + g.adjoint().eval());
}

// Haar-ish unitary via QR of a Ginibre sample
inline CMatrix random_unitary(int dim, std::uint64_t seed)
{
    entsim::rng::Engine eng = entsim::rng::make_engine(seed);
    CMatrix g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            g(r, c) = Complex(entsim::rng::gaussian(eng), entsim::rng::gaussian(eng));
    Eigen::HouseholderQR<CMatrix> qr(g);
    return qr.householderQ();
}

// mixture of random product states; separable across every cut by build
inline DensityMatrix random_separable(int n_qubits, std::uint64_t seed, int n_terms = 6)
{
    entsim::rng::Engine eng = entsim::rng::make_engine(seed);
    const int dim = 1 << n_qubits;
    CMatrix rho = CMatrix::Zero(dim, dim);
    double weight_sum = 0.0;
    for (int t = 0; t < n_terms; ++t) {
        double w = entsim::rng::uniform(eng) + 0.1;
        CVector v = random_ket(2, eng);
        CMatrix term = projector(v);
        for (int q = 1; q < n_qubits; ++q) {
            CVector u = random_ket(2, eng);
            term = entsim::qmat::kron(term, projector(u));
        }
        rho += w * term;
        weight_sum += w;
    }
    rho /= weight_sum;
    rho = 0.5 * (rho + rho.adjoint().eval());
    return DensityMatrix(n_qubits, rho);
}

} // namespace test_helpers
