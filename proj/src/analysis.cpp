#include "entsim/analysis.hpp"

#include "entsim/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace entsim::analysis {

namespace {

using states::pauli;
using states::PauliLabel;

void ensure_unit(const BlochVector& v)
{
    double norm = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-10)
        throw std::invalid_argument("BlochVector: must have unit norm");
}

CMatrix bloch_operator(const BlochVector& v)
{
    ensure_unit(v);
    return v.x * pauli(PauliLabel::X) + v.y * pauli(PauliLabel::Y) + v.z * pauli(PauliLabel::Z);
}

CMatrix pauli_fourfold(PauliLabel label)
{
    CMatrix p = pauli(label);
    return qmat::kron(qmat::kron(qmat::kron(p, p), p), p);
}

double correlator_sum_fourfold(const DensityMatrix& rho)
{
    if (rho.n_qubits() != 4)
        throw std::invalid_argument("witness: state must have 4 qubits");
    double sum = 0.0;
    for (PauliLabel p : {PauliLabel::X, PauliLabel::Y, PauliLabel::Z})
        sum += (pauli_fourfold(p) * rho.matrix()).trace().real();
    return sum;
}

} // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma)
{
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("fidelity: dimension mismatch");
    CMatrix sqrt_rho = qmat::psd_sqrt(rho);
    CMatrix inner = sqrt_rho * sigma.matrix() * sqrt_rho;
    qmat::HermEig eig = qmat::herm_eig(0.5 * (inner + inner.adjoint().eval()));
    // eigenvalues at the roundoff floor are exact zeros of the rank-deficient
    // product; sqrt would otherwise amplify them to ~1e-8 apiece
    double lam_max = std::max(eig.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
    double floor = 16.0 * std::numeric_limits<double>::epsilon() * lam_max;
    double f = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
        double lam = eig.eigenvalues(i);
        if (lam < -1e-9)
            throw std::runtime_error("fidelity: inner matrix not PSD");
        f += lam > floor ? std::sqrt(lam) : 0.0;
    }
    if (f > 1.0 + 1e-6)
        throw std::runtime_error("fidelity: value exceeds 1 beyond roundoff");
    return std::clamp(f, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma)
{
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    qmat::HermEig eig = qmat::herm_eig(rho.matrix() - sigma.matrix());
    return 0.5 * eig.eigenvalues.cwiseAbs().sum();
}

double witness_plus(const DensityMatrix& rho)
{
    return 1.0 + correlator_sum_fourfold(rho);
}

double witness_minus(const DensityMatrix& rho)
{
    return 1.0 - correlator_sum_fourfold(rho);
}

PptReport ppt_spectrum(const DensityMatrix& rho, const QubitPartition& partition)
{
    if (partition.n_qubits() != rho.n_qubits())
        throw std::invalid_argument("ppt_spectrum: partition does not match state");
    CMatrix pt = qmat::partial_transpose(rho, partition.group_b);
    qmat::HermEig eig = qmat::herm_eig(pt);

    PptReport report{partition, {}, 0.0};
    report.eigenvalues.reserve(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
        double lam = eig.eigenvalues(i);
        report.eigenvalues.push_back(lam);
        if (lam < 0.0)
            report.negativity += -lam;
    }
    return report;
}

double correlation(const DensityMatrix& rho2, const BlochVector& a, const BlochVector& b)
{
    if (rho2.n_qubits() != 2)
        throw std::invalid_argument("correlation: state must have 2 qubits");
    CMatrix op = qmat::kron(bloch_operator(a), bloch_operator(b));
    double c = (op * rho2.matrix()).trace().real();
    return std::clamp(c, -1.0, 1.0);
}

double chsh_value(const DensityMatrix& rho2, const ChshSetting& s)
{
    return correlation(rho2, s.a, s.b) + correlation(rho2, s.a_prime, s.b) +
           correlation(rho2, s.a, s.b_prime) - correlation(rho2, s.a_prime, s.b_prime);
}

ChshOptimum chsh_optimal(const DensityMatrix& rho2)
{
    if (rho2.n_qubits() != 2)
        throw std::invalid_argument("chsh_optimal: state must have 2 qubits");

    const PauliLabel labels[3] = {PauliLabel::X, PauliLabel::Y, PauliLabel::Z};
    Eigen::Matrix3d t;
    for (int mu = 0; mu < 3; ++mu)
        for (int nu = 0; nu < 3; ++nu)
            t(mu, nu) =
                (qmat::kron(pauli(labels[mu]), pauli(labels[nu])) * rho2.matrix()).trace().real();

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
    double s1 = svd.singularValues()(0);
    double s2 = svd.singularValues()(1);
    double norm = std::sqrt(s1 * s1 + s2 * s2);

    // b + b' = 2 cos(phi) v1 and b - b' = 2 sin(phi) v2; the optimum sits at
    // tan(phi) = s2/s1. Degenerate T (norm ~ 0) leaves the choice free.
    double cos_phi = norm > 1e-14 ? s1 / norm : std::numbers::sqrt2 / 2.0;
    double sin_phi = norm > 1e-14 ? s2 / norm : std::numbers::sqrt2 / 2.0;

    Eigen::Vector3d u1 = svd.matrixU().col(0);
    Eigen::Vector3d u2 = svd.matrixU().col(1);
    Eigen::Vector3d v1 = svd.matrixV().col(0);
    Eigen::Vector3d v2 = svd.matrixV().col(1);
    Eigen::Vector3d b = cos_phi * v1 + sin_phi * v2;
    Eigen::Vector3d bp = cos_phi * v1 - sin_phi * v2;

    ChshOptimum opt;
    opt.value = 2.0 * std::sqrt(s1 * s1 + s2 * s2);
    opt.setting.a = {u1.x(), u1.y(), u1.z()};
    opt.setting.a_prime = {u2.x(), u2.y(), u2.z()};
    opt.setting.b = {b.x(), b.y(), b.z()};
    opt.setting.b_prime = {bp.x(), bp.y(), bp.z()};
    return opt;
}

KeyCorrelationReport key_correlation_report(const DensityMatrix& rho4)
{
    if (rho4.n_qubits() != 4)
        throw std::invalid_argument("key_correlation_report: state must have 4 qubits");
    DensityMatrix key_pair = qmat::partial_trace(rho4, {0, 1});

    const qmat::CVector k0 = states::key_basis_state(0).amplitudes();
    const qmat::CVector k1 = states::key_basis_state(1).amplitudes();
    auto prob = [&](const qmat::CVector& u, const qmat::CVector& v) {
        qmat::CVector ket = qmat::kron(u, v);
        return (ket.adjoint() * key_pair.matrix() * ket)(0, 0).real();
    };

    KeyCorrelationReport report;
    report.p00 = prob(k0, k0);
    report.p11 = prob(k1, k1);
    report.p01 = prob(k0, k1);
    report.p10 = prob(k1, k0);
    qmat::CVector ket00 = qmat::kron(k0, k0);
    qmat::CVector ket11 = qmat::kron(k1, k1);
    report.off_diag_magnitude = std::abs((ket00.adjoint() * key_pair.matrix() * ket11)(0, 0));
    return report;
}

ChshSetting reference_key_chsh_setting()
{
    const double s5 = std::sqrt(5.0);
    ChshSetting s;
    s.a = {0.0, 1.0, 0.0};
    s.a_prime = {0.0, 0.0, 1.0};
    s.b = {0.0, 2.0 / s5, -1.0 / s5};
    s.b_prime = {0.0, 2.0 / s5, 1.0 / s5};
    return s;
}

std::vector<QubitPartition> pair_pair_partitions()
{
    return {
        QubitPartition({0, 1}, {2, 3}), // AB : A'B'
        QubitPartition({0, 3}, {1, 2}), // AB' : A'B
        QubitPartition({0, 2}, {1, 3}), // AA' : BB'
    };
}

} // namespace entsim::analysis
