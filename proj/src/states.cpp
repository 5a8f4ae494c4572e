#include "entsim/states.hpp"

#include "entsim/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace entsim::states {

namespace {

using qmat::Complex;

constexpr Complex kI{0.0, 1.0};

CMatrix rotation(double theta)
{
    CMatrix r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

double normalize_angle(double angle)
{
    if (!std::isfinite(angle))
        throw std::invalid_argument("WavePlate: angle must be finite");
    double a = std::fmod(angle, std::numbers::pi);
    if (a < 0.0)
        a += std::numbers::pi;
    return a;
}

CMatrix bell_pair_projector(BellKind kind)
{
    CVector v = bell_state(kind).amplitudes();
    return v * v.adjoint();
}

NoiseTerm pauli_term(double weight, PauliLabel b, PauliLabel bprime, bool shared_plates)
{
    NoiseTerm term;
    term.weight = weight;
    term.op_b = pauli(b);
    term.op_bprime = pauli(bprime);
    term.pauli_b = b;
    term.pauli_bprime = bprime;
    term.shared_plates = shared_plates;
    term.plates_b = shared_plates || b == PauliLabel::I || b == PauliLabel::Y
                        ? pauli_plate_setting(b)
                        : pauli_half_wave_setting(b);
    term.plates_bprime = pauli_plate_setting(bprime);
    return term;
}

} // namespace

WavePlate::WavePlate(Retardance r, double angle)
    : retardance(r), fast_axis_angle(normalize_angle(angle))
{
}

NoiseSchedule::NoiseSchedule(std::vector<NoiseTerm> terms) : terms_(std::move(terms))
{
    if (terms_.empty())
        throw std::invalid_argument("NoiseSchedule: needs at least one term");
    double total = 0.0;
    for (const NoiseTerm& t : terms_) {
        if (!(t.weight > 0.0))
            throw std::invalid_argument("NoiseSchedule: weights must be positive");
        total += t.weight;
        for (const CMatrix* op : {&t.op_b, &t.op_bprime}) {
            if (op->rows() != 2 || op->cols() != 2)
                throw std::invalid_argument("NoiseSchedule: ops must be 2x2");
            if (qmat::max_abs(*op * op->adjoint() - CMatrix::Identity(2, 2)) > 1e-10)
                throw std::invalid_argument("NoiseSchedule: ops must be unitary");
        }
        if (t.shared_plates && t.plates_b.size() != t.plates_bprime.size())
            throw std::invalid_argument("NoiseSchedule: shared plates must match");
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("NoiseSchedule: weights must sum to 1");
}

CMatrix pauli(PauliLabel label)
{
    CMatrix m(2, 2);
    switch (label) {
    case PauliLabel::I:
        m << 1, 0, 0, 1;
        break;
    case PauliLabel::X:
        m << 0, 1, 1, 0;
        break;
    case PauliLabel::Y:
        m << 0, -kI, kI, 0;
        break;
    case PauliLabel::Z:
        m << 1, 0, 0, -1;
        break;
    }
    return m;
}

PureState bell_state(BellKind kind)
{
    const double s = 1.0 / std::sqrt(2.0);
    CVector v = CVector::Zero(4);
    switch (kind) {
    case BellKind::PhiPlus: // (|HH> + |VV>)/sqrt(2)
        v(0) = s;
        v(3) = s;
        break;
    case BellKind::PhiMinus:
        v(0) = s;
        v(3) = -s;
        break;
    case BellKind::PsiPlus: // (|HV> + |VH>)/sqrt(2)
        v(1) = s;
        v(2) = s;
        break;
    case BellKind::PsiMinus:
        v(1) = s;
        v(2) = -s;
        break;
    }
    return PureState(2, std::move(v));
}

PureState key_basis_state(int v)
{
    if (v != 0 && v != 1)
        throw std::invalid_argument("key_basis_state: v must be 0 or 1");
    const double s = 1.0 / std::sqrt(2.0);
    CVector amps(2);
    amps(0) = s;
    amps(1) = (v == 0 ? kI : -kI) * s;
    return PureState(1, std::move(amps));
}

DensityMatrix smolin_state()
{
    CMatrix sum = CMatrix::Zero(16, 16);
    for (BellKind kind :
         {BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus}) {
        CMatrix proj = bell_pair_projector(kind);
        sum += qmat::kron(proj, proj);
    }
    return DensityMatrix(4, 0.25 * sum);
}

DensityMatrix private_state()
{
    CMatrix sum = CMatrix::Zero(16, 16);
    sum += qmat::kron(bell_pair_projector(BellKind::PhiMinus),
                      bell_pair_projector(BellKind::PsiMinus));
    sum += qmat::kron(bell_pair_projector(BellKind::PsiPlus),
                      bell_pair_projector(BellKind::PhiPlus));
    sum += qmat::kron(bell_pair_projector(BellKind::PsiPlus),
                      bell_pair_projector(BellKind::PsiPlus));
    sum += qmat::kron(bell_pair_projector(BellKind::PsiPlus),
                      bell_pair_projector(BellKind::PhiMinus));
    return DensityMatrix(4, 0.25 * sum);
}

CMatrix waveplate_unitary(const WavePlate& p)
{
    const double t = p.fast_axis_angle;
    if (p.retardance == Retardance::Half) {
        CMatrix m(2, 2);
        m << std::cos(2 * t), std::sin(2 * t), std::sin(2 * t), -std::cos(2 * t);
        return m;
    }
    CMatrix quarter(2, 2);
    quarter << 1, 0, 0, kI;
    return rotation(t) * quarter * rotation(-t);
}

CMatrix compose_plates(const std::vector<WavePlate>& plates)
{
    if (plates.empty())
        throw std::invalid_argument("compose_plates: empty plate list");
    CMatrix out = CMatrix::Identity(2, 2);
    for (const WavePlate& p : plates)
        out = waveplate_unitary(p) * out;
    return out;
}

bool equal_up_to_phase(const CMatrix& u, const CMatrix& v, double tol)
{
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw std::invalid_argument("equal_up_to_phase: dimension mismatch");
    Complex overlap = (v.adjoint() * u).trace();
    if (std::abs(overlap) < 1e-300) {
        // orthogonal in Frobenius inner product; no phase can align them
        return qmat::max_abs(u) <= tol && qmat::max_abs(v) <= tol;
    }
    Complex phase = overlap / std::abs(overlap);
    return qmat::max_abs(u - phase * v) <= tol;
}

std::vector<WavePlate> pauli_plate_setting(PauliLabel label)
{
    using std::numbers::pi;
    const double q = pi / 4;
    const double h = pi / 2;
    // [QWP, QWP, HWP]; perpendicular quarter-wave pair = identity,
    // parallel pair at 0 = sigma_z, and HWP(0)/HWP(pi/4) = sigma_z/sigma_x.
    switch (label) {
    case PauliLabel::I:
        return {WavePlate(Retardance::Quarter, 0.0), WavePlate(Retardance::Quarter, 0.0),
                WavePlate(Retardance::Half, 0.0)};
    case PauliLabel::X:
        return {WavePlate(Retardance::Quarter, 0.0), WavePlate(Retardance::Quarter, h),
                WavePlate(Retardance::Half, q)};
    case PauliLabel::Y:
        return {WavePlate(Retardance::Quarter, 0.0), WavePlate(Retardance::Quarter, 0.0),
                WavePlate(Retardance::Half, q)};
    case PauliLabel::Z:
        return {WavePlate(Retardance::Quarter, 0.0), WavePlate(Retardance::Quarter, h),
                WavePlate(Retardance::Half, 0.0)};
    }
    throw std::invalid_argument("pauli_plate_setting: bad label");
}

std::vector<WavePlate> pauli_half_wave_setting(PauliLabel label)
{
    using std::numbers::pi;
    switch (label) {
    case PauliLabel::X:
        return {WavePlate(Retardance::Half, pi / 4)};
    case PauliLabel::Z:
        return {WavePlate(Retardance::Half, 0.0)};
    default:
        throw std::invalid_argument("pauli_half_wave_setting: only X and Z");
    }
}

NoiseSchedule smolin_schedule()
{
    std::vector<NoiseTerm> terms;
    for (PauliLabel p : {PauliLabel::I, PauliLabel::X, PauliLabel::Y, PauliLabel::Z})
        terms.push_back(pauli_term(0.25, p, p, /*shared_plates=*/true));
    return NoiseSchedule(std::move(terms));
}

NoiseSchedule private_schedule()
{
    std::vector<NoiseTerm> terms;
    terms.push_back(pauli_term(0.25, PauliLabel::Z, PauliLabel::Y, false));
    terms.push_back(pauli_term(0.25, PauliLabel::X, PauliLabel::I, false));
    terms.push_back(pauli_term(0.25, PauliLabel::X, PauliLabel::X, false));
    terms.push_back(pauli_term(0.25, PauliLabel::X, PauliLabel::Z, false));
    return NoiseSchedule(std::move(terms));
}

DensityMatrix apply_schedule(const DensityMatrix& rho, const NoiseSchedule& schedule,
                             double misalign_sigma, std::uint64_t rng_seed)
{
    if (rho.n_qubits() != 4)
        throw std::invalid_argument("apply_schedule: state must have 4 qubits");
    if (!(misalign_sigma >= 0.0))
        throw std::invalid_argument("apply_schedule: sigma must be >= 0");

    rng::Engine eng = rng::make_engine(rng_seed);
    const CMatrix id2 = CMatrix::Identity(2, 2);

    auto perturbed = [&](const std::vector<WavePlate>& plates,
                         const std::vector<double>& deltas) {
        std::vector<WavePlate> out;
        out.reserve(plates.size());
        for (std::size_t i = 0; i < plates.size(); ++i)
            out.emplace_back(plates[i].retardance, plates[i].fast_axis_angle + deltas[i]);
        return compose_plates(out);
    };

    CMatrix sum = CMatrix::Zero(16, 16);
    for (const NoiseTerm& term : schedule.terms()) {
        CMatrix u_b;
        CMatrix u_bprime;
        if (misalign_sigma == 0.0) {
            u_b = term.op_b;
            u_bprime = term.op_bprime;
        } else {
            if (term.plates_b.empty() || term.plates_bprime.empty())
                throw std::invalid_argument(
                    "apply_schedule: term lacks a plate realization for misaligned use");
            std::vector<double> d_b(term.plates_b.size());
            for (double& d : d_b)
                d = misalign_sigma * rng::gaussian(eng);
            std::vector<double> d_bp = d_b;
            if (!term.shared_plates) {
                d_bp.resize(term.plates_bprime.size());
                for (double& d : d_bp)
                    d = misalign_sigma * rng::gaussian(eng);
            }
            u_b = perturbed(term.plates_b, d_b);
            u_bprime = perturbed(term.plates_bprime, d_bp);
        }
        CMatrix full = qmat::kron(qmat::kron(qmat::kron(id2, u_b), id2), u_bprime);
        sum += term.weight * (full * rho.matrix() * full.adjoint());
    }
    CMatrix herm = 0.5 * (sum + sum.adjoint().eval());
    return DensityMatrix(4, std::move(herm));
}

} // namespace entsim::states
