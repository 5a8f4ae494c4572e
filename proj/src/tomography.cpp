#include "entsim/tomography.hpp"

#include "entsim/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace entsim::tomo {

namespace {

using qmat::Complex;

CVector basis_eigenket(Basis b, int result_bit)
{
    const double s = 1.0 / std::sqrt(2.0);
    CVector v(2);
    switch (b) {
    case Basis::X:
        v(0) = s;
        v(1) = result_bit == 0 ? s : -s;
        break;
    case Basis::Y:
        v(0) = s;
        v(1) = Complex(0.0, result_bit == 0 ? s : -s);
        break;
    case Basis::Z:
        v(0) = result_bit == 0 ? 1.0 : 0.0;
        v(1) = result_bit == 0 ? 0.0 : 1.0;
        break;
    }
    return v;
}

void check_setting(const MeasurementSetting& s)
{
    if (s.bases.empty())
        throw std::invalid_argument("MeasurementSetting: empty");
}

double record_total(const CountRecord& r)
{
    double total = 0.0;
    for (double c : r.counts)
        total += c;
    return total;
}

} // namespace

std::string to_string(const MeasurementSetting& s)
{
    std::string out;
    out.reserve(s.bases.size());
    for (Basis b : s.bases)
        out.push_back(b == Basis::X ? 'X' : b == Basis::Y ? 'Y' : 'Z');
    return out;
}

MeasurementSetting parse_setting(const std::string& text)
{
    MeasurementSetting s;
    s.bases.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case 'X':
            s.bases.push_back(Basis::X);
            break;
        case 'Y':
            s.bases.push_back(Basis::Y);
            break;
        case 'Z':
            s.bases.push_back(Basis::Z);
            break;
        default:
            throw std::invalid_argument("parse_setting: invalid basis character");
        }
    }
    check_setting(s);
    return s;
}

std::vector<MeasurementSetting> all_settings(int n_qubits)
{
    if (n_qubits < 1)
        throw std::invalid_argument("all_settings: need at least one qubit");
    int count = 1;
    for (int i = 0; i < n_qubits; ++i)
        count *= 3;
    std::vector<MeasurementSetting> out;
    out.reserve(count);
    for (int code = 0; code < count; ++code) {
        MeasurementSetting s;
        s.bases.resize(n_qubits);
        int rest = code;
        for (int k = n_qubits - 1; k >= 0; --k) {
            s.bases[k] = static_cast<Basis>(rest % 3);
            rest /= 3;
        }
        out.push_back(std::move(s));
    }
    return out;
}

bool is_complete(const TomographyDataset& d)
{
    if (d.n_qubits < 1)
        return false;
    std::size_t expected = 1;
    for (int i = 0; i < d.n_qubits; ++i)
        expected *= 3;
    if (d.records.size() != expected)
        return false;
    std::unordered_map<std::string, int> seen;
    const std::size_t dim = std::size_t{1} << d.n_qubits;
    for (const CountRecord& r : d.records) {
        if (r.setting.n_qubits() != d.n_qubits || r.counts.size() != dim)
            return false;
        if (!(r.duration_s > 0.0))
            return false;
        for (double c : r.counts)
            if (!(c >= 0.0) || !std::isfinite(c))
                return false;
        if (++seen[to_string(r.setting)] > 1)
            return false;
    }
    return seen.size() == expected;
}

void require_complete(const TomographyDataset& d)
{
    if (!is_complete(d))
        throw std::invalid_argument("tomography dataset is incomplete or malformed");
}

double effective_event_rate_hz(const ExperimentConfig& cfg)
{
    if (!(cfg.fourfold_rate_hz > 0.0) || !(cfg.pair_rate_hz > 0.0))
        throw std::invalid_argument("ExperimentConfig: rates must be positive");
    return cfg.collection_mode == CollectionMode::Pulsed ? cfg.fourfold_rate_hz
                                                         : 0.5 * cfg.pair_rate_hz;
}

double effective_duration_s(const ExperimentConfig& cfg)
{
    if (!(cfg.duration_per_setting_s > 0.0))
        throw std::invalid_argument("ExperimentConfig: duration must be positive");
    // plates rotate for ~10 s per 30 s noise interval while counting is held
    return cfg.rotation_dead_time ? cfg.duration_per_setting_s * (30.0 / 40.0)
                                  : cfg.duration_per_setting_s;
}

std::vector<CVector> setting_eigenkets(const MeasurementSetting& s)
{
    check_setting(s);
    const int n = s.n_qubits();
    const int dim = 1 << n;
    std::vector<CVector> kets;
    kets.reserve(dim);
    for (int outcome = 0; outcome < dim; ++outcome) {
        CVector v = basis_eigenket(s.bases[0], qmat::qubit_bit(outcome, 0, n));
        for (int k = 1; k < n; ++k)
            v = qmat::kron(v, basis_eigenket(s.bases[k], qmat::qubit_bit(outcome, k, n)));
        kets.push_back(std::move(v));
    }
    return kets;
}

std::vector<CMatrix> setting_projectors(const MeasurementSetting& s)
{
    std::vector<CMatrix> out;
    for (const CVector& v : setting_eigenkets(s))
        out.push_back(v * v.adjoint());
    return out;
}

std::vector<double> outcome_probs(const DensityMatrix& rho, const MeasurementSetting& s)
{
    if (rho.n_qubits() != s.n_qubits())
        throw std::invalid_argument("outcome_probs: dimension mismatch");
    std::vector<double> probs;
    for (const CVector& v : setting_eigenkets(s)) {
        double p = (v.adjoint() * rho.matrix() * v)(0, 0).real();
        probs.push_back(std::clamp(p, 0.0, 1.0));
    }
    return probs;
}

TomographyDataset simulate_counts(const DensityMatrix& rho, const ExperimentConfig& cfg)
{
    const double mean_events = effective_event_rate_hz(cfg) * effective_duration_s(cfg);
    rng::Engine eng = rng::make_engine(cfg.rng_seed);

    TomographyDataset d;
    d.n_qubits = rho.n_qubits();
    for (const MeasurementSetting& s : all_settings(rho.n_qubits())) {
        CountRecord rec;
        rec.setting = s;
        rec.duration_s = cfg.duration_per_setting_s;
        for (double p : outcome_probs(rho, s))
            rec.counts.push_back(static_cast<double>(rng::poisson(eng, mean_events * p)));
        d.records.push_back(std::move(rec));
    }
    return d;
}

TomographyDataset expected_dataset(const DensityMatrix& rho, const ExperimentConfig& cfg)
{
    const double mean_events = effective_event_rate_hz(cfg) * effective_duration_s(cfg);

    TomographyDataset d;
    d.n_qubits = rho.n_qubits();
    for (const MeasurementSetting& s : all_settings(rho.n_qubits())) {
        CountRecord rec;
        rec.setting = s;
        rec.duration_s = cfg.duration_per_setting_s;
        for (double p : outcome_probs(rho, s))
            rec.counts.push_back(mean_events * p);
        d.records.push_back(std::move(rec));
    }
    return d;
}

CMatrix linear_inversion(const TomographyDataset& d)
{
    require_complete(d);
    const int n = d.n_qubits;
    const int dim = 1 << n;

    // pauli-string code: base-4 digits, digit k in {0:I, 1:X, 2:Y, 3:Z},
    // qubit 0 in the most significant digit
    std::unordered_map<int, std::pair<double, int>> correlators;
    for (const CountRecord& rec : d.records) {
        double total = record_total(rec);
        if (total <= 0.0)
            continue;
        for (int subset = 1; subset < dim; ++subset) {
            int code = 0;
            for (int k = 0; k < n; ++k) {
                code *= 4;
                if (qmat::qubit_bit(subset, k, n))
                    code += static_cast<int>(rec.setting.bases[k]) + 1;
            }
            double est = 0.0;
            for (int outcome = 0; outcome < static_cast<int>(rec.counts.size()); ++outcome) {
                int parity = 0;
                for (int k = 0; k < n; ++k)
                    if (qmat::qubit_bit(subset, k, n))
                        parity ^= qmat::qubit_bit(outcome, k, n);
                est += (parity ? -1.0 : 1.0) * rec.counts[outcome];
            }
            auto& acc = correlators[code];
            acc.first += est / total;
            acc.second += 1;
        }
    }

    std::array<CMatrix, 4> single = {CMatrix::Identity(2, 2), CMatrix(2, 2), CMatrix(2, 2),
                                     CMatrix(2, 2)};
    single[1] << 0, 1, 1, 0;
    single[2] << 0, Complex(0, -1), Complex(0, 1), 0;
    single[3] << 1, 0, 0, -1;

    CMatrix rho = CMatrix::Identity(dim, dim); // identity correlator is 1
    for (const auto& [code, acc] : correlators) {
        double mean = acc.first / acc.second;
        int rest = code;
        std::vector<int> digits(n);
        for (int k = n - 1; k >= 0; --k) {
            digits[k] = rest % 4;
            rest /= 4;
        }
        CMatrix op = single[digits[0]];
        for (int k = 1; k < n; ++k)
            op = qmat::kron(op, single[digits[k]]);
        rho += mean * op;
    }
    return rho / static_cast<double>(dim);
}

std::pair<DensityMatrix, MleDiagnostics> mle_reconstruct(const TomographyDataset& d,
                                                         const MleOptions& opts)
{
    require_complete(d);
    if (!(opts.dilution > 0.0) || opts.dilution > 1.0)
        throw std::invalid_argument("mle_reconstruct: dilution must be in (0, 1]");

    const int n = d.n_qubits;
    const int dim = 1 << n;
    constexpr double kProbFloor = 1e-12;

    // all measurement kets as columns of one matrix, so the per-iteration
    // probabilities and the R operator are two small matrix products
    std::size_t n_outcomes = d.records.size() * static_cast<std::size_t>(dim);
    CMatrix kets(dim, n_outcomes);
    Eigen::VectorXd counts(n_outcomes);
    std::size_t col = 0;
    double total_counts = 0.0;
    for (const CountRecord& rec : d.records) {
        std::vector<CVector> setting_kets = setting_eigenkets(rec.setting);
        for (std::size_t o = 0; o < setting_kets.size(); ++o, ++col) {
            kets.col(col) = setting_kets[o];
            counts(col) = rec.counts[o];
            total_counts += rec.counts[o];
        }
    }
    if (!(total_counts > 0.0))
        throw std::invalid_argument("mle_reconstruct: dataset has no counts");

    auto probs = [&](const CMatrix& rho) {
        CMatrix prod = rho * kets;
        Eigen::VectorXd p(n_outcomes);
        for (std::size_t i = 0; i < n_outcomes; ++i)
            p(i) = kets.col(i).dot(prod.col(i)).real();
        return p;
    };
    auto loglik = [&](const Eigen::VectorXd& p) {
        double ll = 0.0;
        for (std::size_t i = 0; i < n_outcomes; ++i)
            if (counts(i) > 0.0)
                ll += counts(i) * std::log(std::max(p(i), kProbFloor));
        return ll;
    };

    CMatrix rho = CMatrix::Identity(dim, dim) / static_cast<double>(dim);
    Eigen::VectorXd p_curr = probs(rho);
    double current_ll = loglik(p_curr);

    MleDiagnostics diag;
    diag.dilution = opts.dilution;
    if (opts.record_loglik)
        diag.loglik_trace.push_back(current_ll);

    const CMatrix identity = CMatrix::Identity(dim, dim);
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        Eigen::VectorXd ratio(n_outcomes);
        for (std::size_t i = 0; i < n_outcomes; ++i)
            ratio(i) =
                counts(i) > 0.0 ? counts(i) / std::max(p_curr(i), kProbFloor) / total_counts : 0.0;
        CMatrix r = kets * ratio.asDiagonal() * kets.adjoint();

        // a large dilution can overshoot; shrink this step until it is ascent
        double epsilon = opts.dilution;
        CMatrix next;
        Eigen::VectorXd p_next;
        double next_ll = 0.0;
        for (int shrink = 0; shrink <= 40; ++shrink) {
            CMatrix step = (1.0 - epsilon) * identity + epsilon * r;
            next = step * rho * step.adjoint();
            next /= next.trace().real();
            next = 0.5 * (next + next.adjoint().eval());
            p_next = probs(next);
            next_ll = loglik(p_next);
            if (next_ll >= current_ll - 1e-12)
                break;
            epsilon *= 0.5;
        }

        double gain = next_ll - current_ll;
        rho = std::move(next);
        p_curr = std::move(p_next);
        current_ll = next_ll;
        diag.iterations = iter + 1;
        if (opts.record_loglik)
            diag.loglik_trace.push_back(current_ll);
        if (gain >= 0.0 && gain < opts.tol) {
            diag.converged = true;
            break;
        }
    }

    return {DensityMatrix(n, std::move(rho)), std::move(diag)};
}

std::vector<DensityMatrix> bootstrap_ensemble(const DensityMatrix& rho_hat,
                                              const ExperimentConfig& cfg, int n_rep)
{
    if (n_rep < 1)
        throw std::invalid_argument("bootstrap_ensemble: n_rep must be >= 1");

    auto run_replicate = [&](int rep) {
        ExperimentConfig rep_cfg = cfg;
        rep_cfg.rng_seed = rng::derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(rep));
        TomographyDataset data = simulate_counts(rho_hat, rep_cfg);
        return mle_reconstruct(data).first;
    };

    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<DensityMatrix> out;
    out.reserve(n_rep);
    for (int base = 0; base < n_rep; base += static_cast<int>(workers)) {
        int batch = std::min<int>(workers, n_rep - base);
        std::vector<std::future<DensityMatrix>> futures;
        futures.reserve(batch);
        for (int j = 0; j < batch; ++j)
            futures.push_back(std::async(std::launch::async, run_replicate, base + j));
        for (auto& f : futures)
            out.push_back(f.get());
    }
    return out;
}

} // namespace entsim::tomo
