#include "entsim/tomography.hpp"

#include "entsim/analysis.hpp"
#include "entsim/states.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

using namespace entsim;
using test_helpers::max_diff;
using qmat::CMatrix;
using qmat::CVector;
using qmat::DensityMatrix;
using tomo::Basis;
using tomo::MeasurementSetting;

namespace {

tomo::ExperimentConfig hour_run_config(std::uint64_t seed)
{
    tomo::ExperimentConfig cfg;
    cfg.fourfold_rate_hz = 2.0;
    cfg.duration_per_setting_s = 3600.0;
    cfg.rng_seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("setting enumeration and parsing")
{
    auto settings = tomo::all_settings(4);
    CHECK(settings.size() == 81);
    CHECK(tomo::to_string(settings.front()) == "XXXX");
    CHECK(tomo::to_string(settings.back()) == "ZZZZ");

    std::set<std::string> unique;
    for (const auto& s : settings)
        unique.insert(tomo::to_string(s));
    CHECK(unique.size() == 81);

    CHECK(tomo::to_string(tomo::parse_setting("XYZY")) == "XYZY");
    CHECK_THROWS_AS(tomo::parse_setting("XQ"), std::invalid_argument);
}

TEST_CASE("setting projectors")
{
    SUBCASE("single-qubit Z basis")
    {
        auto projs = tomo::setting_projectors(MeasurementSetting{{Basis::Z}});
        REQUIRE(projs.size() == 2);
        CMatrix h = CMatrix::Zero(2, 2);
        h(0, 0) = 1.0;
        CMatrix v = CMatrix::Zero(2, 2);
        v(1, 1) = 1.0;
        CHECK(max_diff(projs[0], h) < 1e-15);
        CHECK(max_diff(projs[1], v) < 1e-15);
    }

    SUBCASE("single-qubit Y basis projects onto the key states")
    {
        auto projs = tomo::setting_projectors(MeasurementSetting{{Basis::Y}});
        CVector k0 = states::key_basis_state(0).amplitudes();
        CVector k1 = states::key_basis_state(1).amplitudes();
        CHECK(max_diff(projs[0], k0 * k0.adjoint()) < 1e-15);
        CHECK(max_diff(projs[1], k1 * k1.adjoint()) < 1e-15);
    }

    SUBCASE("completeness and rank on multi-qubit settings")
    {
        for (const char* name : {"XZ", "YYY", "XYZY"}) {
            auto setting = tomo::parse_setting(name);
            auto projs = tomo::setting_projectors(setting);
            int dim = 1 << setting.n_qubits();
            REQUIRE(static_cast<int>(projs.size()) == dim);
            CMatrix sum = CMatrix::Zero(dim, dim);
            for (const auto& p : projs) {
                sum += p;
                CHECK(max_diff(p * p, p) < 1e-12); // projector
                CHECK(std::abs(p.trace().real() - 1.0) < 1e-12); // rank 1
            }
            CHECK(max_diff(sum, CMatrix::Identity(dim, dim)) < 1e-12);
        }
    }
}

TEST_CASE("outcome probabilities")
{
    SUBCASE("maximally mixed is uniform")
    {
        auto probs = tomo::outcome_probs(DensityMatrix::maximally_mixed(4),
                                         tomo::parse_setting("XYZX"));
        for (double p : probs)
            CHECK(p == doctest::Approx(1.0 / 16).epsilon(1e-12));
    }

    SUBCASE("private state key setting is perfectly correlated on qubits A and B")
    {
        auto probs = tomo::outcome_probs(states::private_state(), tomo::parse_setting("YYZZ"));
        double same = 0.0;
        for (int o = 0; o < 16; ++o) {
            int bit_a = (o >> 3) & 1;
            int bit_b = (o >> 2) & 1;
            if (bit_a == bit_b)
                same += probs[o];
        }
        CHECK(same == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("smolin state has even x-parity with certainty")
    {
        auto probs = tomo::outcome_probs(states::smolin_state(), tomo::parse_setting("XXXX"));
        double even = 0.0;
        for (int o = 0; o < 16; ++o) {
            int parity = ((o >> 3) ^ (o >> 2) ^ (o >> 1) ^ o) & 1;
            if (parity == 0)
                even += probs[o];
        }
        CHECK(even == doctest::Approx(1.0).epsilon(1e-12));
        double total = 0.0;
        for (double p : probs)
            total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }

    SUBCASE("dimension mismatch rejected")
    {
        CHECK_THROWS_AS(tomo::outcome_probs(DensityMatrix::maximally_mixed(2),
                                            tomo::parse_setting("XYZ")),
                        std::invalid_argument);
    }
}

TEST_CASE("simulate_counts")
{
    auto smolin = states::smolin_state();

    SUBCASE("complete dataset at the documented shape")
    {
        auto data = tomo::simulate_counts(smolin, hour_run_config(7));
        CHECK(tomo::is_complete(data));
        CHECK(data.records.size() == 81);
        CHECK(data.records[0].counts.size() == 16);
    }

    SUBCASE("mean total counts per setting tracks rate x duration")
    {
        auto data = tomo::simulate_counts(smolin, hour_run_config(42));
        double total = 0.0;
        for (const auto& rec : data.records)
            for (double c : rec.counts)
                total += c;
        double per_setting = total / 81.0;
        CHECK(per_setting > 6900.0); // 7200 expected, Poisson spread ~30
        CHECK(per_setting < 7500.0);
    }

    SUBCASE("identical seeds give identical datasets")
    {
        auto a = tomo::simulate_counts(smolin, hour_run_config(5));
        auto b = tomo::simulate_counts(smolin, hour_run_config(5));
        REQUIRE(a.records.size() == b.records.size());
        for (std::size_t i = 0; i < a.records.size(); ++i)
            CHECK(a.records[i].counts == b.records[i].counts);
        auto c = tomo::simulate_counts(smolin, hour_run_config(6));
        bool any_diff = false;
        for (std::size_t i = 0; i < a.records.size(); ++i)
            if (a.records[i].counts != c.records[i].counts)
                any_diff = true;
        CHECK(any_diff);
    }

    SUBCASE("tiny duration produces empty counts")
    {
        auto cfg = hour_run_config(9);
        cfg.duration_per_setting_s = 1e-9;
        auto data = tomo::simulate_counts(smolin, cfg);
        double total = 0.0;
        for (const auto& rec : data.records)
            for (double c : rec.counts)
                total += c;
        CHECK(total == 0.0);
    }

    SUBCASE("fast mode uses half the pair rate")
    {
        auto cfg = hour_run_config(10);
        cfg.collection_mode = tomo::CollectionMode::Fast;
        cfg.pair_rate_hz = 1.0e4;
        cfg.duration_per_setting_s = 1.0;
        CHECK(tomo::effective_event_rate_hz(cfg) == doctest::Approx(5000.0));
        auto data = tomo::simulate_counts(DensityMatrix::maximally_mixed(4), cfg);
        double total = 0.0;
        for (const auto& rec : data.records)
            for (double c : rec.counts)
                total += c;
        CHECK(total / 81.0 == doctest::Approx(5000.0).epsilon(0.05));
    }

    SUBCASE("empirical frequencies approach the Born probabilities")
    {
        // one setting at ~1e6 expected events; KL divergence below 1e-3
        auto cfg = hour_run_config(11);
        cfg.fourfold_rate_hz = 1.0e6;
        cfg.duration_per_setting_s = 1.0;
        auto priv = states::private_state();
        auto data = tomo::simulate_counts(priv, cfg);
        auto setting = tomo::parse_setting("YYZZ");
        for (const auto& rec : data.records) {
            if (tomo::to_string(rec.setting) != "YYZZ")
                continue;
            auto probs = tomo::outcome_probs(priv, setting);
            double total = 0.0;
            for (double c : rec.counts)
                total += c;
            double kl = 0.0;
            for (int o = 0; o < 16; ++o) {
                double f = rec.counts[o] / total;
                if (f > 0.0 && probs[o] > 0.0)
                    kl += f * std::log(f / probs[o]);
            }
            CHECK(kl >= 0.0);
            CHECK(kl < 1e-3);
        }
    }

    SUBCASE("dead-time model shortens the effective duration")
    {
        auto cfg = hour_run_config(12);
        cfg.rotation_dead_time = true;
        CHECK(tomo::effective_duration_s(cfg) == doctest::Approx(3600.0 * 0.75));
    }
}

TEST_CASE("linear inversion")
{
    SUBCASE("exact smolin dataset reproduces the Pauli form")
    {
        auto smolin = states::smolin_state();
        auto exact = tomo::expected_dataset(smolin, hour_run_config(1));
        CMatrix li = tomo::linear_inversion(exact);
        CHECK(max_diff(li, smolin.matrix()) < 1e-10);
    }

    SUBCASE("exact maximally mixed dataset gives identity/16")
    {
        auto exact = tomo::expected_dataset(DensityMatrix::maximally_mixed(4), hour_run_config(1));
        CMatrix li = tomo::linear_inversion(exact);
        CHECK(max_diff(li, CMatrix::Identity(16, 16) / 16.0) < 1e-12);
    }

    SUBCASE("finite counts always give Hermitian unit trace")
    {
        auto data = tomo::simulate_counts(test_helpers::random_density(2, 31), hour_run_config(31));
        CMatrix li = tomo::linear_inversion(data);
        CHECK(std::abs(li.trace().real() - 1.0) < 1e-12);
        CHECK(max_diff(li, li.adjoint()) < 1e-12);
    }

    SUBCASE("incomplete dataset rejected")
    {
        auto data = tomo::simulate_counts(test_helpers::random_density(2, 32), hour_run_config(32));
        data.records.pop_back();
        CHECK_THROWS_AS(tomo::linear_inversion(data), std::invalid_argument);
    }
}

TEST_CASE("mle_reconstruct")
{
    SUBCASE("simulated smolin data reconstructs with high fidelity")
    {
        auto smolin = states::smolin_state();
        auto data = tomo::simulate_counts(smolin, hour_run_config(42));
        auto [rho, diag] = tomo::mle_reconstruct(data);
        CHECK(diag.converged);
        CHECK(analysis::fidelity(rho, smolin) > 0.99);
    }

    SUBCASE("log-likelihood trace is non-decreasing")
    {
        auto data = tomo::simulate_counts(test_helpers::random_density(2, 55), hour_run_config(55));
        auto [rho, diag] = tomo::mle_reconstruct(data);
        REQUIRE(diag.loglik_trace.size() >= 2);
        for (std::size_t i = 1; i < diag.loglik_trace.size(); ++i)
            CHECK(diag.loglik_trace[i] >= diag.loglik_trace[i - 1] - 1e-9);
    }

    SUBCASE("exact private-state data: optimum consistency")
    {
        auto priv = states::private_state();
        auto exact = tomo::expected_dataset(priv, hour_run_config(1));

        // the true state is a fixed point of the likelihood map R(rho) rho = rho
        CMatrix r = CMatrix::Zero(16, 16);
        double n_tot = 0.0;
        for (const auto& rec : exact.records) {
            auto kets = tomo::setting_eigenkets(rec.setting);
            for (std::size_t o = 0; o < kets.size(); ++o) {
                if (rec.counts[o] <= 0.0)
                    continue;
                double p = (kets[o].adjoint() * priv.matrix() * kets[o])(0, 0).real();
                r += (rec.counts[o] / p) * (kets[o] * kets[o].adjoint());
                n_tot += rec.counts[o];
            }
        }
        r /= n_tot;
        CHECK(max_diff(r * priv.matrix(), priv.matrix()) < 1e-12);

        // the diluted fixed-point iteration approaches it (boundary optimum,
        // so the approach is slow; 4e-4 is what the capped run achieves)
        auto [rho, diag] = tomo::mle_reconstruct(exact);
        CHECK(analysis::fidelity(rho, priv) > 1.0 - 4e-4);
    }

    SUBCASE("exact data from full-rank states is recovered")
    {
        for (std::uint64_t seed : {61, 63}) {
            auto truth = test_helpers::random_density(2, seed);
            auto exact = tomo::expected_dataset(truth, hour_run_config(seed));
            auto [rho, diag] = tomo::mle_reconstruct(exact);
            CHECK(diag.converged);
            CHECK(analysis::trace_distance(rho, truth) < 1e-4);
            CMatrix li = tomo::linear_inversion(exact);
            CHECK(0.5 * qmat::herm_eig(li - rho.matrix()).eigenvalues.cwiseAbs().sum() < 1e-4);
        }
    }

    SUBCASE("output satisfies the state invariants for arbitrary counts")
    {
        // pathological dataset: single outcome holds all the counts
        auto settings = tomo::all_settings(2);
        tomo::TomographyDataset d;
        d.n_qubits = 2;
        for (const auto& s : settings) {
            tomo::CountRecord rec;
            rec.setting = s;
            rec.duration_s = 1.0;
            rec.counts = {100.0, 0.0, 0.0, 0.0};
            d.records.push_back(rec);
        }
        auto [rho, diag] = tomo::mle_reconstruct(d);
        CHECK(rho.n_qubits() == 2); // construction validates the invariants
    }

    SUBCASE("degenerate all-zero dataset rejected")
    {
        auto data = tomo::expected_dataset(DensityMatrix::maximally_mixed(2), hour_run_config(1));
        for (auto& rec : data.records)
            for (double& c : rec.counts)
                c = 0.0;
        CHECK_THROWS_AS(tomo::mle_reconstruct(data), std::invalid_argument);
    }
}

TEST_CASE("bootstrap_ensemble")
{
    auto smolin = states::smolin_state();
    auto cfg = hour_run_config(1);
    cfg.fourfold_rate_hz = 0.05; // keep the unit test quick
    auto data = tomo::simulate_counts(smolin, cfg);
    auto [rho_hat, diag] = tomo::mle_reconstruct(data);

    SUBCASE("single replicate is a valid state")
    {
        auto ens = tomo::bootstrap_ensemble(rho_hat, cfg, 1);
        REQUIRE(ens.size() == 1);
        CHECK(ens[0].n_qubits() == 4);
    }

    SUBCASE("replicates are deterministic and order-stable")
    {
        auto a = tomo::bootstrap_ensemble(rho_hat, cfg, 3);
        auto b = tomo::bootstrap_ensemble(rho_hat, cfg, 3);
        REQUIRE(a.size() == 3);
        for (int i = 0; i < 3; ++i)
            CHECK(max_diff(a[i].matrix(), b[i].matrix()) == 0.0);
        // distinct replicates differ
        CHECK(max_diff(a[0].matrix(), a[1].matrix()) > 1e-8);
    }

    SUBCASE("n_rep must be positive")
    {
        CHECK_THROWS_AS(tomo::bootstrap_ensemble(rho_hat, cfg, 0), std::invalid_argument);
    }
}
