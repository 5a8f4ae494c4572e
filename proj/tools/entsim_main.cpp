// entsim: synthesize noisy four-photon polarization states, simulate
// coincidence-count tomography, reconstruct by maximum likelihood, and
// analyze entanglement, privacy and nonlocality figures.
// Exit codes: 0 success, 2 input/usage error, 3 numerical failure.

#include "entsim/analysis.hpp"
#include "entsim/hom.hpp"
#include "entsim/json_io.hpp"
#include "entsim/qmat.hpp"
#include "entsim/random.hpp"
#include "entsim/states.hpp"
#include "entsim/tomography.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace entsim;
using io::json;
using qmat::CMatrix;
using qmat::DensityMatrix;

namespace {

#ifndef ENTSIM_VERSION
#define ENTSIM_VERSION "0.1.0"
#endif
constexpr const char* kVersion = ENTSIM_VERSION;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct ManifestInfo {
    std::string command;
    json args = json::object();
    std::optional<json> config;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::uint64_t rng_seed = 0;
};

void write_manifest(const fs::path& primary_output, const ManifestInfo& info)
{
    json m{{"command", info.command}, {"args", info.args},
           {"inputs", info.inputs},   {"outputs", info.outputs},
           {"tool_version", kVersion}, {"rng_seed", info.rng_seed}};
    if (info.config)
        m["config"] = *info.config;
    io::write_json_file(primary_output.string() + ".manifest.json", m);
}

DensityMatrix load_state(const std::string& path)
{
    return io::density_matrix_from_json(io::read_json_file(path));
}

json bloch_to_json(const analysis::BlochVector& v)
{
    return json::array({v.x, v.y, v.z});
}

json setting_to_json(const analysis::ChshSetting& s)
{
    return json{{"a", bloch_to_json(s.a)},
                {"a_prime", bloch_to_json(s.a_prime)},
                {"b", bloch_to_json(s.b)},
                {"b_prime", bloch_to_json(s.b_prime)}};
}

json partition_to_json(const qmat::QubitPartition& p)
{
    return json{{"group_a", p.group_a}, {"group_b", p.group_b}};
}

struct SimArgs {
    double rate_hz = 2.0;
    double pair_rate_hz = 1.0e4;
    double duration_s = 3600.0;
    std::string mode = "pulsed";
    bool dead_time = false;
    std::uint64_t seed = 0;

    tomo::ExperimentConfig to_config() const
    {
        tomo::ExperimentConfig cfg;
        cfg.fourfold_rate_hz = rate_hz;
        cfg.pair_rate_hz = pair_rate_hz;
        cfg.duration_per_setting_s = duration_s;
        cfg.collection_mode =
            mode == "fast" ? tomo::CollectionMode::Fast : tomo::CollectionMode::Pulsed;
        cfg.rotation_dead_time = dead_time;
        cfg.rng_seed = seed;
        return cfg;
    }
};

void add_sim_options(CLI::App* cmd, SimArgs& args)
{
    cmd->add_option("--rate-hz", args.rate_hz, "Mean four-fold coincidence rate (pulsed mode)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--pair-rate-hz", args.pair_rate_hz,
                    "Two-fold pair rate; fast mode collects at half this rate")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--duration-s", args.duration_s, "Counting time per setting, seconds")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--mode", args.mode, "Collection mode: pulsed or fast")
        ->check(CLI::IsMember({"pulsed", "fast"}));
    cmd->add_flag("--dead-time", args.dead_time,
                  "Model the counting hold while noise plates rotate (10 s per 30 s interval)");
}

// ---------------------------------------------------------------- synth ---

int run_synth(const std::string& state_name, const std::string& schedule_file,
              double misalign_sigma, std::uint64_t seed, const std::string& out)
{
    qmat::CVector phi = states::bell_state(states::BellKind::PhiPlus).amplitudes();
    qmat::CVector both = qmat::kron(phi, phi);
    DensityMatrix input(4, CMatrix(both * both.adjoint()));

    std::optional<DensityMatrix> rho;
    std::vector<std::string> inputs;
    if (state_name == "smolin") {
        rho = misalign_sigma > 0.0
                  ? states::apply_schedule(input, states::smolin_schedule(), misalign_sigma, seed)
                  : states::smolin_state();
    } else if (state_name == "private") {
        rho = misalign_sigma > 0.0
                  ? states::apply_schedule(input, states::private_schedule(), misalign_sigma, seed)
                  : states::private_state();
    } else if (state_name.rfind("bell:", 0) == 0) {
        std::string kind = state_name.substr(5);
        states::BellKind bk;
        if (kind == "phi_plus")
            bk = states::BellKind::PhiPlus;
        else if (kind == "phi_minus")
            bk = states::BellKind::PhiMinus;
        else if (kind == "psi_plus")
            bk = states::BellKind::PsiPlus;
        else if (kind == "psi_minus")
            bk = states::BellKind::PsiMinus;
        else
            throw std::invalid_argument("unknown bell state: " + kind);
        if (misalign_sigma > 0.0)
            throw std::invalid_argument("--misalign-sigma applies to schedule-built states only");
        rho = DensityMatrix::from_pure(states::bell_state(bk));
    } else if (state_name == "custom-schedule") {
        if (schedule_file.empty())
            throw std::invalid_argument("custom-schedule requires --schedule FILE");
        auto sched = io::schedule_from_json(io::read_json_file(schedule_file));
        rho = states::apply_schedule(input, sched, misalign_sigma, seed);
        inputs.push_back(schedule_file);
    } else {
        throw std::invalid_argument("unknown state name: " + state_name);
    }

    io::write_json_file(out, io::to_json(*rho));

    ManifestInfo info;
    info.command = "synth";
    info.args = {{"state", state_name}, {"misalign_sigma", misalign_sigma}};
    if (!schedule_file.empty())
        info.args["schedule"] = schedule_file;
    info.inputs = inputs;
    info.outputs = {out};
    info.rng_seed = seed;
    write_manifest(out, info);
    return kExitOk;
}

// ------------------------------------------------------------- simulate ---

int run_simulate(const std::string& state_file, const SimArgs& sim, const std::string& out,
                 const std::string& format)
{
    DensityMatrix rho = load_state(state_file);
    tomo::ExperimentConfig cfg = sim.to_config();
    tomo::TomographyDataset data = tomo::simulate_counts(rho, cfg);

    if (format == "csv")
        io::write_text_file(out, io::to_csv(data));
    else
        io::write_json_file(out, io::to_json(data));

    ManifestInfo info;
    info.command = "simulate";
    info.args = {{"state", state_file}, {"format", format}};
    info.config = io::to_json(cfg);
    info.inputs = {state_file};
    info.outputs = {out};
    info.rng_seed = cfg.rng_seed;
    write_manifest(out, info);
    return kExitOk;
}

// ---------------------------------------------------------- reconstruct ---

int run_reconstruct(const std::string& data_file, const std::string& out,
                    std::string diagnostics_file, const tomo::MleOptions& opts)
{
    tomo::TomographyDataset data = io::dataset_from_json(io::read_json_file(data_file));
    auto [rho, diag] = tomo::mle_reconstruct(data, opts);

    if (diagnostics_file.empty())
        diagnostics_file = out + ".diagnostics.json";
    io::write_json_file(out, io::to_json(rho));
    io::write_json_file(diagnostics_file, io::to_json(diag));

    ManifestInfo info;
    info.command = "reconstruct";
    info.args = {{"data", data_file},
                 {"dilution", opts.dilution},
                 {"tol", opts.tol},
                 {"max_iterations", opts.max_iterations}};
    info.inputs = {data_file};
    info.outputs = {out, diagnostics_file};
    write_manifest(out, info);

    if (!diag.converged) {
        std::fprintf(stderr,
                     "reconstruct: no convergence within %d iterations (gain tolerance %g)\n",
                     opts.max_iterations, opts.tol);
        return kExitNumeric;
    }
    return kExitOk;
}

// -------------------------------------------------------------- analyze ---

json analyze_state(const DensityMatrix& rho, const DensityMatrix& target)
{
    json report;
    report["fidelity_to_target"] = analysis::fidelity(rho, target);

    if (rho.n_qubits() == 4) {
        report["witness"] = {{"plus_form", analysis::witness_plus(rho)},
                             {"minus_form", analysis::witness_minus(rho)}};

        json ppt = json::array();
        for (const auto& part : analysis::pair_pair_partitions()) {
            auto rep = analysis::ppt_spectrum(rho, part);
            ppt.push_back(json{{"partition", partition_to_json(rep.partition)},
                               {"eigenvalues", rep.eigenvalues},
                               {"negativity", rep.negativity}});
        }
        report["ppt"] = ppt;

        DensityMatrix key_pair = qmat::partial_trace(rho, {0, 1});
        auto opt = analysis::chsh_optimal(key_pair);
        auto ref_setting = analysis::reference_key_chsh_setting();
        report["chsh"] = {
            {"optimal", {{"value", opt.value}, {"setting", setting_to_json(opt.setting)}}},
            {"reference",
             {{"value", analysis::chsh_value(key_pair, ref_setting)},
              {"setting", setting_to_json(ref_setting)}}}};

        auto kc = analysis::key_correlation_report(rho);
        report["key_correlations"] = {{"p00", kc.p00},
                                      {"p11", kc.p11},
                                      {"p01", kc.p01},
                                      {"p10", kc.p10},
                                      {"off_diag_magnitude", kc.off_diag_magnitude}};
    } else if (rho.n_qubits() == 2) {
        auto opt = analysis::chsh_optimal(rho);
        auto ref_setting = analysis::reference_key_chsh_setting();
        report["chsh"] = {
            {"optimal", {{"value", opt.value}, {"setting", setting_to_json(opt.setting)}}},
            {"reference",
             {{"value", analysis::chsh_value(rho, ref_setting)},
              {"setting", setting_to_json(ref_setting)}}}};
        auto rep = analysis::ppt_spectrum(rho, qmat::QubitPartition({0}, {1}));
        report["ppt"] = json::array({json{{"partition", partition_to_json(rep.partition)},
                                          {"eigenvalues", rep.eigenvalues},
                                          {"negativity", rep.negativity}}});
    }
    return report;
}

double vector_std(const std::vector<double>& xs)
{
    if (xs.size() < 2)
        return 0.0;
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= static_cast<double>(xs.size());
    double m2 = 0.0;
    for (double x : xs)
        m2 += (x - mean) * (x - mean);
    return std::sqrt(m2 / static_cast<double>(xs.size() - 1));
}

std::string report_to_csv(const json& j, const std::string& prefix = "")
{
    std::string out;
    if (prefix.empty())
        out = "key,value\n";
    for (const auto& [key, value] : j.items()) {
        std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            out += report_to_csv(value, name);
        } else if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                if (value[i].is_object())
                    out += report_to_csv(value[i], name + "[" + std::to_string(i) + "]");
                else
                    out += name + "[" + std::to_string(i) + "]," + value[i].dump() + "\n";
            }
        } else {
            out += name + "," + value.dump() + "\n";
        }
    }
    return out;
}

int run_analyze(const std::string& state_file, const std::string& target_name, int bootstrap_n,
                const SimArgs& sim, const std::string& out, const std::string& format)
{
    DensityMatrix rho = load_state(state_file);

    std::optional<DensityMatrix> target;
    std::vector<std::string> inputs = {state_file};
    if (target_name == "smolin")
        target = states::smolin_state();
    else if (target_name == "private")
        target = states::private_state();
    else if (target_name.rfind("file:", 0) == 0) {
        std::string path = target_name.substr(5);
        target = load_state(path);
        inputs.push_back(path);
    } else {
        throw std::invalid_argument("unknown target: " + target_name);
    }
    if (target->dim() != rho.dim())
        throw std::invalid_argument("state and target dimensions differ");

    json report = analyze_state(rho, *target);

    tomo::ExperimentConfig cfg = sim.to_config();
    if (bootstrap_n > 0) {
        auto ensemble = tomo::bootstrap_ensemble(rho, cfg, bootstrap_n);
        std::vector<double> fid, wplus, wminus, chsh_opt, chsh_ref;
        auto parts = analysis::pair_pair_partitions();
        std::vector<std::vector<double>> negs(parts.size());
        auto ref_setting = analysis::reference_key_chsh_setting();
        for (const auto& rep : ensemble) {
            fid.push_back(analysis::fidelity(rep, *target));
            if (rep.n_qubits() == 4) {
                wplus.push_back(analysis::witness_plus(rep));
                wminus.push_back(analysis::witness_minus(rep));
                DensityMatrix key_pair = qmat::partial_trace(rep, {0, 1});
                chsh_opt.push_back(analysis::chsh_optimal(key_pair).value);
                chsh_ref.push_back(analysis::chsh_value(key_pair, ref_setting));
                for (std::size_t i = 0; i < parts.size(); ++i)
                    negs[i].push_back(analysis::ppt_spectrum(rep, parts[i]).negativity);
            }
        }
        json bstd{{"n_replicates", bootstrap_n}, {"fidelity_to_target", vector_std(fid)}};
        if (!wplus.empty()) {
            bstd["witness_plus"] = vector_std(wplus);
            bstd["witness_minus"] = vector_std(wminus);
            bstd["chsh_optimal_value"] = vector_std(chsh_opt);
            bstd["chsh_reference_value"] = vector_std(chsh_ref);
            json neg_stds = json::array();
            for (const auto& series : negs)
                neg_stds.push_back(vector_std(series));
            bstd["negativity"] = neg_stds;
        }
        report["bootstrap_std"] = bstd;
    }

    if (format == "csv")
        io::write_text_file(out, report_to_csv(report));
    else
        io::write_json_file(out, report);

    ManifestInfo info;
    info.command = "analyze";
    info.args = {{"state", state_file},
                 {"target", target_name},
                 {"bootstrap", bootstrap_n},
                 {"format", format}};
    info.config = io::to_json(cfg);
    info.inputs = inputs;
    info.outputs = {out};
    info.rng_seed = cfg.rng_seed;
    write_manifest(out, info);
    return kExitOk;
}

// --------------------------------------------------------------- homfit ---

int run_homfit(const std::string& curve_file, const std::string& out, std::string model_out)
{
    hom::HomCurve curve = io::hom_curve_from_csv(io::read_text_file(curve_file));
    hom::HomFit fit = hom::fit_gaussian_dip(curve);

    if (model_out.empty())
        model_out = out + ".model.csv";
    io::write_json_file(out, io::to_json(fit));

    std::string model_csv = "delay,model\n";
    for (double d : curve.delays) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", d, hom::hom_model(fit, d));
        model_csv += buf;
    }
    io::write_text_file(model_out, model_csv);

    ManifestInfo info;
    info.command = "homfit";
    info.args = {{"curve", curve_file}};
    info.inputs = {curve_file};
    info.outputs = {out, model_out};
    write_manifest(out, info);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Noisy photonic entanglement simulator and analysis toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "Synthesize an ideal or noise-degraded state");
    std::string synth_state;
    std::string synth_schedule;
    double synth_sigma = 0.0;
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    synth->add_option("state", synth_state, "smolin | private | bell:<kind> | custom-schedule")
        ->required();
    synth->add_option("--schedule", synth_schedule, "Noise schedule JSON for custom-schedule");
    synth->add_option("--misalign-sigma", synth_sigma,
                      "Gaussian std of wave-plate angle errors, radians")
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", synth_seed, "RNG seed for the misalignment draws");
    synth->add_option("--out", synth_out, "Output density-matrix JSON")->required();

    auto* simulate = app.add_subcommand("simulate", "Simulate coincidence-count tomography");
    std::string sim_state;
    SimArgs sim_args;
    std::string sim_out;
    std::string sim_format = "json";
    simulate->add_option("--state", sim_state, "Input density-matrix JSON")->required();
    add_sim_options(simulate, sim_args);
    simulate->add_option("--seed", sim_args.seed, "RNG seed for the Poisson draws");
    simulate->add_option("--out", sim_out, "Output dataset file")->required();
    simulate->add_option("--format", sim_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* reconstruct =
        app.add_subcommand("reconstruct", "Maximum-likelihood state reconstruction");
    std::string rec_data;
    std::string rec_out;
    std::string rec_diag;
    tomo::MleOptions rec_opts;
    reconstruct->add_option("--data", rec_data, "Tomography dataset JSON")->required();
    reconstruct->add_option("--out", rec_out, "Output density-matrix JSON")->required();
    reconstruct->add_option("--diagnostics", rec_diag,
                            "Diagnostics JSON path (default: <out>.diagnostics.json)");
    reconstruct->add_option("--dilution", rec_opts.dilution, "Fixed-point dilution in (0,1]")
        ->check(CLI::Range(1e-6, 1.0));
    reconstruct->add_option("--max-iterations", rec_opts.max_iterations)
        ->check(CLI::PositiveNumber);
    reconstruct->add_option("--tol", rec_opts.tol, "Log-likelihood gain threshold")
        ->check(CLI::PositiveNumber);

    auto* analyze = app.add_subcommand("analyze", "Entanglement/privacy/nonlocality report");
    std::string an_state;
    std::string an_target = "smolin";
    int an_bootstrap = 0;
    SimArgs an_sim;
    std::string an_out;
    std::string an_format = "json";
    analyze->add_option("--state", an_state, "Input density-matrix JSON")->required();
    analyze->add_option("--target", an_target, "smolin | private | file:<path>");
    analyze->add_option("--bootstrap", an_bootstrap,
                        "Number of parametric bootstrap replicates (0 = off)")
        ->check(CLI::NonNegativeNumber);
    add_sim_options(analyze, an_sim);
    analyze->add_option("--seed", an_sim.seed, "Master seed for bootstrap replicates");
    analyze->add_option("--out", an_out, "Output report file")->required();
    analyze->add_option("--format", an_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* homfit = app.add_subcommand("homfit", "Fit a Gaussian dip to a delay-scan CSV");
    std::string hf_curve;
    std::string hf_out;
    std::string hf_model;
    homfit->add_option("--curve", hf_curve, "Input CSV: delay,counts[,error]")->required();
    homfit->add_option("--out", hf_out, "Output fit-report JSON")->required();
    homfit->add_option("--model-out", hf_model,
                       "Fitted-model CSV path (default: <out>.model.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed())
            return run_synth(synth_state, synth_schedule, synth_sigma, synth_seed, synth_out);
        if (simulate->parsed())
            return run_simulate(sim_state, sim_args, sim_out, sim_format);
        if (reconstruct->parsed())
            return run_reconstruct(rec_data, rec_out, rec_diag, rec_opts);
        if (analyze->parsed())
            return run_analyze(an_state, an_target, an_bootstrap, an_sim, an_out, an_format);
        if (homfit->parsed())
            return run_homfit(hf_curve, hf_out, hf_model);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "entsim: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "entsim: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitUsage;
}
