#include "entsim/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace entsim::io {

namespace {

using states::PauliLabel;

// counts and other integral doubles are emitted as JSON integers so real
// datasets match the published schema exactly
json number_or_integer(double x)
{
    double rounded = std::round(x);
    if (std::isfinite(x) && std::abs(x - rounded) < 1e-9 && std::abs(x) < 9.0e15)
        return static_cast<std::int64_t>(rounded);
    return x;
}

PauliLabel pauli_from_string(const std::string& s)
{
    if (s == "I")
        return PauliLabel::I;
    if (s == "X")
        return PauliLabel::X;
    if (s == "Y")
        return PauliLabel::Y;
    if (s == "Z")
        return PauliLabel::Z;
    throw std::invalid_argument("unknown Pauli label: " + s);
}

std::string pauli_to_string(PauliLabel p)
{
    switch (p) {
    case PauliLabel::I:
        return "I";
    case PauliLabel::X:
        return "X";
    case PauliLabel::Y:
        return "Y";
    case PauliLabel::Z:
        return "Z";
    }
    return "I";
}

std::vector<std::string> split_line(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep))
        out.push_back(field);
    return out;
}

std::string format_g17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

json to_json(const qmat::CMatrix& m)
{
    json re = json::array();
    json im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re.push_back(m(r, c).real());
            im.push_back(m(r, c).imag());
        }
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)},
                {"im", std::move(im)}};
}

qmat::CMatrix cmatrix_from_json(const json& j)
{
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (rows <= 0 || cols <= 0)
        throw std::invalid_argument("matrix: rows/cols must be positive");
    if (re.size() != static_cast<std::size_t>(rows * cols) || im.size() != re.size())
        throw std::invalid_argument("matrix: re/im length must equal rows*cols");
    qmat::CMatrix m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c, ++k)
            m(r, c) = qmat::Complex(re[k].get<double>(), im[k].get<double>());
    if (!qmat::all_finite(m))
        throw std::invalid_argument("matrix: non-finite entries");
    return m;
}

json to_json(const qmat::DensityMatrix& rho)
{
    return json{{"n_qubits", rho.n_qubits()}, {"matrix", to_json(rho.matrix())}};
}

qmat::DensityMatrix density_matrix_from_json(const json& j)
{
    return qmat::DensityMatrix(j.at("n_qubits").get<int>(),
                               cmatrix_from_json(j.at("matrix")));
}

json to_json(const states::NoiseSchedule& schedule)
{
    json terms = json::array();
    for (const states::NoiseTerm& t : schedule.terms()) {
        json term{{"weight", t.weight}};
        if (t.pauli_b && t.pauli_bprime) {
            term["pauli_b"] = pauli_to_string(*t.pauli_b);
            term["pauli_bprime"] = pauli_to_string(*t.pauli_bprime);
        } else {
            term["op_b"] = to_json(t.op_b);
            term["op_bprime"] = to_json(t.op_bprime);
        }
        if (t.shared_plates)
            term["shared_plates"] = true;
        terms.push_back(std::move(term));
    }
    return terms;
}

states::NoiseSchedule schedule_from_json(const json& j)
{
    if (!j.is_array())
        throw std::invalid_argument("schedule: expected a JSON array of terms");
    std::vector<states::NoiseTerm> terms;
    for (const json& tj : j) {
        states::NoiseTerm t;
        t.weight = tj.at("weight").get<double>();
        t.shared_plates = tj.value("shared_plates", false);
        if (tj.contains("pauli_b")) {
            t.pauli_b = pauli_from_string(tj.at("pauli_b").get<std::string>());
            t.pauli_bprime = pauli_from_string(tj.at("pauli_bprime").get<std::string>());
            t.op_b = states::pauli(*t.pauli_b);
            t.op_bprime = states::pauli(*t.pauli_bprime);
            t.plates_b = states::pauli_plate_setting(*t.pauli_b);
            t.plates_bprime = states::pauli_plate_setting(*t.pauli_bprime);
        } else {
            t.op_b = cmatrix_from_json(tj.at("op_b"));
            t.op_bprime = cmatrix_from_json(tj.at("op_bprime"));
        }
        terms.push_back(std::move(t));
    }
    return states::NoiseSchedule(std::move(terms));
}

json to_json(const tomo::TomographyDataset& d)
{
    json records = json::array();
    for (const tomo::CountRecord& r : d.records) {
        json counts = json::array();
        for (double c : r.counts)
            counts.push_back(number_or_integer(c));
        records.push_back(json{{"setting", tomo::to_string(r.setting)},
                               {"duration_s", number_or_integer(r.duration_s)},
                               {"counts", std::move(counts)}});
    }
    return json{{"n_qubits", d.n_qubits}, {"records", std::move(records)}};
}

tomo::TomographyDataset dataset_from_json(const json& j)
{
    tomo::TomographyDataset d;
    d.n_qubits = j.at("n_qubits").get<int>();
    for (const json& rj : j.at("records")) {
        tomo::CountRecord r;
        r.setting = tomo::parse_setting(rj.at("setting").get<std::string>());
        r.duration_s = rj.at("duration_s").get<double>();
        for (const json& c : rj.at("counts"))
            r.counts.push_back(c.get<double>());
        d.records.push_back(std::move(r));
    }
    return d;
}

json to_json(const tomo::ExperimentConfig& cfg)
{
    return json{
        {"fourfold_rate_hz", cfg.fourfold_rate_hz},
        {"pair_rate_hz", cfg.pair_rate_hz},
        {"duration_per_setting_s", cfg.duration_per_setting_s},
        {"collection_mode", cfg.collection_mode == tomo::CollectionMode::Pulsed ? "pulsed" : "fast"},
        {"misalign_sigma", cfg.misalign_sigma},
        {"rng_seed", cfg.rng_seed},
        {"rotation_dead_time", cfg.rotation_dead_time},
    };
}

tomo::ExperimentConfig config_from_json(const json& j)
{
    tomo::ExperimentConfig cfg;
    cfg.fourfold_rate_hz = j.value("fourfold_rate_hz", cfg.fourfold_rate_hz);
    cfg.pair_rate_hz = j.value("pair_rate_hz", cfg.pair_rate_hz);
    cfg.duration_per_setting_s = j.value("duration_per_setting_s", cfg.duration_per_setting_s);
    if (j.contains("collection_mode")) {
        std::string mode = j.at("collection_mode").get<std::string>();
        if (mode == "pulsed")
            cfg.collection_mode = tomo::CollectionMode::Pulsed;
        else if (mode == "fast")
            cfg.collection_mode = tomo::CollectionMode::Fast;
        else
            throw std::invalid_argument("config: unknown collection_mode " + mode);
    }
    cfg.misalign_sigma = j.value("misalign_sigma", cfg.misalign_sigma);
    cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
    cfg.rotation_dead_time = j.value("rotation_dead_time", cfg.rotation_dead_time);
    return cfg;
}

json to_json(const tomo::MleDiagnostics& diag)
{
    return json{{"iterations", diag.iterations},
                {"converged", diag.converged},
                {"dilution", diag.dilution},
                {"loglik_trace", diag.loglik_trace}};
}

json to_json(const hom::HomFit& f)
{
    return json{{"baseline", f.baseline},
                {"visibility", f.visibility},
                {"center", f.center},
                {"width", f.width},
                {"residual_rms", f.residual_rms}};
}

hom::HomFit hom_fit_from_json(const json& j)
{
    hom::HomFit f;
    f.baseline = j.at("baseline").get<double>();
    f.visibility = j.at("visibility").get<double>();
    f.center = j.at("center").get<double>();
    f.width = j.at("width").get<double>();
    f.residual_rms = j.value("residual_rms", 0.0);
    return f;
}

std::string to_csv(const hom::HomCurve& c)
{
    std::string out = c.count_errors ? "delay,counts,error\n" : "delay,counts\n";
    for (std::size_t i = 0; i < c.delays.size(); ++i) {
        out += format_g17(c.delays[i]);
        out += ',';
        out += format_g17(c.counts[i]);
        if (c.count_errors) {
            out += ',';
            out += format_g17((*c.count_errors)[i]);
        }
        out += '\n';
    }
    return out;
}

hom::HomCurve hom_curve_from_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("curve csv: empty file");
    std::vector<std::string> header = split_line(line, ',');
    bool has_error = header.size() >= 3;
    if (header.size() < 2 || header[0] != "delay")
        throw std::invalid_argument("curve csv: expected header delay,counts[,error]");

    hom::HomCurve c;
    std::vector<double> errors;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> fields = split_line(line, ',');
        if (fields.size() < (has_error ? 3u : 2u))
            throw std::invalid_argument("curve csv: short row");
        try {
            c.delays.push_back(std::stod(fields[0]));
            c.counts.push_back(std::stod(fields[1]));
            if (has_error)
                errors.push_back(std::stod(fields[2]));
        } catch (const std::exception&) {
            throw std::invalid_argument("curve csv: non-numeric field");
        }
    }
    if (has_error)
        c.count_errors = std::move(errors);
    return c;
}

std::string to_csv(const tomo::TomographyDataset& d)
{
    const std::size_t dim = std::size_t{1} << d.n_qubits;
    std::string out = "setting,duration_s";
    for (std::size_t o = 0; o < dim; ++o)
        out += ",c" + std::to_string(o);
    out += '\n';
    for (const tomo::CountRecord& r : d.records) {
        out += tomo::to_string(r.setting);
        out += ',';
        out += format_g17(r.duration_s);
        for (double c : r.counts) {
            out += ',';
            out += format_g17(c);
        }
        out += '\n';
    }
    return out;
}

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("invalid JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::filesystem::path& path, const json& j)
{
    std::ofstream out(path);
    if (!out)
        throw std::invalid_argument("cannot write file: " + path.string());
    out << j.dump(2) << '\n';
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::invalid_argument("cannot write file: " + path.string());
    out << text;
}

} // namespace entsim::io
