#pragma once

#include "entsim/analysis.hpp"
#include "entsim/hom.hpp"
#include "entsim/qmat.hpp"
#include "entsim/states.hpp"
#include "entsim/tomography.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

// File interchange formats shared by the library, the CLI and external
// consumers. Matrices are JSON objects {"rows", "cols", "re", "im"} with
// row-major coefficient lists.

namespace entsim::io {

using nlohmann::json;

json to_json(const qmat::CMatrix& m);
qmat::CMatrix cmatrix_from_json(const json& j);

json to_json(const qmat::DensityMatrix& rho);
qmat::DensityMatrix density_matrix_from_json(const json& j);

json to_json(const states::NoiseSchedule& schedule);
states::NoiseSchedule schedule_from_json(const json& j);

json to_json(const tomo::TomographyDataset& d);
tomo::TomographyDataset dataset_from_json(const json& j);

json to_json(const tomo::ExperimentConfig& cfg);
tomo::ExperimentConfig config_from_json(const json& j);

json to_json(const tomo::MleDiagnostics& diag);

json to_json(const hom::HomFit& f);
hom::HomFit hom_fit_from_json(const json& j);

/// CSV with header `delay,counts[,error]`.
std::string to_csv(const hom::HomCurve& c);
hom::HomCurve hom_curve_from_csv(const std::string& text);

/// CSV with header `setting,duration_s,c0,...`.
std::string to_csv(const tomo::TomographyDataset& d);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace entsim::io
