#pragma once

#include "qcool/cooling.hpp"
#include "qcool/spectral.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace qcool {

// Matrices travel as JSON arrays of [re, im] pairs, row-major: either nested
// rows (the export form) or a flat list of dim^2 pairs.
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Matrix& m);

Matrix load_matrix(const std::filesystem::path& path);
void save_matrix(const Matrix& m, const std::filesystem::path& path);

/// Resolves "sigma_z", "sigma_x", "identity" or a path to a JSON matrix file.
HermitianOperator resolve_operator(const std::string& name_or_path);

nlohmann::json state_to_json(const QuantumState& s);
QuantumState state_from_json(const nlohmann::json& j);

nlohmann::json module_outcome_to_json(const ModuleOutcome& out);

}  // namespace qcool
