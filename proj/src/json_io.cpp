#include "qcool/json_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace qcool {

namespace {

Complex pair_to_complex(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw std::invalid_argument("matrix_from_json: entries must be [re, im] pairs");
    }
    return Complex(j[0].get<double>(), j[1].get<double>());
}

nlohmann::json complex_to_pair(const Complex& z) {
    return nlohmann::json::array({z.real(), z.imag()});
}

}  // namespace

Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument("matrix_from_json: expected a nonempty array");
    }
    if (j[0].is_array() && !j[0].empty() && j[0][0].is_array()) {
        // Nested rows.
        const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
        const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
        Matrix m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (static_cast<Eigen::Index>(j[r].size()) != cols) {
                throw std::invalid_argument("matrix_from_json: ragged rows");
            }
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = pair_to_complex(j[r][c]);
        }
        return m;
    }
    // Flat row-major list of pairs; must be a perfect square.
    const auto n = static_cast<Eigen::Index>(j.size());
    const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (dim * dim != n) {
        throw std::invalid_argument("matrix_from_json: flat list length is not a perfect square");
    }
    Matrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = pair_to_complex(j[r * dim + c]);
    }
    return m;
}

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_pair(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_matrix: cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    return matrix_from_json(j);
}

void save_matrix(const Matrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_matrix: cannot open " + path.string());
    out << matrix_to_json(m).dump(2) << "\n";
}

HermitianOperator resolve_operator(const std::string& name_or_path) {
    if (name_or_path == "sigma_z") return HermitianOperator::sigma_z();
    if (name_or_path == "sigma_x") return HermitianOperator::sigma_x();
    if (name_or_path == "identity") return HermitianOperator::identity(2);
    if (std::filesystem::exists(name_or_path)) {
        return HermitianOperator(load_matrix(name_or_path));
    }
    throw std::invalid_argument("resolve_operator: unknown operator '" + name_or_path +
                                "' (builtins: sigma_z, sigma_x, identity; otherwise a JSON matrix file)");
}

nlohmann::json state_to_json(const QuantumState& s) {
    nlohmann::json j;
    if (s.is_pure()) {
        j["type"] = "pure";
        nlohmann::json amps = nlohmann::json::array();
        for (Eigen::Index i = 0; i < s.dim(); ++i) amps.push_back(complex_to_pair(s.amplitudes()[i]));
        j["amplitudes"] = std::move(amps);
    } else {
        j["type"] = "mixed";
        j["density"] = matrix_to_json(s.density());
    }
    return j;
}

QuantumState state_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "pure") {
        const auto& amps = j.at("amplitudes");
        Vector v(static_cast<Eigen::Index>(amps.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = pair_to_complex(amps[i]);
        return QuantumState::pure(std::move(v));
    }
    if (type == "mixed") {
        return QuantumState::mixed(matrix_from_json(j.at("density")));
    }
    throw std::invalid_argument("state_from_json: type must be 'pure' or 'mixed'");
}

nlohmann::json module_outcome_to_json(const ModuleOutcome& out) {
    nlohmann::json j;
    j["p_cool"] = out.p_cool;
    j["p_heat"] = out.p_heat;
    j["energy_in"] = out.energy_in;
    j["energy_cool"] = out.energy_cool ? nlohmann::json(*out.energy_cool) : nlohmann::json();
    j["energy_heat"] = out.energy_heat ? nlohmann::json(*out.energy_heat) : nlohmann::json();
    j["post_cool"] = out.post_cool ? state_to_json(*out.post_cool) : nlohmann::json();
    j["post_heat"] = out.post_heat ? state_to_json(*out.post_heat) : nlohmann::json();
    return j;
}

}  // namespace qcool
