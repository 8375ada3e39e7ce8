#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace qcool {

enum class TableFormat { csv, json };

/// A tabular result with a provenance block (scenario, seed, code version,
/// scenario hash) carried on every emitted file.
struct ResultTable {
    std::string schema;
    std::vector<std::string> columns;
    using Cell = std::variant<double, std::int64_t, std::string>;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, std::string>> provenance;

    void add_provenance(std::string key, std::string value) {
        provenance.emplace_back(std::move(key), std::move(value));
    }
};

/// Floats are printed with 17 significant digits so CSV round-trips exactly.
std::string format_double(double v);

std::string to_csv(const ResultTable& table);
std::string to_json_string(const ResultTable& table);

/// Writes <dir>/<schema>.csv or .json; returns the path written.
std::filesystem::path write_table(const ResultTable& table, const std::filesystem::path& dir,
                                  TableFormat format);

std::uint64_t fnv1a64(std::string_view data);

}  // namespace qcool
