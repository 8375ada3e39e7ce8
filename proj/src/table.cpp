#include "qcool/table.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qcool {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string cell_to_string(const ResultTable::Cell& cell) {
    if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
    return std::get<std::string>(cell);
}

}  // namespace

std::string to_csv(const ResultTable& table) {
    std::ostringstream out;
    for (const auto& [key, value] : table.provenance) {
        out << "# " << key << "=" << value << "\n";
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ",";
        out << table.columns[c];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) {
            throw std::logic_error("to_csv: row width does not match the header");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ",";
            out << cell_to_string(row[c]);
        }
        out << "\n";
    }
    return out.str();
}

std::string to_json_string(const ResultTable& table) {
    nlohmann::json j;
    j["schema"] = table.schema;
    nlohmann::json prov = nlohmann::json::object();
    for (const auto& [key, value] : table.provenance) prov[key] = value;
    j["provenance"] = std::move(prov);
    j["columns"] = table.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& cell : row) {
            if (const auto* d = std::get_if<double>(&cell)) {
                if (std::isnan(*d)) {
                    r.push_back(nullptr);
                } else {
                    r.push_back(*d);
                }
            } else if (const auto* i = std::get_if<std::int64_t>(&cell)) {
                r.push_back(*i);
            } else {
                r.push_back(std::get<std::string>(cell));
            }
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::filesystem::path write_table(const ResultTable& table, const std::filesystem::path& dir,
                                  TableFormat format) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path path =
        dir / (table.schema + (format == TableFormat::csv ? ".csv" : ".json"));
    std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
    if (!out) throw std::runtime_error("write_table: cannot open " + path.string());
    out << (format == TableFormat::csv ? to_csv(table) : to_json_string(table));
    return path;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char ch : data) {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace qcool
