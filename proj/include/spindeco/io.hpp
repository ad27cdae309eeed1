// io.hpp - deterministic CSV/JSON output helpers
#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace spindeco::io {

using nlohmann::json;

// Shortest round-trip decimal form; identical across runs and thread counts.
std::string format_double(double v);

// FNV-1a 64-bit, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(const std::vector<double>& row);
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

// Writes text to path (creating parent directories) and returns its hash.
std::string write_file(const std::filesystem::path& path, const std::string& text);

std::string read_file(const std::filesystem::path& path);

}  // namespace spindeco::io
