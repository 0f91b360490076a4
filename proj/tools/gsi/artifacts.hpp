#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>

namespace gsi::cli {

/// Lower-case hex SHA-256 digest.
[[nodiscard]] std::string sha256_hex(std::string_view data);

/// Shortest decimal text that reads back to the same double.
[[nodiscard]] std::string format_double(double x);

/// Comma-separated table with a fixed header; every row must match the header width.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> columns);
    void row(std::span<const double> values);
    void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

private:
    std::ofstream out_;
    std::size_t width_;
    std::string line_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

} // namespace gsi::cli
