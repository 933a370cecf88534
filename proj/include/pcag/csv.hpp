#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pcag {

/// Formats a double with 9 significant digits, locale-independent. 9 digits
/// round-trip through parse-and-format, which keeps exported files stable
/// under reload.
std::string format_value(double v);

/// Simple table destined for a CSV file. Cells are pre-formatted strings so
/// that output bytes are fully determined at insertion time.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells);
    std::string to_csv() const;
    void write(const std::filesystem::path& path) const;
};

/// Reads a CSV file with a header line. Throws std::runtime_error with the
/// line number on malformed rows (wrong field count).
struct CsvFile {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvFile read_csv(const std::filesystem::path& path);

double parse_double(const std::string& s, const std::string& context);
long long parse_int(const std::string& s, const std::string& context);

}  // namespace pcag
