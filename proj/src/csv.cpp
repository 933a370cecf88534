#include "pcag/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pcag {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != header.size())
        throw std::invalid_argument("Table: row width does not match header");
    rows.push_back(std::move(cells));
}

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

void Table::write(const std::filesystem::path& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f << to_csv();
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

CsvFile read_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path.string());
    CsvFile out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto fields = split_line(line);
        if (line_no == 1) {
            out.header = std::move(fields);
        } else {
            if (fields.size() != out.header.size())
                throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) +
                                         ": expected " + std::to_string(out.header.size()) +
                                         " fields, got " + std::to_string(fields.size()));
            out.rows.push_back(std::move(fields));
        }
    }
    if (out.header.empty()) throw std::runtime_error(path.string() + ": empty file");
    return out;
}

double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(context + ": cannot parse number '" + s + "'");
    }
}

long long parse_int(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(context + ": cannot parse integer '" + s + "'");
    }
}

}  // namespace pcag
