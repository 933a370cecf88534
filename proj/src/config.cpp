#include "pcag/config.hpp"

#include <fstream>
#include <stdexcept>

#include "pcag/csv.hpp"

namespace pcag {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open " + path.string());
    Config cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: " + path.string() + " line " +
                                        std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: " + path.string() + " line " +
                                        std::to_string(line_no) + ": empty key");
        cfg.values_[key] = value;
    }
    return cfg;
}

std::string Config::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw std::invalid_argument("config: missing required key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    return parse_double(get_string(key), "config key '" + key + "'");
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
    return parse_int(get_string(key), "config key '" + key + "'");
}

long long Config::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    return static_cast<std::uint64_t>(get_int(key));
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    cur = trim(cur);
    if (!cur.empty()) parts.push_back(cur);
    return parts;
}

}  // namespace

std::vector<double> Config::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& part : split_list(get_string(key)))
        out.push_back(parse_double(part, "config key '" + key + "'"));
    return out;
}

std::vector<int> Config::get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (const auto& part : split_list(get_string(key)))
        out.push_back(static_cast<int>(parse_int(part, "config key '" + key + "'")));
    return out;
}

}  // namespace pcag
