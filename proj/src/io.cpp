#include "polymin/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace polymin {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
        throw ValidationError("CsvTable: row width does not match the header");
    rows_.push_back(cells);
}

void CsvTable::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < columns_.size(); ++i)
        out << columns_[i] << (i + 1 < columns_.size() ? "," : "\n");
    for (const auto& row : rows_)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
        cfg.entries_[key] = value;
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
    entries_[key] = value;
}

bool Config::has(const std::string& key) const {
    return entries_.count(key) > 0;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': not a number: " + it->second);
    }
}

int Config::get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, fallback);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ValidationError("config key '" + key + "': expected an integer");
    return i;
}

long long Config::get_long(const std::string& key, long long fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    const long long i = static_cast<long long>(v);
    if (static_cast<double>(i) != v)
        throw ValidationError("config key '" + key + "': expected an integer");
    return i;
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::vector<double>& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        return parse_double_list(it->second);
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': not a number list: " + it->second);
    }
}

void Config::require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [key, value] : entries_) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ValidationError("unknown config key: " + key);
    }
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) continue;
        std::size_t pos = 0;
        out.push_back(std::stod(t, &pos));
        if (pos != t.size()) throw std::invalid_argument("trailing characters in list");
    }
    return out;
}

} // namespace polymin
