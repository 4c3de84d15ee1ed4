#pragma once

#include <map>
#include <string>
#include <vector>

#include "polymin/errors.hpp"

namespace polymin {

/// Full round-trip decimal formatting ('.' separator, %.17g).
std::string format_double(double v);

/// Minimal CSV table with a header row; numeric cells keep full precision.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_row(const std::vector<std::string>& cells);
    std::vector<std::string>& columns() { return columns_; }
    std::size_t rows() const { return rows_.size(); }

    void write(const std::string& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Flat key = value configuration (sections via dotted keys, '#' comments).
class Config {
public:
    Config() = default;
    static Config from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    long long get_long(const std::string& key, long long fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;

    /// Unknown keys are rejected rather than silently defaulted.
    void require_known(const std::vector<std::string>& allowed) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

std::vector<double> parse_double_list(const std::string& text);

} // namespace polymin
