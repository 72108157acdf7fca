#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace polylab::io {

// Doubles formatted with 17 significant digits, '.' decimal, no locale.
std::string format_double(double v);

// CSV row assembly; numeric cells go through format_double.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    void row_numeric(const std::vector<double>& cells);
    const std::string& str() const { return buffer_; }

private:
    std::string buffer_;
    std::size_t width_;
};

// Deterministic JSON dump: float numbers with 17 significant digits,
// two-space indentation, key order as inserted (ordered_json).
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace polylab::io
