#include "polylab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace polylab::io {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += header[i];
    }
    buffer_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_)
        throw std::invalid_argument("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += cells[i];
    }
    buffer_ += '\n';
}

void CsvWriter::row_numeric(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double c : cells) s.push_back(format_double(c));
    row(s);
}

namespace {

void dump_value(const nlohmann::ordered_json& j, std::string& out, int indent,
                int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case nlohmann::ordered_json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                out += nlohmann::ordered_json(it.key()).dump();
                out += ": ";
                dump_value(it.value(), out, indent, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case nlohmann::ordered_json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                dump_value(v, out, indent, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case nlohmann::ordered_json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

} // namespace

std::string dump_json(const nlohmann::ordered_json& j, int indent) {
    std::string out;
    dump_value(j, out, indent, 0);
    out += '\n';
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace polylab::io
