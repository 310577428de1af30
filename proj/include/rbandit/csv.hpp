#pragma once

// Minimal CSV support for the files this library writes: no quoting, '.'
// decimal point, 17 significant digits so doubles round-trip exactly.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rbandit/errors.hpp"

namespace rbandit::csv {

inline std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string join(const std::vector<std::string>& fields, char sep = ',') {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += sep;
        out += fields[i];
    }
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }

    std::size_t require_column(std::string_view name) const {
        if (auto c = column(name)) return *c;
        fail(ErrorCode::CsvSchemaMismatch, "missing column '" + std::string(name) + "'");
    }
};

inline Table read_table(std::istream& in) {
    Table t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            t.header = split(line);
            first = false;
            continue;
        }
        auto fields = split(line);
        if (fields.size() != t.header.size())
            fail(ErrorCode::CsvSchemaMismatch, "row has " + std::to_string(fields.size()) + " fields, header has " +
                                                   std::to_string(t.header.size()));
        t.rows.push_back(std::move(fields));
    }
    if (first) fail(ErrorCode::CsvSchemaMismatch, "empty CSV");
    return t;
}

inline Table read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path);
    return read_table(in);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        fail(ErrorCode::CsvSchemaMismatch, "not a number: '" + s + "'");
    return v;
}

} // namespace rbandit::csv
