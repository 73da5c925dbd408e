#include "csvio.hpp"

#include <cstdio>
#include <fstream>

#include "errors.hpp"

namespace affectfuse {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

double parse_double(const std::string& s, const std::string& context) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw ValidationError(context + ": expected a number, got '" + s + "'");
    return v;
}

std::int64_t parse_int(const std::string& s, const std::string& context) {
    std::int64_t v = 0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw ValidationError(context + ": expected an integer, got '" + s + "'");
    return v;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ValidationError(path + ": missing column '" + name + "' (header: " + join(header, ",") + ")");
}

bool CsvTable::has_column(const std::string& name) const {
    for (const auto& h : header)
        if (h == name) return true;
    return false;
}

const std::string& CsvTable::cell(std::size_t row, std::size_t col) const {
    return rows[row][col];
}

double CsvTable::cell_double(std::size_t row, std::size_t col) const {
    return parse_double(rows[row][col],
                        path + ":" + std::to_string(line_numbers[row]) + " column " + header[col]);
}

std::int64_t CsvTable::cell_int(std::size_t row, std::size_t col) const {
    return parse_int(rows[row][col],
                     path + ":" + std::to_string(line_numbers[row]) + " column " + header[col]);
}

void CsvTable::require_header(const std::vector<std::string>& expected) const {
    if (header == expected) return;
    throw ValidationError(path + ":1: header mismatch\n  expected: " + join(expected, ",") +
                          "\n  got:      " + join(header, ","));
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    CsvTable t;
    t.path = path;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen && line[0] == '#') {
            // "# key=value"
            std::string body = line.substr(1);
            std::size_t start = body.find_first_not_of(' ');
            if (start == std::string::npos) continue;
            body = body.substr(start);
            std::size_t eq = body.find('=');
            if (eq != std::string::npos)
                t.metadata[body.substr(0, eq)] = body.substr(eq + 1);
            continue;
        }
        auto fields = split(line, ',');
        if (!header_seen) {
            t.header = std::move(fields);
            header_seen = true;
            continue;
        }
        if (fields.size() != t.header.size())
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(t.header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        t.rows.emplace_back(std::move(fields));
        t.line_numbers.push_back(lineno);
    }
    if (!header_seen) throw ValidationError(path + ": empty file (no header)");
    return t;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw RuntimeError("cannot write " + path);
    file_ = f;
}

CsvWriter::~CsvWriter() {
    if (row_open_) std::fputc('\n', static_cast<FILE*>(file_));
    std::fclose(static_cast<FILE*>(file_));
}

void CsvWriter::metadata(const std::string& key, const std::string& value) {
    std::fprintf(static_cast<FILE*>(file_), "# %s=%s\n", key.c_str(), value.c_str());
}

void CsvWriter::header(const std::vector<std::string>& names) {
    std::fprintf(static_cast<FILE*>(file_), "%s\n", join(names, ",").c_str());
}

void CsvWriter::field(const std::string& s) {
    FILE* f = static_cast<FILE*>(file_);
    if (row_open_) std::fputc(',', f);
    std::fputs(s.c_str(), f);
    row_open_ = true;
}

void CsvWriter::field(double v) { field(format_double(v)); }

void CsvWriter::field(std::int64_t v) { field(std::to_string(v)); }

void CsvWriter::end_row() {
    std::fputc('\n', static_cast<FILE*>(file_));
    row_open_ = false;
}

}  // namespace affectfuse
