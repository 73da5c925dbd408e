#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace affectfuse {

// Minimal CSV support for the pipeline's file formats. No quoting: none of
// our schemas allow commas or newlines inside fields. Lines before the
// header that start with '#' are metadata of the form `# key=value`.
class CsvTable {
public:
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::map<std::string, std::string> metadata;
    // 1-based line number of each data row, for error reporting
    std::vector<std::size_t> line_numbers;

    std::size_t column(const std::string& name) const;            // throws ValidationError
    bool has_column(const std::string& name) const;

    const std::string& cell(std::size_t row, std::size_t col) const;
    double cell_double(std::size_t row, std::size_t col) const;   // throws with file:line
    std::int64_t cell_int(std::size_t row, std::size_t col) const;

    // throws ValidationError listing the difference when headers don't match
    void require_header(const std::vector<std::string>& expected) const;
};

CsvTable read_csv(const std::string& path);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void metadata(const std::string& key, const std::string& value);
    void header(const std::vector<std::string>& names);
    void field(const std::string& s);
    void field(double v);
    void field(std::int64_t v);
    void field(int v) { field(static_cast<std::int64_t>(v)); }
    void field(std::size_t v) { field(static_cast<std::int64_t>(v)); }
    void end_row();

private:
    void* file_;  // FILE*
    std::string path_;
    bool row_open_ = false;
};

// Deterministic double formatting shared by every writer ("%.10g").
std::string format_double(double v);

std::string join(const std::vector<std::string>& parts, const std::string& sep);
std::vector<std::string> split(const std::string& s, char sep);

double parse_double(const std::string& s, const std::string& context);
std::int64_t parse_int(const std::string& s, const std::string& context);

}  // namespace affectfuse
