#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace synergylab {

// Minimal delimited-text reader. Handles RFC-4180 style double-quote
// escaping, configurable delimiter, mandatory header row. Rows are
// surfaced as string_views into an internal line buffer, so a row is
// only valid until the next call.
class CsvReader {
  public:
    CsvReader(const std::string& path, char delimiter = ',');

    const std::vector<std::string>& header() const { return header_; }

    // Column index by name, -1 if absent.
    int column(const std::string& name) const;

    // Advances to the next data row. Returns false at EOF.
    bool next();

    const std::vector<std::string_view>& fields() const { return fields_; }
    std::string_view field(size_t i) const { return fields_[i]; }
    size_t line_number() const { return line_no_; }

  private:
    void split_line();

    std::string path_;
    char delim_;
    std::string buf_;       // raw line
    std::string unquoted_;  // scratch for quoted fields
    std::vector<std::string> header_;
    std::vector<std::string_view> fields_;
    size_t line_no_ = 0;
    void* file_ = nullptr; // FILE*
    std::vector<char> read_buf_;

  public:
    ~CsvReader();
    CsvReader(const CsvReader&) = delete;
    CsvReader& operator=(const CsvReader&) = delete;
};

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();

    void row(const std::vector<std::string>& fields);
    void flush();

  private:
    void put_field(const std::string& f);
    void* file_ = nullptr;
    size_t n_cols_;
};

// Field parsing helpers; all throw DataError with row context on failure.
int64_t parse_int(std::string_view s, const char* what, size_t line);
double parse_double(std::string_view s, const char* what, size_t line);

// Formats a double the way every artifact file does (shortest round-trip).
std::string format_double(double v);

} // namespace synergylab
