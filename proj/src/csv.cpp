#include "synergylab/csv.hpp"
#include "synergylab/error.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace synergylab {

CsvReader::CsvReader(const std::string& path, char delimiter)
    : path_(path), delim_(delimiter) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw DataError("cannot open " + path + ": " + std::strerror(errno));
    file_ = f;
    read_buf_.resize(1 << 20);
    std::setvbuf(f, read_buf_.data(), _IOFBF, read_buf_.size());
    if (!next()) throw DataError(path + ": empty file, header row required");
    header_.reserve(fields_.size());
    for (auto fv : fields_) header_.emplace_back(fv);
    fields_.clear();
}

CsvReader::~CsvReader() {
    if (file_) std::fclose(static_cast<FILE*>(file_));
}

int CsvReader::column(const std::string& name) const {
    for (size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name) return static_cast<int>(i);
    return -1;
}

bool CsvReader::next() {
    FILE* f = static_cast<FILE*>(file_);
    buf_.clear();
    int c;
    bool got_any = false;
    bool in_quotes = false;
    while ((c = std::getc(f)) != EOF) {
        got_any = true;
        if (c == '"') in_quotes = !in_quotes;
        if (c == '\n' && !in_quotes) break; // newlines inside quoted fields belong to the record
        buf_.push_back(static_cast<char>(c));
    }
    if (!got_any) return false;
    if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
    ++line_no_;
    split_line();
    return true;
}

void CsvReader::split_line() {
    fields_.clear();
    unquoted_.clear();
    const char* s = buf_.data();
    const size_t n = buf_.size();
    size_t i = 0;
    // Quoted fields are copied into unquoted_ with escapes resolved; plain
    // fields are viewed in place. unquoted_ is reserved up front so the
    // views into it stay valid.
    unquoted_.reserve(n);
    while (true) {
        if (i < n && s[i] == '"') {
            size_t start = unquoted_.size();
            ++i;
            while (i < n) {
                if (s[i] == '"') {
                    if (i + 1 < n && s[i + 1] == '"') {
                        unquoted_.push_back('"');
                        i += 2;
                    } else {
                        ++i;
                        break;
                    }
                } else {
                    unquoted_.push_back(s[i++]);
                }
            }
            fields_.emplace_back(unquoted_.data() + start, unquoted_.size() - start);
            if (i < n && s[i] == delim_) { ++i; continue; }
            break;
        }
        size_t start = i;
        while (i < n && s[i] != delim_) ++i;
        fields_.emplace_back(s + start, i - start);
        if (i < n) { ++i; continue; }
        break;
    }
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : n_cols_(header.size()) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw DataError("cannot open " + path + " for writing: " + std::strerror(errno));
    file_ = f;
    row(header);
}

CsvWriter::~CsvWriter() {
    if (file_) std::fclose(static_cast<FILE*>(file_));
}

void CsvWriter::put_field(const std::string& f) {
    FILE* fp = static_cast<FILE*>(file_);
    bool needs_quote = f.find_first_of(",\"\n") != std::string::npos;
    if (!needs_quote) {
        std::fwrite(f.data(), 1, f.size(), fp);
        return;
    }
    std::putc('"', fp);
    for (char c : f) {
        if (c == '"') std::putc('"', fp);
        std::putc(c, fp);
    }
    std::putc('"', fp);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != n_cols_)
        throw DataError("csv row width mismatch: expected " + std::to_string(n_cols_) +
                        ", got " + std::to_string(fields.size()));
    FILE* fp = static_cast<FILE*>(file_);
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) std::putc(',', fp);
        put_field(fields[i]);
    }
    std::putc('\n', fp);
}

void CsvWriter::flush() { std::fflush(static_cast<FILE*>(file_)); }

int64_t parse_int(std::string_view s, const char* what, size_t line) {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw DataError(std::string("bad integer for ") + what + " at line " +
                        std::to_string(line) + ": '" + std::string(s) + "'");
    return v;
}

double parse_double(std::string_view s, const char* what, size_t line) {
    std::string tmp(s);
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(tmp.c_str(), &end);
    if (errno != 0 || end != tmp.c_str() + tmp.size() || tmp.empty())
        throw DataError(std::string("bad number for ") + what + " at line " +
                        std::to_string(line) + ": '" + tmp + "'");
    return v;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    // %.17g round-trips; trim to the shortest representation that does.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace synergylab
