#include "attentive/reports.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace reports {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string cell(double v) { return format_double(v); }
std::string cell(unsigned long v) { return std::to_string(v); }
std::string cell(unsigned long long v) { return std::to_string(v); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(const std::string& v) { return v; }
std::string cell(const char* v) { return std::string(v); }
std::string cell(bool v) { return v ? "1" : "0"; }

CsvFile::CsvFile(const std::string& path, std::string_view schema_line,
                 const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::trunc), width_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot write report: " + path);
    out_ << schema_line << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out_ << ',';
        out_ << columns[i];
    }
    out_ << '\n';
}

void CsvFile::row(const std::vector<std::string>& fields) {
    if (fields.size() != width_)
        throw std::invalid_argument("csv row width does not match the header: " + path_);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& f = fields[i];
        if (f.find_first_of(",\n\"") != std::string::npos)
            throw std::invalid_argument("csv field needs quoting, which this writer avoids: " +
                                        f);
        if (i) out_ << ',';
        out_ << f;
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("short write on report: " + path_);
}

void CsvFile::row(std::initializer_list<std::string> fields) {
    row(std::vector<std::string>(fields));
}

} // namespace reports
