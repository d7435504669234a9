#pragma once
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

// CSV report writing. Every file starts with a versioned schema line
// ("# schema: <name> v<N>") followed by the header row; golden tests pin
// both. Numbers are rendered locale-independently (shortest round-trip).

namespace reports {

/// Shortest round-trip decimal form of v; "nan"/"inf"/"-inf" for specials.
std::string format_double(double v);

std::string cell(double v);
std::string cell(unsigned long v);
std::string cell(unsigned long long v);
std::string cell(int v);
std::string cell(const std::string& v);
std::string cell(const char* v);
std::string cell(bool v); // "1" / "0"

class CsvFile {
  public:
    /// Opens path for writing and emits the schema line plus the header row.
    CsvFile(const std::string& path, std::string_view schema_line,
            const std::vector<std::string>& columns);

    void row(std::initializer_list<std::string> fields);
    void row(const std::vector<std::string>& fields);

    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
    std::size_t width_ = 0;
};

} // namespace reports
