#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace eitmem {

/// %.9g formatting used for every float written to CSV.
std::string format_float(double v);

/// Writes `# eitmem-<schema> v<version>`, the column line, then rows.
class CsvWriter {
public:
    CsvWriter(std::string schema, std::vector<std::string> columns, int version = 1);

    void add_row(const std::vector<double>& values);
    /// Cells already formatted by the caller.
    void add_text_row(const std::vector<std::string>& cells);

    std::string str() const;
    void save(const std::filesystem::path& path) const;

private:
    std::vector<std::string> columns_;
    std::string body_;
};

/// Numeric CSV with a named header. Lines starting with '#' and blank lines
/// are ignored.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Index of the named column, or npos.
    std::size_t find(std::string_view name) const;
    std::vector<double> column(std::string_view name) const;
};

/// Throws parse_error carrying the 1-based line number of the first bad line.
CsvTable parse_csv_table(const std::string& text);
CsvTable read_csv_table(const std::filesystem::path& path);

}  // namespace eitmem
