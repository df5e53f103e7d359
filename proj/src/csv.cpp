#include "eitmem/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "eitmem/errors.hpp"

namespace eitmem {

std::string format_float(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

CsvWriter::CsvWriter(std::string schema, std::vector<std::string> columns, int version)
    : columns_(std::move(columns)) {
    body_ = "# eitmem-" + schema + " v" + std::to_string(version) + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) body_ += ',';
        body_ += columns_[i];
    }
    body_ += '\n';
}

void CsvWriter::add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_float(v));
    add_text_row(cells);
}

void CsvWriter::add_text_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw error("csv row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) body_ += ',';
        body_ += cells[i];
    }
    body_ += '\n';
}

std::string CsvWriter::str() const { return body_; }

void CsvWriter::save(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw config_error("cannot write " + path.string());
    f << body_;
    if (!f) throw config_error("write failed for " + path.string());
}

std::size_t CsvTable::find(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    return std::string::npos;
}

std::vector<double> CsvTable::column(std::string_view name) const {
    const std::size_t i = find(name);
    if (i == std::string::npos) throw config_error("missing column '" + std::string(name) + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[i]);
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t c = s.find(',', start);
        out.push_back(trim(s.substr(start, c == std::string_view::npos ? std::string_view::npos : c - start)));
        if (c == std::string_view::npos) break;
        start = c + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& v) {
    if (s == "nan") { v = std::nan(""); return true; }
    if (s == "inf") { v = INFINITY; return true; }
    if (s == "-inf") { v = -INFINITY; return true; }
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    return ec == std::errc() && ptr == e && b != e;
}

}  // namespace

CsvTable parse_csv_table(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        const auto cells = split(s);
        if (t.columns.empty()) {
            for (auto c : cells) {
                if (c.empty()) throw parse_error("line " + std::to_string(line_no) + ": empty column name", line_no);
                t.columns.emplace_back(c);
            }
            continue;
        }
        if (cells.size() != t.columns.size())
            throw parse_error("line " + std::to_string(line_no) + ": expected " + std::to_string(t.columns.size()) +
                                  " fields, found " + std::to_string(cells.size()),
                              line_no);
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!parse_double(cells[i], row[i]))
                throw parse_error("line " + std::to_string(line_no) + ": not a number '" + std::string(cells[i]) + "'",
                                  line_no);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.columns.empty()) throw parse_error("missing header line", line_no == 0 ? 1 : line_no);
    return t;
}

CsvTable read_csv_table(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open " + path.string());
    return parse_csv_table(std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()));
}

}  // namespace eitmem
