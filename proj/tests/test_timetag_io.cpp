#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "eitmem/csv.hpp"
#include "eitmem/errors.hpp"
#include "eitmem/timetag_io.hpp"

using namespace eitmem;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "eitmem_test_timetag_io";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

EventStream sample_stream() {
    return {{0, Channel::G}, {17, Channel::T}, {17, Channel::R}, {4000000000ULL, Channel::AS},
            {static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()), Channel::G}};
}

std::size_t parse_offset(const std::string& bytes) {
    try {
        parse_timetags(bytes);
    } catch (const parse_error& e) {
        return e.position();
    }
    return std::string::npos;
}

}  // namespace

TEST_CASE("binary layout is little-endian with 12-byte records") {
    const auto p = scratch("layout.ttg");
    write_timetag_file({{0x0102030405060708ULL, Channel::R}}, p);
    const std::string b = slurp(p);
    REQUIRE(b.size() == 8 + 12);
    CHECK(b.substr(0, 4) == "TTG1");
    CHECK(static_cast<unsigned char>(b[4]) == 1);
    CHECK(b[5] == 0);
    CHECK(b[6] == 0);
    CHECK(b[7] == 0);
    CHECK(b[8] == 2);
    CHECK(b[9] == 0);
    CHECK(b[10] == 0);
    CHECK(b[11] == 0);
    for (int i = 0; i < 8; ++i) CHECK(static_cast<unsigned char>(b[12 + i]) == 8 - i);
}

TEST_CASE("binary and CSV round trips are exact") {
    const auto s = sample_stream();
    const auto bin = scratch("round.ttg");
    write_timetag_file(s, bin);
    const auto rb = read_timetag_file(bin);
    CHECK(rb.events == s);
    CHECK_FALSE(rb.resorted);
    const auto csv = scratch("round.csv");
    write_timetag_csv(s, csv);
    CHECK(slurp(csv).rfind("# eitmem timetags v1\nchannel,timestamp_ns\n", 0) == 0);
    const auto rc = read_timetag_file(csv);
    CHECK(rc.events == s);

    const auto empty = scratch("empty.ttg");
    write_timetag_file({}, empty);
    CHECK(fs::file_size(empty) == 8);
    CHECK(read_timetag_file(empty).events.empty());
}

TEST_CASE("unsorted input is sorted and flagged") {
    const auto p = scratch("unsorted.ttg");
    write_timetag_file({{50, Channel::T}, {10, Channel::G}}, p);
    const auto r = read_timetag_file(p);
    CHECK(r.resorted);
    CHECK(r.events.front() == EventRecord{10, Channel::G});
}

TEST_CASE("binary parse errors carry byte offsets") {
    std::string good = "TTG1";
    good += std::string("\x01\x00\x00\x00", 4);
    std::string rec(12, '\0');
    rec[0] = 3;
    rec[4] = 9;
    good += rec + rec;
    CHECK(parse_timetags(good).events.size() == 2);

    std::string bad_magic = good;
    bad_magic[0] = static_cast<char>(0x80);
    bad_magic[1] = 0;
    CHECK(parse_offset(bad_magic) == 0);

    std::string bad_version = good;
    bad_version[4] = 2;
    CHECK(parse_offset(bad_version) == 4);

    CHECK(parse_offset(good.substr(0, 6)) == 4);
    CHECK(parse_offset(good.substr(0, good.size() - 5)) == 20);

    std::string bad_channel = good;
    bad_channel[20] = 7;
    CHECK(parse_offset(bad_channel) == 20);

    std::string overflow = good;
    overflow[20 + 11] = static_cast<char>(0x80);
    CHECK(parse_offset(overflow) == 24);
}

TEST_CASE("CSV timetags accept names and numbers and report lines") {
    const auto r = parse_timetags("# comment\nchannel,timestamp_ns\nG,5\n\n3,7\nT,9\n");
    REQUIRE(r.events.size() == 3);
    CHECK(r.events[1] == EventRecord{7, Channel::AS});
    CHECK_FALSE(r.resorted);

    auto line_of = [](const std::string& text) {
        try {
            parse_timetags(text);
        } catch (const parse_error& e) {
            return e.position();
        }
        return std::size_t{0};
    };
    CHECK(line_of("G,5\nX,6\n") == 2);
    CHECK(line_of("G,5\nT,abc\n") == 2);
    CHECK(line_of("G,5\nT,6\nR\n") == 3);
    CHECK(line_of("G,-5\n") == 1);
    CHECK_THROWS_AS(read_timetag_file(scratch("does-not-exist.ttg")), config_error);
}

TEST_CASE("numeric CSV tables") {
    CHECK(format_float(1.0 / 3.0) == "0.333333333");
    CHECK(format_float(123456789012.0) == "1.23456789e+11");
    CHECK(format_float(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_float(-std::numeric_limits<double>::infinity()) == "-inf");

    CsvWriter w("demo", {"a", "b"});
    w.add_row({1.0, 2.5});
    w.add_text_row({"3", "nan"});
    CHECK(w.str() == "# eitmem-demo v1\na,b\n1,2.5\n3,nan\n");
    CHECK_THROWS_AS(w.add_row({1.0}), eitmem::error);

    const auto t = parse_csv_table(w.str());
    CHECK(t.columns == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.column("b")[0] == 2.5);
    CHECK(std::isnan(t.column("b")[1]));
    CHECK(t.find("c") == std::string::npos);
    CHECK_THROWS_AS(t.column("c"), config_error);

    auto line_of = [](const std::string& text) {
        try {
            parse_csv_table(text);
        } catch (const parse_error& e) {
            return e.position();
        }
        return std::size_t{0};
    };
    CHECK(line_of("x,y\n1,2\n3\n") == 3);
    CHECK(line_of("x,y\n1,2\n3,oops\n") == 3);
    CHECK(line_of("# only a comment\n") != 0);
}
