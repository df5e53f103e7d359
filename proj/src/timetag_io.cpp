#include "eitmem/timetag_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "eitmem/errors.hpp"

namespace eitmem {

namespace {

constexpr char magic[4] = {'T', 'T', 'G', '1'};
constexpr std::size_t header_size = 8;
constexpr std::size_t record_size = 12;

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const std::string& b, std::size_t at) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) | (static_cast<unsigned char>(b[at + 1]) << 8));
}

std::uint64_t get_u64(const std::string& b, std::size_t at) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + static_cast<std::size_t>(i)]);
    return v;
}

bool looks_like_text(const std::string& b) {
    const std::size_t n = std::min<std::size_t>(b.size(), 256);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<unsigned char>(b[i]);
        if (c == '\n' || c == '\r' || c == '\t') continue;
        if (c < 0x20 || c > 0x7e) return false;
    }
    return true;
}

TimetagReadResult parse_binary(const std::string& b) {
    if (b.size() < 4 || std::memcmp(b.data(), magic, 4) != 0) throw parse_error("bad TTG1 magic at byte 0", 0);
    if (b.size() < header_size) throw parse_error("truncated TTG1 header at byte 4", 4);
    const std::uint16_t version = get_u16(b, 4);
    if (version != ttg_version) throw parse_error("unsupported TTG1 version " + std::to_string(version) + " at byte 4", 4);

    TimetagReadResult res;
    const std::size_t body = b.size() - header_size;
    res.events.reserve(body / record_size);
    for (std::size_t at = header_size; at < b.size(); at += record_size) {
        if (b.size() - at < record_size) throw parse_error("truncated record at byte " + std::to_string(at), at);
        const auto ch = static_cast<unsigned char>(b[at]);
        if (ch > 3) throw parse_error("invalid channel " + std::to_string(ch) + " at byte " + std::to_string(at), at);
        const std::uint64_t ts = get_u64(b, at + 4);
        if (ts > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
            throw parse_error("timestamp overflow at byte " + std::to_string(at + 4), at + 4);
        res.events.push_back({ts, static_cast<Channel>(ch)});
    }
    return res;
}

bool parse_channel(std::string_view s, Channel& out) {
    if (s == "G" || s == "0") out = Channel::G;
    else if (s == "T" || s == "1") out = Channel::T;
    else if (s == "R" || s == "2") out = Channel::R;
    else if (s == "AS" || s == "3") out = Channel::AS;
    else return false;
    return true;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

TimetagReadResult parse_csv(const std::string& b) {
    TimetagReadResult res;
    std::istringstream in(b);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        const auto comma = s.find(',');
        if (comma == std::string_view::npos)
            throw parse_error("line " + std::to_string(line_no) + ": expected channel,timestamp_ns", line_no);
        const std::string_view c = trim(s.substr(0, comma));
        const std::string_view t = trim(s.substr(comma + 1));
        if (!header_seen && res.events.empty() && c == "channel" && t == "timestamp_ns") {
            header_seen = true;
            continue;
        }
        Channel ch{};
        if (!parse_channel(c, ch))
            throw parse_error("line " + std::to_string(line_no) + ": unknown channel '" + std::string(c) + "'", line_no);
        std::int64_t ts = 0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), ts);
        if (ec == std::errc::result_out_of_range)
            throw parse_error("line " + std::to_string(line_no) + ": timestamp overflow", line_no);
        if (ec != std::errc() || ptr != t.data() + t.size() || ts < 0)
            throw parse_error("line " + std::to_string(line_no) + ": invalid timestamp '" + std::string(t) + "'", line_no);
        res.events.push_back({static_cast<std::uint64_t>(ts), ch});
    }
    return res;
}

std::string read_all(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

void write_all(const std::filesystem::path& path, const std::string& data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw config_error("cannot write " + path.string());
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw config_error("write failed for " + path.string());
}

}  // namespace

void write_timetag_file(const EventStream& stream, const std::filesystem::path& path) {
    std::string out;
    out.reserve(header_size + record_size * stream.size());
    out.append(magic, 4);
    put_u16(out, ttg_version);
    put_u16(out, 0);
    for (const auto& e : stream) {
        out.push_back(static_cast<char>(static_cast<std::uint8_t>(e.channel)));
        out.append(3, '\0');
        put_u64(out, e.timestamp);
    }
    write_all(path, out);
}

void write_timetag_csv(const EventStream& stream, const std::filesystem::path& path) {
    std::string out = "# eitmem timetags v1\nchannel,timestamp_ns\n";
    for (const auto& e : stream) {
        out += channel_name(e.channel);
        out += ',';
        out += std::to_string(e.timestamp);
        out += '\n';
    }
    write_all(path, out);
}

TimetagReadResult parse_timetags(const std::string& bytes) {
    TimetagReadResult res;
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), magic, 4) == 0) {
        res = parse_binary(bytes);
    } else if (!bytes.empty() && looks_like_text(bytes)) {
        res = parse_csv(bytes);
    } else {
        throw parse_error("bad TTG1 magic at byte 0", 0);
    }
    if (!is_sorted_events(res.events)) {
        sort_events(res.events);
        res.resorted = true;
    }
    return res;
}

TimetagReadResult read_timetag_file(const std::filesystem::path& path) { return parse_timetags(read_all(path)); }

}  // namespace eitmem
