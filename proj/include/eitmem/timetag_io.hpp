#pragma once

#include <filesystem>
#include <string>

#include "eitmem/photon_stats.hpp"

namespace eitmem {

/// TTG1 layout, little-endian: "TTG1", u16 version (1), u16 reserved, then
/// 12-byte records {u8 channel, 3 pad bytes, u64 timestamp_ns}.
inline constexpr std::uint16_t ttg_version = 1;

struct TimetagReadResult {
    EventStream events;
    /// The file was not time ordered and was sorted on read.
    bool resorted = false;
};

void write_timetag_file(const EventStream& stream, const std::filesystem::path& path);
void write_timetag_csv(const EventStream& stream, const std::filesystem::path& path);

/// Reads TTG1, or the CSV form `channel,timestamp_ns` when the file does not
/// start with the TTG1 magic and looks like text. Parse errors carry a byte
/// offset (binary) or line number (CSV).
TimetagReadResult read_timetag_file(const std::filesystem::path& path);

/// Same as read_timetag_file on an in-memory buffer.
TimetagReadResult parse_timetags(const std::string& bytes);

}  // namespace eitmem
