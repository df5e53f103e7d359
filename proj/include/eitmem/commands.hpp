#pragma once

#include <filesystem>

#include "json.hpp"

#include "eitmem/config.hpp"

namespace eitmem {

/// Subcommands shared by the command-line tool and the acceptance suite.
/// Each writes its CSV and JSON files into config.out_dir and returns the
/// JSON summary.

enum class ScanAxis { od, omega, storage_time };
enum class FitKind { eit, decay };

/// Input packet for the configured source and pump shape.
Wavepacket configured_packet(const RunConfig& config);

/// waveform.csv (tau_ns,intensity,is_precursor) and waveform.json.
nlohmann::json cmd_waveform(const RunConfig& config);

/// storage.csv (tau_ns,input,slowed,retrieved) and storage.json.
nlohmann::json cmd_store(const RunConfig& config);

/// scan_od.csv, scan_omega.csv or scan_storage_time.csv plus a JSON summary.
nlohmann::json cmd_scan(const RunConfig& config, ScanAxis axis);

/// fit_eit.json or fit_decay.json from a data CSV.
nlohmann::json cmd_fit(const RunConfig& config, FitKind kind, const std::filesystem::path& data);

/// stats.json, g2_window.csv, correlation.csv and optionally timetags.ttg.
nlohmann::json cmd_stats(const RunConfig& config);

}  // namespace eitmem
