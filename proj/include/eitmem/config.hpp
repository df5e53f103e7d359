#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "eitmem/ensemble.hpp"
#include "eitmem/mb_solver.hpp"
#include "eitmem/optimizer.hpp"
#include "eitmem/photon_stats.hpp"
#include "eitmem/sfwm_source.hpp"
#include "eitmem/spectral.hpp"
#include "eitmem/storage.hpp"

namespace eitmem {

enum class PumpShape { gaussian, constant };

struct StatsSettings {
    /// Waveform is filled from the source section at run time.
    SourceStatModel model;
    double duration = 1.0;        // s
    double t_w = 800.0;           // ns
    std::vector<double> t_w_table = {100, 200, 400, 600, 800, 1000, 1200};  // ns
    double bin = 10.0;            // ns
    double span = 2000.0;         // ns
    /// Use thermal_value for g_ss and g_asas instead of measuring them.
    bool thermal_autocorrelation = true;
    double thermal_value = 2.0;
    bool dump_timetags = false;
};

struct ScanSettings {
    std::vector<double> od = {30, 60, 90, 126, 168};
    std::vector<double> omega;          // gamma13 units
    std::vector<double> storage_time;   // internal time units
    OmegaBounds bounds;
    OptimizerOptions optimizer;
    /// Counts per unit SE for synthetic Poisson noise on storage-time scans
    /// (0 disables noise).
    double poisson_counts = 0.0;
};

/// Declarative run description. Times are stored in internal units; the JSON
/// file gives them in ns (decay.tau0 and scan.storage_time included).
struct RunConfig {
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    std::filesystem::path out_dir = ".";
    /// Waveform sampling step.
    double dt = UnitSystem::from_ns(1.0);

    SourceParams source;
    PumpShape pump = PumpShape::gaussian;
    EnsembleParams ensemble;
    /// off_time may be NaN, meaning the default write timing.
    ControlProfile control{7.6, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    double storage_time = UnitSystem::from_ns(900.0);
    bool unbounded_window = false;
    SolverConfig solver;
    DecayModel decay;
    StatsSettings stats;
    ScanSettings scan;
    EitFitGuess fit_guess;

    /// Re-runs every module invariant check.
    void validate() const;
};

/// Parses JSON text. Syntax errors raise parse_error (byte offset); unknown
/// keys, wrong types and invalid values raise config_error.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace eitmem
