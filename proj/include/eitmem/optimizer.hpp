#pragma once

#include <map>
#include <string>
#include <vector>

#include "eitmem/storage.hpp"

namespace eitmem {

struct OmegaBounds {
    double min = 1.0;
    double max = 16.0;
};

/// Storage protocol whose efficiency is being optimised.
struct StorageScenario {
    double storage_time = UnitSystem::from_ns(900.0);
    DecayModel decay = DecayModel::gaussian(UnitSystem::from_us(4.0));
};

struct OptimizerOptions {
    /// Log-spaced coarse scan over Omega.
    std::size_t coarse_points = 15;
    /// Golden-section stopping tolerance, relative to Omega.
    double omega_rel_tol = 1e-3;
    /// Switch-off offsets from default_switch_off, in units of the input FWHM.
    std::vector<double> t_off_offsets = {-0.15, -0.05, 0.05, 0.15, 0.25};
    /// SE drop (absolute) that bounds the optimum plateau.
    double plateau_drop = 0.005;
    /// Bisection steps locating each plateau edge.
    int plateau_bisections = 6;
    /// Worker cap for concurrent scan points.
    unsigned jobs = 1;
};

struct ControlOptimum {
    double omega_opt = 0.0;
    double t_off_opt = 0.0;
    double se_opt = 0.0;
    double plateau_low = 0.0;
    double plateau_high = 0.0;
    double plateau_halfwidth = 0.0;
    bool boundary_optimum = false;
    std::string warning;
    /// Coarse scan (Omega, best SE over t_off).
    std::vector<double> coarse_omega;
    std::vector<double> coarse_se;
};

/// Best SE over the switch-off grid (plus a parabolic refinement) for one Omega.
struct TimedEfficiency {
    double se = 0.0;
    double t_off = 0.0;
};
TimedEfficiency best_switch_off(const Wavepacket& packet, const EnsembleParams& ens, double omega,
                                const StorageScenario& scenario, const SolverConfig& cfg,
                                const OptimizerOptions& opts);

/// Maximise SE over Omega (coarse log scan, then golden section) with the
/// switch-off time co-optimised for every Omega.
ControlOptimum optimize_control(double od, const EnsembleParams& ens_template, const Wavepacket& packet,
                                const OmegaBounds& bounds, const StorageScenario& scenario,
                                const SolverConfig& cfg = {}, const OptimizerOptions& opts = {});

struct ScanResult {
    std::string axis_name;
    std::vector<double> axis;
    std::vector<double> se;
    std::vector<double> optimal_omega;
    std::vector<double> omega_halfwidth;
    std::vector<double> t_off;
    std::vector<bool> failed;
    std::vector<std::string> notes;
    std::map<std::string, double> meta;
};

/// optimize_control at every OD; failed points are flagged and skipped.
ScanResult scan_optical_depth(const std::vector<double>& ods, const EnsembleParams& ens_template,
                              const Wavepacket& packet, const OmegaBounds& bounds, const StorageScenario& scenario,
                              const SolverConfig& cfg = {}, const OptimizerOptions& opts = {});

/// SE against Omega at fixed OD, switch-off co-optimised per point.
ScanResult scan_control(const std::vector<double>& omegas, const EnsembleParams& ens, const Wavepacket& packet,
                        const StorageScenario& scenario, const SolverConfig& cfg = {},
                        const OptimizerOptions& opts = {});

/// SE against storage time at fixed OD and Omega; `t_off` defaults to
/// default_switch_off when not finite.
ScanResult scan_storage_time(const std::vector<double>& times, const EnsembleParams& ens, double omega,
                             const Wavepacket& packet, const DecayModel& decay, const SolverConfig& cfg = {},
                             double t_off = std::numeric_limits<double>::quiet_NaN(), unsigned jobs = 1);

}  // namespace eitmem
