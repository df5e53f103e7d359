#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "eitmem/ensemble.hpp"
#include "eitmem/mb_solver.hpp"
#include "eitmem/sfwm_source.hpp"
#include "eitmem/wavepacket.hpp"

namespace eitmem {

/// Decoherence of the stored spin wave while the control is off.
struct DecayModel {
    enum class Kind { exponential, gaussian, combined };
    Kind kind = Kind::gaussian;
    /// Gaussian coherence time: SE decays as exp(-t^2 / tau0^2).
    double tau0 = UnitSystem::from_us(4.0);
    /// Exponential amplitude decay rate.
    double gamma12 = 0.0;

    static DecayModel none() { return {Kind::exponential, 0.0, 0.0}; }
    static DecayModel gaussian(double tau0) { return {Kind::gaussian, tau0, 0.0}; }
    static DecayModel exponential(double gamma12) { return {Kind::exponential, 0.0, gamma12}; }

    void validate() const;
};

/// Amplitude multiplier of the spin coherence after `elapsed` storage time.
double storage_decay_factor(const DecayModel& decay, double elapsed);

/// -d ln(factor) / dt, the instantaneous spin dephasing rate equivalent to
/// storage_decay_factor.
double storage_decay_rate(const DecayModel& decay, double elapsed);

/// Multiply the spin coherence by storage_decay_factor(decay, elapsed).
std::vector<cplx> apply_storage_decay(std::span<const cplx> spin, double elapsed, const DecayModel& decay);

struct TimeWindow {
    double begin = -std::numeric_limits<double>::infinity();
    double end = std::numeric_limits<double>::infinity();
};

/// Retrieved probability in `retrieval_window` over the unmasked input
/// probability. Precursor samples are excluded on both sides.
double storage_efficiency(const Wavepacket& input, const Wavepacket& output, TimeWindow retrieval_window = {});

struct LikenessResult {
    double likeness = 0.0;
    double optimal_delay = 0.0;
};

/// Normalised overlap of sqrt-intensity profiles maximised over integer-sample
/// delays: L = |sum sqrt(N_in(t - d) N_out(t))|^2 / (sum N_in sum N_out).
/// `out` is resampled onto the step of `in` if the steps differ.
LikenessResult waveform_likeness(const Wavepacket& in, const Wavepacket& out);

/// Likeness between `in` and the time reverse of `out`.
double mirror_likeness(const Wavepacket& in, const Wavepacket& out);

struct StorageResult {
    double se = 0.0;
    Wavepacket input;
    /// Full field leaving the medium.
    Wavepacket output;
    /// Output restricted to the retrieval window (zero elsewhere).
    Wavepacket retrieved;
    double storage_time = 0.0;
    std::optional<double> slow_light_efficiency;
    double likeness = 0.0;
    double optimal_delay = 0.0;
    /// Peak-to-peak delay of output relative to input.
    double delay = 0.0;
    TimeWindow retrieval_window;
    ControlProfile control;
};

struct StorageOptions {
    /// Integrate the retrieved light over the whole grid instead of from the
    /// control switch-on onwards.
    bool unbounded_window = false;
    /// Also run the constant-control slow-light reference.
    bool measure_slow_light = false;
};

/// Intensity-normalised input packet from the source on a grid of step dt.
Wavepacket source_packet(const SourceParams& source, double dt);

/// Slow-light reference under constant control.
StorageResult run_slow_light(const Wavepacket& packet, const EnsembleParams& ens, double omega_c,
                             const SolverConfig& cfg = {});
StorageResult run_slow_light(const SourceParams& source, const EnsembleParams& ens, double omega_c,
                             const SolverConfig& cfg = {}, double dt = UnitSystem::from_ns(1.0));

/// Default write timing: input peak plus half the slow-light group delay.
double default_switch_off(const Wavepacket& packet, const EnsembleParams& ens, double omega_c);

/// Store-and-retrieve. The packet grid is extended with zeros to cover the
/// read-out. Between the switch-off and switch-on edges the spin coherence
/// dephases according to `decay` instead of the intrinsic gamma12. Retrieved
/// light is counted from the switch-on time, or over the whole output when
/// OD is 0.
StorageResult run_storage(const Wavepacket& packet, const EnsembleParams& ens, const ControlProfile& ctrl,
                          const DecayModel& decay, const SolverConfig& cfg = {}, const StorageOptions& opts = {});

struct DecayPoint {
    double t = 0.0;
    double se = 0.0;
    /// One-sigma uncertainty; 0 means unweighted.
    double sigma = 0.0;
};

struct DecayFitReport {
    double residual_norm = 0.0;
    std::vector<double> residuals;
    int iterations = 0;
    bool converged = false;
    /// Data show no measurable decay; tau0 is reported as infinity.
    bool unbounded = false;
    double tau0_halfwidth = 0.0;
};

struct DecayFit {
    double tau0 = 0.0;
    double se0 = 0.0;
    DecayFitReport report;
};

/// Least-squares fit of se0 exp(-t^2 / tau0^2).
DecayFit fit_gaussian_decay(std::span<const DecayPoint> points);

/// Storage time at which the Gaussian law reaches se_target.
double storage_time_at(double se_target, double tau0, double se0);

/// Storage time in units of the input FWHM.
double fractional_delay(double storage_time, double input_fwhm);

}  // namespace eitmem
