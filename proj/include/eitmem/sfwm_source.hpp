#pragma once

#include <functional>
#include <optional>

#include "eitmem/units.hpp"
#include "eitmem/wavepacket.hpp"

namespace eitmem {

/// Backward sFWM source ensemble (MOT1) and its focused pump.
struct SourceParams {
    double od1 = 100.0;
    double omega_c1 = 3.5;            // gamma13 units
    double l1 = 0.015;                // m
    double w0 = 182e-6;               // m, pump waist
    double theta = 2.5 * std::numbers::pi / 180.0;  // rad, pump-to-photon angle
    double kappa0 = 1.0;              // overall amplitude scale, removed by normalisation
    double precursor_fraction = 0.02;
    double gamma13 = 1.0;

    void validate() const;
};

/// Longitudinal pump profile f_p(z), z measured from the ensemble centre.
using PumpProfile = std::function<double(double)>;

/// V_g = Omega^2 L / (2 OD gamma13) in whatever length/time units the
/// arguments carry.
double group_velocity(double od, double omega_c, double length, double gamma13);

/// Pump length scale z0 = w0 / theta.
double pump_length_scale(const SourceParams& params);

/// exp(-z^2 / z0^2).
double pump_profile(const SourceParams& params, double z);

/// Group delay through the source ensemble, tau_g = L1 / V_g1.
double source_group_delay(const SourceParams& params);

/// Gaussian width tau0 = 2 OD1 gamma13 w0 / (Omega_c1^2 L1 theta).
double source_tau0(const SourceParams& params);

/// Intensity FWHM of the Gaussian waveform, 2 tau0 sqrt(ln 2).
double source_fwhm(const SourceParams& params);

/// Grid recommended for generate_heralded_waveform: spans
/// [-tau_g/2, 3 tau_g/2] plus `extra_after` with step dt.
TimeGrid source_grid(const SourceParams& params, double dt, double extra_after = 0.0);

/// Heralded anti-Stokes waveform. The detected intensity follows the pump
/// profile, |psi(tau)|^2 proportional to f_p(L1/2 - V_g1 tau), so a Gaussian pump gives
/// exp(-(tau - tau_g/2)^2 / tau0^2) with intensity FWHM 2 tau0 sqrt(ln 2).
/// The result has unit total norm; a masked precursor spike carrying
/// params.precursor_fraction of it sits on the samples just before tau = 0.
/// `pump` overrides the Gaussian profile (e.g. an indicator of the ensemble
/// for a flat pump, which yields a rectangle of duration tau_g).
Wavepacket generate_heralded_waveform(const SourceParams& params, const TimeGrid& grid,
                                      const std::optional<PumpProfile>& pump = std::nullopt);

}  // namespace eitmem
