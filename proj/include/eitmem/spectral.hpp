#pragma once

#include <vector>

#include "eitmem/ensemble.hpp"
#include "eitmem/least_squares.hpp"
#include "eitmem/wavepacket.hpp"

namespace eitmem {

/// Probe power transmission versus probe detuning (gamma13 units).
struct TransmissionCurve {
    std::vector<double> detunings;
    std::vector<double> transmission;

    /// Throws config_error if lengths differ or detunings are not strictly increasing.
    void validate() const;
};

/// Steady-state field transfer through the medium for constant control:
/// H = exp[-(OD gamma13 / 2) / (gamma13 - i delta + Omega^2 / (4 (gamma12_eff - i delta)))].
/// A component e^{-i delta tau} of the input leaves as H(delta) e^{-i delta tau},
/// so the group delay is +d arg H / d delta.
cplx transfer_function(double delta, const EnsembleParams& ens, double omega_c);

/// d arg H / d delta at delta = 0 by central differences.
double group_delay(const EnsembleParams& ens, double omega_c);

TransmissionCurve eit_spectrum(const std::vector<double>& detunings, const EnsembleParams& ens, double omega_c);

/// Frequency-domain propagation of a packet under constant control: FFT,
/// multiply by H, inverse FFT on a zero-padded grid. Output on the input grid.
Wavepacket spectral_propagate(const Wavepacket& input, const EnsembleParams& ens, double omega_c);

struct EitFitGuess {
    double od = 100.0;
    double omega_c = 5.0;
    double gamma12 = 0.01;
};

struct EitFitReport {
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    /// 95% confidence half-widths for od, omega_c, gamma12.
    double od_halfwidth = 0.0;
    double omega_halfwidth = 0.0;
    double gamma12_halfwidth = 0.0;
};

struct EitFitResult {
    double od = 0.0;
    double omega_c = 0.0;
    double gamma12 = 0.0;
    EitFitReport report;
};

/// Signal too weak to constrain a fit.
class insufficient_signal : public numerical_error {
public:
    using numerical_error::numerical_error;
};

/// Least-squares fit of |H|^2 to a measured curve. OD and Omega are fitted
/// in log space; gamma12 linearly. beta, delta_s and gamma13 come from `ens`.
EitFitResult fit_eit(const TransmissionCurve& curve, const EitFitGuess& guess, const EnsembleParams& ens = {});

}  // namespace eitmem
