#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "eitmem/ensemble.hpp"
#include "eitmem/wavepacket.hpp"

namespace eitmem {

/// Snapshot of the field and the atomic coherences along the medium.
/// z_grid is in metres; pol and spin are in units of g sqrt(N).
struct FieldState {
    double t = 0.0;
    std::vector<double> z_grid;
    std::vector<cplx> eps;
    std::vector<cplx> pol;
    std::vector<cplx> spin;
};

struct SolverConfig {
    /// Spatial planes; 0 picks max(128, ceil(2 OD) + 1).
    std::size_t n_z = 0;
    /// Integration step in 1/gamma13; 0 picks the largest admissible step
    /// that divides the input grid step.
    double dt = 0.0;
    /// Retarded-frame reduction of the field equation. When false the full
    /// transport equation is integrated along characteristics, which forces
    /// dt = (L/c0) / (n_z - 1).
    bool adiabatic_field = true;
    /// Keep every k-th state in the trace (0 disables the trace).
    std::size_t trace_stride = 0;
};

/// gamma12 + gamma13 (beta Omega)^2 / (4 Delta_s^2).
double effective_dephasing(const EnsembleParams& ens, double omega_c2);

/// RMS angular bandwidth of the unmasked part of a packet.
double rms_bandwidth(const Wavepacket& w);

/// Largest admissible step 0.02 / max(Omega_peak, gamma13, bandwidth).
double max_solver_step(const EnsembleParams& ens, const ControlProfile& ctrl, const Wavepacket& input);

/// Fill the automatic fields of cfg and check it against the step-size and
/// resolution limits; throws config_error on violation.
SolverConfig resolve_solver_config(SolverConfig cfg, const EnsembleParams& ens, const ControlProfile& ctrl,
                                   const Wavepacket& input);

/// Optional overrides used by storage scenarios.
struct PropagationHooks {
    /// Replaces effective_dephasing(ens, Omega(t)) for the spin coherence.
    std::function<double(double t, double omega)> spin_dephasing;
};

struct PropagationResult {
    Wavepacket output;
    std::vector<FieldState> trace;
    SolverConfig config;
};

/// Integrate the three-level Maxwell-Bloch system for a single-photon
/// envelope entering at z = 0 with P = S = 0 initially. Returns the field at
/// z = L on the input grid; the input precursor mask is carried over.
PropagationResult propagate(const Wavepacket& input, const EnsembleParams& ens, const ControlProfile& ctrl,
                            const SolverConfig& cfg = {}, const PropagationHooks& hooks = {});

}  // namespace eitmem
