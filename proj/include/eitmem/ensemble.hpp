#pragma once

#include <cmath>
#include <limits>

#include "eitmem/units.hpp"

namespace eitmem {

/// Atomic ensemble of the memory. Rates are in gamma13 units, length in metres.
struct EnsembleParams {
    double od = 126.0;
    double length = 0.028;
    double gamma13 = 1.0;
    double gamma12 = 0.004;
    /// Hyperfine splitting of the excited states |5> and |3>.
    double delta_s = UnitSystem::from_mhz_2pi(361.6);
    /// Clebsch-Gordan ratio of the |2>-|5> transition to the control transition.
    double beta = std::sqrt(37.0 / 50.0);
    double c0 = c0_si;

    /// Throws config_error when an invariant is violated.
    void validate() const;
};

/// Control Rabi frequency with a switch-off edge centred on off_time and a
/// switch-on edge centred on on_time. Edges are raised-cosine ramps whose
/// 10%-90% duration equals edge_10_90.
struct ControlProfile {
    double omega_peak = 7.6;
    double off_time = std::numeric_limits<double>::infinity();
    double on_time = std::numeric_limits<double>::infinity();
    double edge_10_90 = UnitSystem::from_ns(70.0);

    static ControlProfile constant(double omega);
    static ControlProfile store(double omega, double off_time, double storage_time,
                                double edge_10_90 = UnitSystem::from_ns(70.0));

    bool is_constant() const { return std::isinf(off_time); }
    double storage_time() const { return is_constant() ? 0.0 : on_time - off_time; }
    /// Full support of a single raised-cosine edge.
    double edge_width() const;

    void validate() const;
};

/// Raised-cosine support width per unit of 10%-90% duration.
double raised_cosine_width_factor();

/// Omega_c2(t).
double evaluate_control(const ControlProfile& profile, double t);

}  // namespace eitmem
