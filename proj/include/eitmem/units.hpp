#pragma once

#include <numbers>

namespace eitmem {

/// Internal unit system. The 1-3 dipole relaxation rate is the rate unit,
/// so every rate (Rabi frequencies, dephasing, detunings) is a multiple of
/// gamma13 and every time is a multiple of 1/gamma13. SI only at I/O.
struct UnitSystem {
    /// gamma13 in rad/s: 2 pi x 3.0 MHz.
    static constexpr double gamma13_si = 2.0 * std::numbers::pi * 3.0e6;
    /// Seconds per internal time unit.
    static constexpr double time_unit = 1.0 / gamma13_si;
    /// rad/s per internal rate unit.
    static constexpr double rate_unit = gamma13_si;

    static constexpr double from_ns(double ns) { return ns * 1e-9 / time_unit; }
    static constexpr double to_ns(double t) { return t * time_unit * 1e9; }
    static constexpr double from_us(double us) { return from_ns(us * 1e3); }
    static constexpr double to_us(double t) { return to_ns(t) * 1e-3; }
    static constexpr double from_seconds(double s) { return s / time_unit; }
    static constexpr double to_seconds(double t) { return t * time_unit; }

    /// Angular frequency 2 pi x f_MHz expressed in gamma13 units.
    static constexpr double from_mhz_2pi(double f_mhz) { return 2.0 * std::numbers::pi * f_mhz * 1e6 / rate_unit; }
};

/// Vacuum light speed, m/s.
inline constexpr double c0_si = 299792458.0;

}  // namespace eitmem
