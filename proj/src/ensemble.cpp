#include "eitmem/ensemble.hpp"

#include <algorithm>
#include <numbers>

#include "eitmem/errors.hpp"

namespace eitmem {

void EnsembleParams::validate() const {
    if (!(od >= 0.0) || !std::isfinite(od)) throw config_error("optical depth must be >= 0");
    if (!(length > 0.0)) throw config_error("ensemble length must be > 0");
    if (!(gamma13 > 0.0)) throw config_error("gamma13 must be > 0");
    if (!(gamma12 >= 0.0)) throw config_error("gamma12 must be >= 0");
    if (!(delta_s > 0.0)) throw config_error("hyperfine splitting must be > 0");
    if (!(beta >= 0.0 && beta <= 1.0)) throw config_error("beta must lie in [0, 1]");
    if (!(c0 > 0.0)) throw config_error("light speed must be > 0");
}

double raised_cosine_width_factor() {
    // s(u) = (1 - cos(pi u)) / 2 crosses 0.1 and 0.9 symmetrically about u = 1/2.
    const double u10 = std::acos(0.8) / std::numbers::pi;
    return 1.0 / (1.0 - 2.0 * u10);
}

ControlProfile ControlProfile::constant(double omega) {
    ControlProfile p;
    p.omega_peak = omega;
    return p;
}

ControlProfile ControlProfile::store(double omega, double off_time, double storage_time, double edge_10_90) {
    ControlProfile p;
    p.omega_peak = omega;
    p.off_time = off_time;
    p.on_time = off_time + storage_time;
    p.edge_10_90 = edge_10_90;
    return p;
}

double ControlProfile::edge_width() const { return edge_10_90 * raised_cosine_width_factor(); }

void ControlProfile::validate() const {
    if (!(omega_peak >= 0.0) || !std::isfinite(omega_peak)) throw config_error("control Rabi frequency must be >= 0");
    if (!(edge_10_90 > 0.0)) throw config_error("control edge duration must be > 0");
    if (is_constant()) return;
    if (!std::isfinite(on_time)) throw config_error("control on_time must be finite when off_time is");
    if (on_time < off_time) throw config_error("control on_time precedes off_time");
}

namespace {

double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return 0.5 * (1.0 - std::cos(std::numbers::pi * u));
}

}  // namespace

double evaluate_control(const ControlProfile& p, double t) {
    if (p.is_constant()) return p.omega_peak;
    const double w = p.edge_width();
    double fall = 1.0 - smoothstep((t - (p.off_time - 0.5 * w)) / w);
    double rise = smoothstep((t - (p.on_time - 0.5 * w)) / w);
    return p.omega_peak * std::max(fall, rise);
}

}  // namespace eitmem
