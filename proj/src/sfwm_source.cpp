#include "eitmem/sfwm_source.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eitmem/errors.hpp"

namespace eitmem {

namespace {

constexpr std::size_t kPrecursorSamples = 5;

}  // namespace

void SourceParams::validate() const {
    if (!(od1 > 0.0)) throw config_error("source optical depth must be > 0");
    if (!(omega_c1 > 0.0)) throw config_error("source coupling Rabi frequency must be > 0");
    if (!(l1 > 0.0)) throw config_error("source length must be > 0");
    if (!(w0 > 0.0)) throw config_error("pump waist must be > 0");
    if (!(theta > 0.0 && theta < 0.5 * std::numbers::pi)) throw config_error("pump angle must lie in (0, pi/2)");
    if (!(precursor_fraction >= 0.0 && precursor_fraction < 0.1))
        throw config_error("precursor fraction must lie in [0, 0.1)");
    if (!(gamma13 > 0.0)) throw config_error("gamma13 must be > 0");
}

double group_velocity(double od, double omega_c, double length, double gamma13) {
    if (!(od > 0.0)) throw numerical_error("group velocity undefined for zero optical depth");
    return omega_c * omega_c * length / (2.0 * od * gamma13);
}

double pump_length_scale(const SourceParams& p) { return p.w0 / p.theta; }

double pump_profile(const SourceParams& p, double z) {
    double z0 = pump_length_scale(p);
    return std::exp(-(z * z) / (z0 * z0));
}

double source_group_delay(const SourceParams& p) {
    return p.l1 / group_velocity(p.od1, p.omega_c1, p.l1, p.gamma13);
}

double source_tau0(const SourceParams& p) {
    return 2.0 * p.od1 * p.gamma13 * p.w0 / (p.omega_c1 * p.omega_c1 * p.l1 * p.theta);
}

double source_fwhm(const SourceParams& p) { return 2.0 * source_tau0(p) * std::sqrt(std::log(2.0)); }

TimeGrid source_grid(const SourceParams& p, double dt, double extra_after) {
    double tg = source_group_delay(p);
    return TimeGrid::covering(-0.5 * tg, 1.5 * tg + extra_after, dt);
}

Wavepacket generate_heralded_waveform(const SourceParams& p, const TimeGrid& grid,
                                      const std::optional<PumpProfile>& pump) {
    p.validate();
    const double vg = group_velocity(p.od1, p.omega_c1, p.l1, p.gamma13);
    const double tg = p.l1 / vg;
    if (grid.t_start > -0.5 * tg + 1e-12 || grid.t_end() < 1.5 * tg - 1e-12)
        throw config_error("time grid too short: must span [-tau_g/2, 3 tau_g/2]");
    const std::size_t n_pre = p.precursor_fraction > 0.0 ? kPrecursorSamples : 0;

    std::vector<cplx> amp(grid.n);
    std::vector<std::uint8_t> mask(grid.n, 0);
    for (std::size_t k = 0; k < grid.n; ++k) {
        double z = 0.5 * p.l1 - vg * grid.at(k);
        double fp = pump ? (*pump)(z) : pump_profile(p, z);
        amp[k] = p.kappa0 * vg * std::sqrt(std::max(0.0, fp));
    }
    // First sample at or after tau = 0; the precursor occupies the samples before it.
    auto first = static_cast<std::size_t>(std::ceil(-grid.t_start / grid.dt - 1e-9));
    if (first < n_pre) throw config_error("time grid too short for the precursor spike");
    for (std::size_t j = first - n_pre; j < first; ++j) amp[j] = 0.0;

    Wavepacket main(grid, amp);
    double main_norm = wavepacket_norm(main, false);
    if (!(main_norm > 0.0)) throw numerical_error("heralded waveform has zero norm");
    double scale = std::sqrt((1.0 - p.precursor_fraction) / main_norm);
    for (auto& a : amp) a *= scale;

    if (n_pre > 0) {
        // sin^2 bump over the samples just before tau = 0.
        std::vector<double> shape(n_pre);
        double s = 0.0;
        for (std::size_t j = 0; j < n_pre; ++j) {
            double v = std::sin(std::numbers::pi * (static_cast<double>(j) + 1.0) / (static_cast<double>(n_pre) + 1.0));
            shape[j] = v * v;
            s += shape[j] * shape[j];
        }
        double a0 = std::sqrt(p.precursor_fraction / (s * grid.dt));
        for (std::size_t j = 0; j < n_pre; ++j) {
            std::size_t k = first - n_pre + j;
            amp[k] = a0 * shape[j];
            mask[k] = 1;
        }
    } else {
        mask.clear();
    }
    return Wavepacket(grid, std::move(amp), std::move(mask));
}

}  // namespace eitmem
