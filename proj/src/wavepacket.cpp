#include "eitmem/wavepacket.hpp"

#include <algorithm>
#include <cmath>

#include "eitmem/errors.hpp"

namespace eitmem {

TimeGrid::TimeGrid(double t_start, double dt, std::size_t n) : t_start(t_start), dt(dt), n(n) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw config_error("time grid step must be positive");
    if (n < 2) throw config_error("time grid needs at least two samples");
}

TimeGrid TimeGrid::covering(double t_begin, double t_end, double dt) {
    if (!(t_end > t_begin)) throw config_error("time grid interval is empty");
    auto n = static_cast<std::size_t>(std::ceil((t_end - t_begin) / dt - 1e-9)) + 1;
    return TimeGrid(t_begin, dt, std::max<std::size_t>(n, 2));
}

Wavepacket::Wavepacket(TimeGrid grid, std::vector<cplx> amplitude, std::vector<std::uint8_t> precursor_mask)
    : grid_(grid), amplitude_(std::move(amplitude)), mask_(std::move(precursor_mask)) {
    if (amplitude_.size() != grid_.n) throw config_error("wavepacket amplitude length differs from grid size");
    if (!mask_.empty() && mask_.size() != grid_.n) throw config_error("precursor mask length differs from grid size");
}

cplx Wavepacket::sample(double t) const {
    double u = (t - grid_.t_start) / grid_.dt;
    if (u < 0.0 || u > static_cast<double>(grid_.n - 1)) return {};
    auto k = static_cast<std::size_t>(u);
    if (k >= grid_.n - 1) return amplitude_.back();
    double f = u - static_cast<double>(k);
    return amplitude_[k] * (1.0 - f) + amplitude_[k + 1] * f;
}

std::size_t Wavepacket::peak_index() const {
    std::size_t best = 0;
    double best_i = -1.0;
    for (std::size_t k = 0; k < amplitude_.size(); ++k) {
        if (is_precursor(k)) continue;
        if (intensity(k) > best_i) {
            best_i = intensity(k);
            best = k;
        }
    }
    return best;
}

double Wavepacket::centroid() const {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < amplitude_.size(); ++k) {
        if (is_precursor(k)) continue;
        num += grid_.at(k) * intensity(k);
        den += intensity(k);
    }
    if (den <= 0.0) throw numerical_error("centroid of an empty wavepacket");
    return num / den;
}

double Wavepacket::intensity_fwhm() const {
    std::size_t kp = peak_index();
    double half = 0.5 * intensity(kp);
    if (!(half > 0.0)) throw numerical_error("FWHM of an empty wavepacket");
    std::size_t lo = kp;
    while (lo > 0 && !is_precursor(lo - 1) && intensity(lo - 1) >= half) --lo;
    std::size_t hi = kp;
    while (hi + 1 < size() && !is_precursor(hi + 1) && intensity(hi + 1) >= half) ++hi;
    // Interpolate each crossing between the last sample above and the first below.
    double t_lo = grid_.at(lo);
    if (lo > 0 && !is_precursor(lo - 1)) {
        double a = intensity(lo - 1), b = intensity(lo);
        t_lo = grid_.at(lo - 1) + grid_.dt * (half - a) / (b - a);
    }
    double t_hi = grid_.at(hi);
    if (hi + 1 < size() && !is_precursor(hi + 1)) {
        double a = intensity(hi), b = intensity(hi + 1);
        t_hi = grid_.at(hi) + grid_.dt * (a - half) / (a - b);
    }
    return t_hi - t_lo;
}

Wavepacket Wavepacket::scaled(cplx factor) const {
    Wavepacket out = *this;
    for (auto& a : out.amplitude_) a *= factor;
    return out;
}

Wavepacket Wavepacket::shifted(double delay) const {
    TimeGrid g = grid_;
    g.t_start += delay;
    return Wavepacket(g, amplitude_, mask_);
}

double wavepacket_norm(const Wavepacket& w, bool exclude_precursor) {
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (exclude_precursor && w.is_precursor(k)) continue;
        s += w.intensity(k);
    }
    return s * w.grid().dt;
}

double wavepacket_norm(const Wavepacket& w, bool exclude_precursor, double t_begin, double t_end) {
    double s = 0.0;
    const auto& g = w.grid();
    for (std::size_t k = 0; k < w.size(); ++k) {
        double t = g.at(k);
        if (t < t_begin || t > t_end) continue;
        if (exclude_precursor && w.is_precursor(k)) continue;
        s += w.intensity(k);
    }
    return s * g.dt;
}

Wavepacket resample(const Wavepacket& w, const TimeGrid& target) {
    std::vector<cplx> amp(target.n);
    std::vector<std::uint8_t> mask;
    if (w.has_mask()) mask.assign(target.n, 0);
    const auto& g = w.grid();
    for (std::size_t k = 0; k < target.n; ++k) {
        double t = target.at(k);
        amp[k] = w.sample(t);
        if (w.has_mask()) {
            double u = std::round((t - g.t_start) / g.dt);
            if (u >= 0.0 && u < static_cast<double>(g.n)) mask[k] = w.is_precursor(static_cast<std::size_t>(u));
        }
    }
    return Wavepacket(target, std::move(amp), std::move(mask));
}

}  // namespace eitmem
