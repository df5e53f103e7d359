#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace eitmem {

using cplx = std::complex<double>;

/// Uniform time grid: t_k = t_start + k dt, k in [0, n).
struct TimeGrid {
    double t_start = 0.0;
    double dt = 1.0;
    std::size_t n = 2;

    TimeGrid() = default;
    TimeGrid(double t_start, double dt, std::size_t n);

    /// Smallest grid with step dt covering [t_begin, t_end].
    static TimeGrid covering(double t_begin, double t_end, double dt);

    double at(std::size_t k) const { return t_start + static_cast<double>(k) * dt; }
    double t_end() const { return at(n - 1); }
    double duration() const { return t_end() - t_start; }
};

/// Photon amplitude psi(tau) on a TimeGrid. |psi|^2 dt summed over the grid
/// is the detection probability. An optional mask flags optical-precursor
/// samples, which never enter efficiency integrals.
class Wavepacket {
public:
    Wavepacket() = default;
    Wavepacket(TimeGrid grid, std::vector<cplx> amplitude, std::vector<std::uint8_t> precursor_mask = {});

    const TimeGrid& grid() const { return grid_; }
    std::span<const cplx> amplitude() const { return amplitude_; }
    std::span<cplx> amplitude() { return amplitude_; }
    std::size_t size() const { return amplitude_.size(); }

    bool has_mask() const { return !mask_.empty(); }
    bool is_precursor(std::size_t k) const { return !mask_.empty() && mask_[k] != 0; }
    std::span<const std::uint8_t> precursor_mask() const { return mask_; }

    double intensity(std::size_t k) const { return std::norm(amplitude_[k]); }

    /// Linear interpolation of the amplitude; zero outside the grid.
    cplx sample(double t) const;

    /// Index of the largest unmasked intensity sample.
    std::size_t peak_index() const;
    double peak_time() const { return grid_.at(peak_index()); }

    /// Intensity-weighted mean time over unmasked samples.
    double centroid() const;

    /// Full width at half maximum of the unmasked intensity, with linear
    /// interpolation at the two half-maximum crossings.
    double intensity_fwhm() const;

    Wavepacket scaled(cplx factor) const;
    Wavepacket shifted(double delay) const;

private:
    TimeGrid grid_;
    std::vector<cplx> amplitude_;
    std::vector<std::uint8_t> mask_;
};

/// Sum of |psi_k|^2 dt, optionally skipping precursor-masked samples.
double wavepacket_norm(const Wavepacket& w, bool exclude_precursor);

/// Same as wavepacket_norm restricted to samples with t in [t_begin, t_end].
double wavepacket_norm(const Wavepacket& w, bool exclude_precursor, double t_begin, double t_end);

/// Linear resampling onto another grid (zero outside the source grid).
/// The precursor mask follows nearest-sample assignment.
Wavepacket resample(const Wavepacket& w, const TimeGrid& target);

}  // namespace eitmem
