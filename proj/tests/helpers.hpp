#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "eitmem/wavepacket.hpp"

namespace testing {

using eitmem::cplx;

/// Unit-norm Gaussian amplitude with intensity exp(-(t - t0)^2 / (2 sigma^2)).
inline eitmem::Wavepacket gaussian_packet(const eitmem::TimeGrid& g, double t0, double sigma, cplx phase = 1.0) {
    std::vector<cplx> a(g.n);
    double norm = 0.0;
    for (std::size_t k = 0; k < g.n; ++k) {
        const double u = (g.at(k) - t0) / sigma;
        a[k] = std::exp(-0.25 * u * u);
        norm += std::norm(a[k]) * g.dt;
    }
    for (auto& v : a) v *= phase / std::sqrt(norm);
    return eitmem::Wavepacket(g, std::move(a));
}

inline double relative_l2(const eitmem::Wavepacket& a, const eitmem::Wavepacket& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        num += std::norm(a.amplitude()[k] - b.amplitude()[k]);
        den += std::norm(b.amplitude()[k]);
    }
    return std::sqrt(num / den);
}

}  // namespace testing
