#include "eitmem/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "eitmem/errors.hpp"
#include "eitmem/mb_solver.hpp"

namespace eitmem {

void TransmissionCurve::validate() const {
    if (detunings.size() != transmission.size()) throw config_error("transmission curve: length mismatch");
    for (std::size_t i = 1; i < detunings.size(); ++i)
        if (!(detunings[i] > detunings[i - 1])) throw config_error("transmission curve: detunings must increase strictly");
}

cplx transfer_function(double delta, const EnsembleParams& ens, double omega_c) {
    const cplx i{0.0, 1.0};
    const double g12 = effective_dephasing(ens, omega_c);
    cplx denom = ens.gamma13 - i * delta;
    if (omega_c > 0.0) {
        if (g12 == 0.0 && delta == 0.0) return {1.0, 0.0};
        denom += omega_c * omega_c / (4.0 * (g12 - i * delta));
    }
    return std::exp(-(0.5 * ens.od * ens.gamma13) / denom);
}

double group_delay(const EnsembleParams& ens, double omega_c) {
    const double h = 1e-6 * std::max(1e-3, std::min(1.0, omega_c * omega_c / std::max(ens.od, 1.0)));
    cplx hp = transfer_function(h, ens, omega_c);
    cplx hm = transfer_function(-h, ens, omega_c);
    return std::arg(hp / hm) / (2.0 * h);
}

TransmissionCurve eit_spectrum(const std::vector<double>& detunings, const EnsembleParams& ens, double omega_c) {
    TransmissionCurve c;
    c.detunings = detunings;
    c.transmission.reserve(detunings.size());
    for (double d : detunings) c.transmission.push_back(std::norm(transfer_function(d, ens, omega_c)));
    return c;
}

namespace {

struct FftwPlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

Wavepacket spectral_propagate(const Wavepacket& input, const EnsembleParams& ens, double omega_c) {
    const auto& grid = input.grid();
    const std::size_t n = next_pow2(4 * grid.n);
    std::vector<cplx> buf(n);
    std::copy(input.amplitude().begin(), input.amplitude().end(), buf.begin());
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    FftwPlan fwd(fftw_plan_dft_1d(static_cast<int>(n), data, data, FFTW_FORWARD, FFTW_ESTIMATE));
    FftwPlan bwd(fftw_plan_dft_1d(static_cast<int>(n), data, data, FFTW_BACKWARD, FFTW_ESTIMATE));
    fftw_execute(fwd.get());
    const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * grid.dt);
    for (std::size_t k = 0; k < n; ++k) {
        // FFTW bin k oscillates as e^{+i w t}; in the e^{-i delta t} convention delta = -w.
        const auto signed_k = static_cast<double>(k < n / 2 ? static_cast<long long>(k) : static_cast<long long>(k) - static_cast<long long>(n));
        buf[k] *= transfer_function(-signed_k * dw, ens, omega_c) / static_cast<double>(n);
    }
    fftw_execute(bwd.get());
    std::vector<cplx> out(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(grid.n));
    std::vector<std::uint8_t> mask(input.precursor_mask().begin(), input.precursor_mask().end());
    return Wavepacket(grid, std::move(out), std::move(mask));
}

EitFitResult fit_eit(const TransmissionCurve& curve, const EitFitGuess& guess, const EnsembleParams& ens) {
    curve.validate();
    if (curve.detunings.size() < 20) throw config_error("EIT fit needs at least 20 points");
    const auto [mn, mx] = std::minmax_element(curve.transmission.begin(), curve.transmission.end());
    if (*mx - *mn < 0.05) throw insufficient_signal("EIT curve has no absorption feature to fit");
    if (!(guess.od > 0.0 && guess.omega_c > 0.0)) throw config_error("EIT fit guess must have positive OD and Omega");

    const auto m = static_cast<Eigen::Index>(curve.detunings.size());
    ResidualFn residuals = [&](const Eigen::VectorXd& p) {
        EnsembleParams e = ens;
        e.od = std::exp(p[0]);
        e.gamma12 = p[2];
        const double omega = std::exp(p[1]);
        Eigen::VectorXd r(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto k = static_cast<std::size_t>(i);
            r[i] = std::norm(transfer_function(curve.detunings[k], e, omega)) - curve.transmission[k];
        }
        return r;
    };
    Eigen::VectorXd p0(3);
    p0 << std::log(guess.od), std::log(guess.omega_c), guess.gamma12;
    LeastSquaresOptions opt;
    opt.max_iterations = 300;
    LeastSquaresResult fit = levenberg_marquardt(residuals, p0, opt);

    EitFitResult out;
    out.od = std::exp(fit.params[0]);
    out.omega_c = std::exp(fit.params[1]);
    out.gamma12 = fit.params[2];
    out.report.residual_norm = std::sqrt(fit.cost);
    out.report.iterations = fit.iterations;
    out.report.converged = fit.converged;
    const Eigen::MatrixXd cov = fit.covariance();
    constexpr double z95 = 1.959963984540054;
    out.report.od_halfwidth = z95 * out.od * std::sqrt(std::max(0.0, cov(0, 0)));
    out.report.omega_halfwidth = z95 * out.omega_c * std::sqrt(std::max(0.0, cov(1, 1)));
    out.report.gamma12_halfwidth = z95 * std::sqrt(std::max(0.0, cov(2, 2)));
    return out;
}

}  // namespace eitmem
