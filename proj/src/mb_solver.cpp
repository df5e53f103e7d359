#include "eitmem/mb_solver.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>

#include "eitmem/errors.hpp"

namespace eitmem {

namespace {

constexpr double kStepBudget = 0.02;

inline cplx times_i(cplx a) { return {-a.imag(), a.real()}; }

std::size_t min_planes(const EnsembleParams& ens) {
    return std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(2.0 * ens.od)));
}

/// Courant-1 step of the full transport scheme in 1/gamma13.
double characteristic_step(const EnsembleParams& ens, std::size_t n_z) {
    double transit = ens.length / ens.c0 / UnitSystem::time_unit * ens.gamma13;
    return transit / static_cast<double>(n_z - 1);
}

/// Spatially discretised system. Polarisation and spin are scaled by g sqrt(N)
/// so that the field equation reads d eps / d zeta = i OD x on zeta in [0, 1].
class MediumModel {
public:
    MediumModel(const EnsembleParams& ens, std::size_t n_z)
        : ens_(ens), n_z_(n_z), h_(1.0 / static_cast<double>(n_z - 1)), eps_(n_z) {}

    std::size_t size() const { return n_z_; }

    /// Retarded-frame field: trapezoidal cumulative integral of x along zeta.
    void field_from(std::span<const cplx> x, cplx boundary, std::span<cplx> eps) const {
        const double c = 0.5 * ens_.od * h_;
        eps[0] = boundary;
        for (std::size_t j = 1; j < n_z_; ++j) eps[j] = eps[j - 1] + c * times_i(x[j - 1] + x[j]);
    }

    cplx field_end(std::span<const cplx> x, cplx boundary) const {
        const double c = 0.5 * ens_.od * h_;
        cplx acc{};
        for (std::size_t j = 1; j < n_z_; ++j) acc += x[j - 1] + x[j];
        return boundary + c * times_i(acc);
    }

    void bloch_rhs(std::span<const cplx> x, std::span<const cplx> y, std::span<const cplx> eps, double omega,
                   double gamma_s, std::span<cplx> dx, std::span<cplx> dy) const {
        const double g13 = ens_.gamma13;
        const double ho = 0.5 * omega;
        for (std::size_t j = 0; j < n_z_; ++j) {
            dx[j] = -g13 * x[j] + times_i(0.5 * eps[j] + ho * y[j]);
            dy[j] = -gamma_s * y[j] + times_i(ho * x[j]);
        }
    }

    /// Retarded frame: eps follows x instantaneously.
    void rhs(std::span<const cplx> x, std::span<const cplx> y, cplx boundary, double omega, double gamma_s,
             std::span<cplx> dx, std::span<cplx> dy) {
        field_from(x, boundary, eps_);
        bloch_rhs(x, y, eps_, omega, gamma_s, dx, dy);
    }

    double h() const { return h_; }

private:
    const EnsembleParams& ens_;
    std::size_t n_z_;
    double h_;
    std::vector<cplx> eps_;
};

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

[[noreturn]] void instability(std::size_t step, double t) {
    std::ostringstream os;
    os << "numerical instability at step " << step << " (t = " << t << ")";
    throw numerical_error(os.str());
}

FieldState snapshot(const EnsembleParams& ens, double t, std::span<const cplx> eps, std::span<const cplx> x,
                    std::span<const cplx> y) {
    FieldState s;
    s.t = t;
    const std::size_t n = x.size();
    s.z_grid.resize(n);
    for (std::size_t j = 0; j < n; ++j) s.z_grid[j] = ens.length * static_cast<double>(j) / static_cast<double>(n - 1);
    s.eps.assign(eps.begin(), eps.end());
    s.pol.assign(x.begin(), x.end());
    s.spin.assign(y.begin(), y.end());
    return s;
}

PropagationResult propagate_retarded(const Wavepacket& input, const EnsembleParams& ens, const ControlProfile& ctrl,
                                     const SolverConfig& cfg, const PropagationHooks& hooks) {
    const auto& grid = input.grid();
    const std::size_t nz = cfg.n_z;
    const auto n_sub = static_cast<std::size_t>(std::llround(grid.dt / cfg.dt));
    const double dt = grid.dt / static_cast<double>(n_sub);

    MediumModel model(ens, nz);
    std::vector<cplx> x(nz), y(nz), xs(nz), ys(nz), eps(nz);
    std::vector<cplx> kx1(nz), kx2(nz), kx3(nz), kx4(nz), ky1(nz), ky2(nz), ky3(nz), ky4(nz);

    auto dephasing = [&](double t, double omega) {
        return hooks.spin_dephasing ? hooks.spin_dephasing(t, omega) : effective_dephasing(ens, omega);
    };

    std::vector<cplx> out(grid.n);
    PropagationResult result;
    result.config = cfg;
    std::size_t step = 0;
    for (std::size_t k = 0; k < grid.n; ++k) {
        const double tk = grid.at(k);
        out[k] = model.field_end(x, input.amplitude()[k]);
        if (!finite(out[k])) instability(step, tk);
        if (cfg.trace_stride > 0 && k % cfg.trace_stride == 0) {
            model.field_from(x, input.amplitude()[k], eps);
            result.trace.push_back(snapshot(ens, tk, eps, x, y));
        }
        if (k + 1 == grid.n) break;
        for (std::size_t s = 0; s < n_sub; ++s, ++step) {
            const double t0 = tk + static_cast<double>(s) * dt;
            const double th = t0 + 0.5 * dt;
            const double t1 = (s + 1 == n_sub) ? grid.at(k + 1) : t0 + dt;
            const double o0 = evaluate_control(ctrl, t0), oh = evaluate_control(ctrl, th), o1 = evaluate_control(ctrl, t1);
            const double g0 = dephasing(t0, o0), gh = dephasing(th, oh), g1 = dephasing(t1, o1);
            const cplx b0 = input.sample(t0), bh = input.sample(th), b1 = input.sample(t1);

            model.rhs(x, y, b0, o0, g0, kx1, ky1);
            for (std::size_t j = 0; j < nz; ++j) {
                xs[j] = x[j] + 0.5 * dt * kx1[j];
                ys[j] = y[j] + 0.5 * dt * ky1[j];
            }
            model.rhs(xs, ys, bh, oh, gh, kx2, ky2);
            for (std::size_t j = 0; j < nz; ++j) {
                xs[j] = x[j] + 0.5 * dt * kx2[j];
                ys[j] = y[j] + 0.5 * dt * ky2[j];
            }
            model.rhs(xs, ys, bh, oh, gh, kx3, ky3);
            for (std::size_t j = 0; j < nz; ++j) {
                xs[j] = x[j] + dt * kx3[j];
                ys[j] = y[j] + dt * ky3[j];
            }
            model.rhs(xs, ys, b1, o1, g1, kx4, ky4);
            const double w = dt / 6.0;
            for (std::size_t j = 0; j < nz; ++j) {
                x[j] += w * (kx1[j] + 2.0 * kx2[j] + 2.0 * kx3[j] + kx4[j]);
                y[j] += w * (ky1[j] + 2.0 * ky2[j] + 2.0 * ky3[j] + ky4[j]);
            }
        }
    }
    std::vector<std::uint8_t> mask(input.precursor_mask().begin(), input.precursor_mask().end());
    result.output = Wavepacket(grid, std::move(out), std::move(mask));
    return result;
}

/// Full transport (d_tau + c d_z) eps = i g sqrt(N) P along characteristics
/// with Courant number one; atomic variables advance by Heun's method.
PropagationResult propagate_transport(const Wavepacket& input, const EnsembleParams& ens,
                                      const ControlProfile& ctrl, const SolverConfig& cfg,
                                      const PropagationHooks& hooks) {
    const auto& grid = input.grid();
    const std::size_t nz = cfg.n_z;
    const double dt = cfg.dt;
    MediumModel model(ens, nz);
    const double c = 0.5 * ens.od * model.h();

    std::vector<cplx> x(nz), y(nz), eps(nz), xp(nz), yp(nz), epsp(nz), kx1(nz), ky1(nz), kx2(nz), ky2(nz);
    auto dephasing = [&](double t, double omega) {
        return hooks.spin_dephasing ? hooks.spin_dephasing(t, omega) : effective_dephasing(ens, omega);
    };
    auto advect = [&](std::span<const cplx> x_new, cplx boundary, std::span<cplx> target) {
        target[0] = boundary;
        for (std::size_t j = 1; j < nz; ++j) target[j] = eps[j - 1] + c * times_i(x[j - 1] + x_new[j]);
    };

    std::vector<cplx> out(grid.n);
    PropagationResult result;
    result.config = cfg;
    double t = grid.t_start;
    eps[0] = input.sample(t);
    cplx end_prev = eps[nz - 1];
    std::size_t k = 0;
    out[k++] = end_prev;
    std::size_t step = 0;
    while (k < grid.n) {
        const double t1 = t + dt;
        const double o0 = evaluate_control(ctrl, t), o1 = evaluate_control(ctrl, t1);
        const double g0 = dephasing(t, o0), g1 = dephasing(t1, o1);
        model.bloch_rhs(x, y, eps, o0, g0, kx1, ky1);
        for (std::size_t j = 0; j < nz; ++j) {
            xp[j] = x[j] + dt * kx1[j];
            yp[j] = y[j] + dt * ky1[j];
        }
        advect(xp, input.sample(t1), epsp);
        model.bloch_rhs(xp, yp, epsp, o1, g1, kx2, ky2);
        for (std::size_t j = 0; j < nz; ++j) {
            xp[j] = x[j] + 0.5 * dt * (kx1[j] + kx2[j]);
            yp[j] = y[j] + 0.5 * dt * (ky1[j] + ky2[j]);
        }
        advect(xp, input.sample(t1), epsp);
        x.swap(xp);
        y.swap(yp);
        eps.swap(epsp);
        ++step;
        const cplx end_now = eps[nz - 1];
        if (!finite(end_now)) instability(step, t1);
        while (k < grid.n && grid.at(k) <= t1 + 1e-12) {
            double f = (grid.at(k) - t) / dt;
            out[k] = end_prev * (1.0 - f) + end_now * f;
            if (cfg.trace_stride > 0 && k % cfg.trace_stride == 0) result.trace.push_back(snapshot(ens, t1, eps, x, y));
            ++k;
        }
        end_prev = end_now;
        t = t1;
    }
    std::vector<std::uint8_t> mask(input.precursor_mask().begin(), input.precursor_mask().end());
    result.output = Wavepacket(grid, std::move(out), std::move(mask));
    return result;
}

}  // namespace

double effective_dephasing(const EnsembleParams& ens, double omega_c2) {
    const double bo = ens.beta * omega_c2;
    return ens.gamma12 + ens.gamma13 * bo * bo / (4.0 * ens.delta_s * ens.delta_s);
}

double rms_bandwidth(const Wavepacket& w) {
    const auto a = w.amplitude();
    const double dt = w.grid().dt;
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (w.is_precursor(k)) continue;
        den += std::norm(a[k]);
        if (k + 1 < a.size() && !w.is_precursor(k + 1)) num += std::norm((a[k + 1] - a[k]) / dt);
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

double max_solver_step(const EnsembleParams& ens, const ControlProfile& ctrl, const Wavepacket& input) {
    double fastest = std::max({ctrl.omega_peak, ens.gamma13, rms_bandwidth(input)});
    return kStepBudget / fastest;
}

SolverConfig resolve_solver_config(SolverConfig cfg, const EnsembleParams& ens, const ControlProfile& ctrl,
                                   const Wavepacket& input) {
    ens.validate();
    ctrl.validate();
    const std::size_t planes = min_planes(ens);
    if (cfg.n_z == 0) cfg.n_z = planes + 1;
    if (cfg.n_z < planes) {
        std::ostringstream os;
        os << "n_z = " << cfg.n_z << " below the resolution floor max(64, 2 OD) = " << planes;
        throw config_error(os.str());
    }
    const double limit = max_solver_step(ens, ctrl, input);
    if (cfg.adiabatic_field) {
        const double grid_dt = input.grid().dt;
        if (cfg.dt == 0.0) cfg.dt = grid_dt / std::ceil(grid_dt / limit - 1e-12);
        if (!(cfg.dt > 0.0) || cfg.dt > limit * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "solver step " << cfg.dt << " exceeds the stability limit " << limit;
            throw config_error(os.str());
        }
        double ratio = grid_dt / cfg.dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-6)
            throw config_error("solver step must divide the input grid step");
    } else {
        const double courant = characteristic_step(ens, cfg.n_z);
        if (cfg.dt == 0.0) cfg.dt = courant;
        if (std::abs(cfg.dt - courant) > 1e-9 * courant) {
            std::ostringstream os;
            os << "transport scheme requires the CFL step " << courant << ", got " << cfg.dt;
            throw config_error(os.str());
        }
        if (cfg.dt > limit) throw config_error("CFL step exceeds the atomic stability limit");
    }
    return cfg;
}

PropagationResult propagate(const Wavepacket& input, const EnsembleParams& ens, const ControlProfile& ctrl,
                            const SolverConfig& cfg, const PropagationHooks& hooks) {
    SolverConfig resolved = resolve_solver_config(cfg, ens, ctrl, input);
    return resolved.adiabatic_field ? propagate_retarded(input, ens, ctrl, resolved, hooks)
                                    : propagate_transport(input, ens, ctrl, resolved, hooks);
}

}  // namespace eitmem
