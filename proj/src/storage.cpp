#include "eitmem/storage.hpp"

#include <algorithm>
#include <cmath>

#include "eitmem/errors.hpp"
#include "eitmem/least_squares.hpp"
#include "eitmem/spectral.hpp"

namespace eitmem {

void DecayModel::validate() const {
    if ((kind == Kind::gaussian || kind == Kind::combined) && !(tau0 > 0.0))
        throw config_error("gaussian decay needs tau0 > 0");
    if (!(gamma12 >= 0.0)) throw config_error("decay gamma12 must be >= 0");
}

double storage_decay_factor(const DecayModel& d, double t) {
    double f = 1.0;
    if (d.kind != DecayModel::Kind::gaussian) f *= std::exp(-d.gamma12 * t);
    if (d.kind != DecayModel::Kind::exponential) f *= std::exp(-0.5 * t * t / (d.tau0 * d.tau0));
    return f;
}

double storage_decay_rate(const DecayModel& d, double t) {
    double r = 0.0;
    if (d.kind != DecayModel::Kind::gaussian) r += d.gamma12;
    if (d.kind != DecayModel::Kind::exponential) r += t / (d.tau0 * d.tau0);
    return r;
}

std::vector<cplx> apply_storage_decay(std::span<const cplx> spin, double elapsed, const DecayModel& decay) {
    if (elapsed < 0.0) throw config_error("storage decay: elapsed time must be >= 0");
    const double f = storage_decay_factor(decay, elapsed);
    std::vector<cplx> out(spin.begin(), spin.end());
    for (auto& s : out) s *= f;
    return out;
}

double storage_efficiency(const Wavepacket& input, const Wavepacket& output, TimeWindow w) {
    const double den = wavepacket_norm(input, true);
    if (!(den > 0.0)) throw numerical_error("storage efficiency undefined: input carries no probability");
    return wavepacket_norm(output, true, w.begin, w.end) / den;
}

namespace {

std::vector<double> sqrt_counts(const Wavepacket& w) {
    std::vector<double> a(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) a[k] = w.is_precursor(k) ? 0.0 : std::abs(w.amplitude()[k]);
    return a;
}

std::pair<std::size_t, std::size_t> support(const std::vector<double>& a) {
    std::size_t lo = 0, hi = a.size();
    while (lo < hi && a[lo] == 0.0) ++lo;
    while (hi > lo && a[hi - 1] == 0.0) --hi;
    return {lo, hi};
}

}  // namespace

LikenessResult waveform_likeness(const Wavepacket& in, const Wavepacket& out_raw) {
    const double dt = in.grid().dt;
    Wavepacket out = out_raw;
    if (std::abs(out_raw.grid().dt - dt) > 1e-12 * dt) {
        const auto& g = out_raw.grid();
        out = resample(out_raw, TimeGrid::covering(g.t_start, g.t_end(), dt));
    }
    const auto a = sqrt_counts(in);
    const auto b = sqrt_counts(out);
    double na = 0.0, nb = 0.0;
    for (double v : a) na += v * v;
    for (double v : b) nb += v * v;
    if (!(na > 0.0) || !(nb > 0.0)) throw numerical_error("waveform likeness undefined for a zero-norm packet");

    const auto [alo, ahi] = support(a);
    const auto [blo, bhi] = support(b);
    // Output sample k pairs with input sample k - d.
    const auto d_min = static_cast<long long>(blo) - static_cast<long long>(ahi) + 1;
    const auto d_max = static_cast<long long>(bhi) - static_cast<long long>(alo) - 1;
    double best = -1.0;
    long long best_d = 0;
    for (long long d = d_min; d <= d_max; ++d) {
        const long long k0 = std::max<long long>(static_cast<long long>(blo), static_cast<long long>(alo) + d);
        const long long k1 = std::min<long long>(static_cast<long long>(bhi), static_cast<long long>(ahi) + d);
        double s = 0.0;
        for (long long k = k0; k < k1; ++k) s += a[static_cast<std::size_t>(k - d)] * b[static_cast<std::size_t>(k)];
        if (s > best) {
            best = s;
            best_d = d;
        }
    }
    LikenessResult r;
    r.likeness = std::min(1.0, best * best / (na * nb));
    r.optimal_delay = out.grid().t_start - in.grid().t_start + static_cast<double>(best_d) * dt;
    return r;
}

double mirror_likeness(const Wavepacket& in, const Wavepacket& out) {
    std::vector<cplx> rev(out.amplitude().rbegin(), out.amplitude().rend());
    std::vector<std::uint8_t> mask(out.precursor_mask().rbegin(), out.precursor_mask().rend());
    TimeGrid g = out.grid();
    g.t_start = -g.t_end();
    return waveform_likeness(in, Wavepacket(g, std::move(rev), std::move(mask))).likeness;
}

Wavepacket source_packet(const SourceParams& source, double dt) {
    return generate_heralded_waveform(source, source_grid(source, dt));
}

namespace {

Wavepacket extend_to(const Wavepacket& w, double t_end) {
    const auto& g = w.grid();
    if (g.t_end() >= t_end) return w;
    TimeGrid ng = TimeGrid::covering(g.t_start, t_end, g.dt);
    std::vector<cplx> amp(ng.n);
    std::copy(w.amplitude().begin(), w.amplitude().end(), amp.begin());
    std::vector<std::uint8_t> mask;
    if (w.has_mask()) {
        mask.assign(ng.n, 0);
        std::copy(w.precursor_mask().begin(), w.precursor_mask().end(), mask.begin());
    }
    return Wavepacket(ng, std::move(amp), std::move(mask));
}

Wavepacket windowed(const Wavepacket& w, TimeWindow win) {
    std::vector<cplx> amp(w.amplitude().begin(), w.amplitude().end());
    for (std::size_t k = 0; k < amp.size(); ++k) {
        double t = w.grid().at(k);
        if (t < win.begin || t > win.end || w.is_precursor(k)) amp[k] = 0.0;
    }
    return Wavepacket(w.grid(), std::move(amp), {w.precursor_mask().begin(), w.precursor_mask().end()});
}

double readout_tail(const Wavepacket& packet, const EnsembleParams& ens, double omega) {
    const double delay = omega > 0.0 ? group_delay(ens, omega) : 0.0;
    return 2.0 * delay + 3.0 * packet.intensity_fwhm();
}

}  // namespace

StorageResult run_slow_light(const Wavepacket& packet, const EnsembleParams& ens, double omega_c,
                             const SolverConfig& cfg) {
    const double tail = packet.peak_time() + readout_tail(packet, ens, omega_c);
    Wavepacket in = extend_to(packet, tail);
    const auto ctrl = ControlProfile::constant(omega_c);
    auto prop = propagate(in, ens, ctrl, cfg);
    StorageResult r;
    r.control = ctrl;
    r.se = storage_efficiency(in, prop.output);
    r.slow_light_efficiency = r.se;
    r.delay = prop.output.peak_time() - in.peak_time();
    r.retrieved = windowed(prop.output, {});
    auto like = waveform_likeness(in, r.retrieved);
    r.likeness = like.likeness;
    r.optimal_delay = like.optimal_delay;
    r.input = std::move(in);
    r.output = std::move(prop.output);
    return r;
}

StorageResult run_slow_light(const SourceParams& source, const EnsembleParams& ens, double omega_c,
                             const SolverConfig& cfg, double dt) {
    return run_slow_light(source_packet(source, dt), ens, omega_c, cfg);
}

double default_switch_off(const Wavepacket& packet, const EnsembleParams& ens, double omega_c) {
    return packet.peak_time() + 0.5 * group_delay(ens, omega_c);
}

StorageResult run_storage(const Wavepacket& packet, const EnsembleParams& ens, const ControlProfile& ctrl,
                          const DecayModel& decay, const SolverConfig& cfg, const StorageOptions& opts) {
    ctrl.validate();
    decay.validate();
    if (ctrl.is_constant()) throw config_error("storage run needs a switched control profile");
    const double t_end = ctrl.on_time + 0.5 * ctrl.edge_width() + readout_tail(packet, ens, ctrl.omega_peak);
    Wavepacket in = extend_to(packet, t_end);

    PropagationHooks hooks;
    hooks.spin_dephasing = [&](double t, double omega) {
        if (t >= ctrl.off_time && t <= ctrl.on_time) return storage_decay_rate(decay, t - ctrl.off_time);
        return effective_dephasing(ens, omega);
    };
    auto prop = propagate(in, ens, ctrl, cfg, hooks);

    StorageResult r;
    r.control = ctrl;
    r.storage_time = ctrl.storage_time();
    // An empty medium stores nothing, so all transmitted light is counted.
    const bool unbounded = opts.unbounded_window || ens.od == 0.0;
    r.retrieval_window = unbounded ? TimeWindow{} : TimeWindow{ctrl.on_time, in.grid().t_end()};
    r.se = storage_efficiency(in, prop.output, r.retrieval_window);
    r.retrieved = windowed(prop.output, r.retrieval_window);
    r.delay = prop.output.peak_time() - in.peak_time();
    if (wavepacket_norm(r.retrieved, true) > 0.0) {
        auto like = waveform_likeness(in, r.retrieved);
        r.likeness = like.likeness;
        r.optimal_delay = like.optimal_delay;
    }
    if (opts.measure_slow_light) r.slow_light_efficiency = run_slow_light(in, ens, ctrl.omega_peak, cfg).se;
    r.input = std::move(in);
    r.output = std::move(prop.output);
    return r;
}

DecayFit fit_gaussian_decay(std::span<const DecayPoint> points) {
    if (points.size() < 4) throw config_error("decay fit needs at least 4 points");
    double t_max = 0.0, se_max = 0.0;
    for (const auto& p : points) {
        if (!(p.t >= 0.0)) throw config_error("decay fit: storage times must be >= 0");
        if (p.sigma < 0.0) throw config_error("decay fit: sigma must be >= 0");
        t_max = std::max(t_max, p.t);
        se_max = std::max(se_max, p.se);
    }
    if (!(t_max > 0.0)) throw config_error("decay fit: all storage times are zero");

    // Work with x = t / t_max and u = t_max^2 / tau0^2 so both parameters are O(1).
    const auto m = static_cast<Eigen::Index>(points.size());
    auto weight = [&](const DecayPoint& p) { return p.sigma > 0.0 ? 1.0 / p.sigma : 1.0; };
    ResidualFn residuals = [&](const Eigen::VectorXd& q) {
        Eigen::VectorXd r(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& p = points[static_cast<std::size_t>(i)];
            const double x = p.t / t_max;
            r[i] = (q[0] * std::exp(-q[1] * x * x) - p.se) * weight(p);
        }
        return r;
    };

    // Initial guess from a linear fit of ln(se) against x^2.
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (const auto& p : points) {
        if (!(p.se > 0.0)) continue;
        const double x = (p.t / t_max) * (p.t / t_max), y = std::log(p.se);
        sx += x, sy += y, sxx += x * x, sxy += x * y, n += 1;
    }
    Eigen::VectorXd q0(2);
    q0 << se_max, 0.1;
    if (n >= 2 && n * sxx - sx * sx > 0.0) {
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        q0 << std::exp((sy - slope * sx) / n), std::max(-slope, 1e-6);
    }

    LeastSquaresResult fit = levenberg_marquardt(residuals, q0);
    DecayFit out;
    out.se0 = fit.params[0];
    const double u = fit.params[1];
    out.report.residual_norm = std::sqrt(fit.cost);
    out.report.iterations = fit.iterations;
    out.report.converged = fit.converged;
    for (Eigen::Index i = 0; i < m; ++i) out.report.residuals.push_back(fit.residuals[i] / weight(points[static_cast<std::size_t>(i)]));
    if (u <= 1e-9) {
        out.tau0 = std::numeric_limits<double>::infinity();
        out.report.unbounded = true;
        out.report.tau0_halfwidth = std::numeric_limits<double>::infinity();
        return out;
    }
    out.tau0 = t_max / std::sqrt(u);
    const Eigen::MatrixXd cov = fit.covariance();
    const double su = std::sqrt(std::max(0.0, cov(1, 1)));
    // tau0 = t_max u^{-1/2}: d tau0 / du = -tau0 / (2 u).
    out.report.tau0_halfwidth = 1.959963984540054 * out.tau0 * su / (2.0 * u);
    return out;
}

double storage_time_at(double se_target, double tau0, double se0) {
    if (!(se_target > 0.0) || !(se_target < se0)) throw numerical_error("storage_time_at: target efficiency is not reached");
    return tau0 * std::sqrt(std::log(se0 / se_target));
}

double fractional_delay(double storage_time, double input_fwhm) {
    if (!(input_fwhm > 0.0)) throw config_error("fractional delay needs a positive FWHM");
    return storage_time / input_fwhm;
}

}  // namespace eitmem
