#include "eitmem/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include "eitmem/errors.hpp"

namespace eitmem {

namespace {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results land in index
/// order, so the outcome does not depend on scheduling.
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, const std::function<T(std::size_t)>& fn,
                            std::vector<std::exception_ptr>& errors) {
    std::vector<T> out(n);
    errors.assign(n, nullptr);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (workers == 1) {
        worker();
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return out;
}

std::string what_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown error";
    }
}

double storage_se(const Wavepacket& packet, const EnsembleParams& ens, double omega, double t_off,
                  const StorageScenario& scenario, const SolverConfig& cfg) {
    auto ctrl = ControlProfile::store(omega, t_off, scenario.storage_time);
    return run_storage(packet, ens, ctrl, scenario.decay, cfg).se;
}

std::vector<double> log_space(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
        v[i] = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
    }
    return v;
}

}  // namespace

TimedEfficiency best_switch_off(const Wavepacket& packet, const EnsembleParams& ens, double omega,
                                const StorageScenario& scenario, const SolverConfig& cfg,
                                const OptimizerOptions& opts) {
    if (opts.t_off_offsets.empty()) throw config_error("optimizer needs at least one switch-off offset");
    const double base = default_switch_off(packet, ens, omega);
    const double fwhm = packet.intensity_fwhm();
    std::vector<double> offs = opts.t_off_offsets;
    std::sort(offs.begin(), offs.end());
    std::vector<double> se(offs.size());
    for (std::size_t i = 0; i < offs.size(); ++i) se[i] = storage_se(packet, ens, omega, base + offs[i] * fwhm, scenario, cfg);
    const auto ib = static_cast<std::size_t>(std::max_element(se.begin(), se.end()) - se.begin());
    TimedEfficiency best{se[ib], base + offs[ib] * fwhm};
    if (ib > 0 && ib + 1 < offs.size()) {
        // Vertex of the parabola through the best point and its neighbours.
        const double x0 = offs[ib - 1], x1 = offs[ib], x2 = offs[ib + 1];
        const double y0 = se[ib - 1], y1 = se[ib], y2 = se[ib + 1];
        const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
        const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
        if (den != 0.0) {
            const double xv = x1 - 0.5 * num / den;
            if (xv > x0 && xv < x2) {
                const double t = base + xv * fwhm;
                const double v = storage_se(packet, ens, omega, t, scenario, cfg);
                if (v > best.se) best = {v, t};
            }
        }
    }
    return best;
}

ControlOptimum optimize_control(double od, const EnsembleParams& ens_template, const Wavepacket& packet,
                                const OmegaBounds& bounds, const StorageScenario& scenario,
                                const SolverConfig& cfg, const OptimizerOptions& opts) {
    if (!(bounds.min > 0.0) || !(bounds.max > bounds.min) || !std::isfinite(bounds.max))
        throw config_error("Omega bounds must satisfy 0 < min < max < inf");
    if (opts.coarse_points < 3) throw config_error("optimizer needs at least 3 coarse points");
    EnsembleParams ens = ens_template;
    ens.od = od;
    ens.validate();

    auto eval = [&](double omega) { return best_switch_off(packet, ens, omega, scenario, cfg, opts); };

    ControlOptimum res;
    res.coarse_omega = log_space(bounds.min, bounds.max, opts.coarse_points);
    std::vector<std::exception_ptr> errors;
    auto coarse = parallel_map<TimedEfficiency>(
        res.coarse_omega.size(), opts.jobs, [&](std::size_t i) { return eval(res.coarse_omega[i]); }, errors);
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    for (const auto& c : coarse) res.coarse_se.push_back(c.se);

    const std::size_t n = coarse.size();
    const auto ib = static_cast<std::size_t>(std::max_element(res.coarse_se.begin(), res.coarse_se.end()) - res.coarse_se.begin());
    res.omega_opt = res.coarse_omega[ib];
    res.se_opt = coarse[ib].se;
    res.t_off_opt = coarse[ib].t_off;

    if (ib == 0 || ib + 1 == n) {
        res.boundary_optimum = true;
        res.warning = "optimum at an Omega bound";
    } else {
        // Golden section in log(Omega) on the coarse bracket.
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = std::log(res.coarse_omega[ib - 1]), b = std::log(res.coarse_omega[ib + 1]);
        double c = b - phi * (b - a), d = a + phi * (b - a);
        TimedEfficiency fc = eval(std::exp(c)), fd = eval(std::exp(d));
        auto consider = [&](double x, const TimedEfficiency& f) {
            if (f.se > res.se_opt) {
                res.se_opt = f.se;
                res.omega_opt = std::exp(x);
                res.t_off_opt = f.t_off;
            }
        };
        consider(c, fc);
        consider(d, fd);
        while (b - a > opts.omega_rel_tol) {
            if (fc.se >= fd.se) {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = eval(std::exp(c));
                consider(c, fc);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = eval(std::exp(d));
                consider(d, fd);
            }
        }
    }

    // Plateau edges: where the t_off-optimised SE falls plateau_drop below the optimum.
    const double thr = res.se_opt - opts.plateau_drop;
    auto edge = [&](bool upward) {
        std::size_t i = ib;
        double inside = std::log(res.omega_opt);
        for (;;) {
            if (upward ? i + 1 >= n : i == 0) return upward ? bounds.max : bounds.min;
            i = upward ? i + 1 : i - 1;
            const double w = res.coarse_omega[i];
            if (upward ? w <= res.omega_opt : w >= res.omega_opt) continue;
            if (res.coarse_se[i] < thr) break;
            inside = std::log(w);
        }
        double outside = std::log(res.coarse_omega[i]);
        for (int k = 0; k < opts.plateau_bisections; ++k) {
            const double mid = 0.5 * (inside + outside);
            (eval(std::exp(mid)).se >= thr ? inside : outside) = mid;
        }
        return std::exp(0.5 * (inside + outside));
    };
    res.plateau_low = edge(false);
    res.plateau_high = edge(true);
    res.plateau_halfwidth = 0.5 * (res.plateau_high - res.plateau_low);
    return res;
}

ScanResult scan_optical_depth(const std::vector<double>& ods, const EnsembleParams& ens_template,
                              const Wavepacket& packet, const OmegaBounds& bounds, const StorageScenario& scenario,
                              const SolverConfig& cfg, const OptimizerOptions& opts) {
    for (double od : ods)
        if (!(od >= 0.0 && od <= 300.0)) throw config_error("OD scan values must lie in [0, 300]");
    ScanResult r;
    r.axis_name = "od";
    r.axis = ods;
    OptimizerOptions inner = opts;
    inner.jobs = 1;
    std::vector<std::exception_ptr> errors;
    auto points = parallel_map<ControlOptimum>(
        ods.size(), opts.jobs,
        [&](std::size_t i) { return optimize_control(ods[i], ens_template, packet, bounds, scenario, cfg, inner); },
        errors);
    for (std::size_t i = 0; i < ods.size(); ++i) {
        const bool failed = errors[i] != nullptr;
        const auto& p = points[i];
        r.se.push_back(failed ? std::nan("") : p.se_opt);
        r.optimal_omega.push_back(failed ? std::nan("") : p.omega_opt);
        r.omega_halfwidth.push_back(failed ? std::nan("") : p.plateau_halfwidth);
        r.t_off.push_back(failed ? std::nan("") : p.t_off_opt);
        r.failed.push_back(failed);
        r.notes.push_back(failed ? what_of(errors[i]) : p.warning);
    }
    r.meta["storage_time"] = scenario.storage_time;
    r.meta["gamma12"] = ens_template.gamma12;
    r.meta["omega_min"] = bounds.min;
    r.meta["omega_max"] = bounds.max;
    return r;
}

ScanResult scan_control(const std::vector<double>& omegas, const EnsembleParams& ens, const Wavepacket& packet,
                        const StorageScenario& scenario, const SolverConfig& cfg, const OptimizerOptions& opts) {
    ScanResult r;
    r.axis_name = "omega";
    r.axis = omegas;
    std::vector<std::exception_ptr> errors;
    auto points = parallel_map<TimedEfficiency>(
        omegas.size(), opts.jobs,
        [&](std::size_t i) { return best_switch_off(packet, ens, omegas[i], scenario, cfg, opts); }, errors);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const bool failed = errors[i] != nullptr;
        r.se.push_back(failed ? std::nan("") : points[i].se);
        r.t_off.push_back(failed ? std::nan("") : points[i].t_off);
        r.failed.push_back(failed);
        r.notes.push_back(failed ? what_of(errors[i]) : "");
    }
    r.meta["od"] = ens.od;
    r.meta["storage_time"] = scenario.storage_time;
    return r;
}

ScanResult scan_storage_time(const std::vector<double>& times, const EnsembleParams& ens, double omega,
                             const Wavepacket& packet, const DecayModel& decay, const SolverConfig& cfg,
                             double t_off, unsigned jobs) {
    for (double t : times)
        if (!(t >= 0.0)) throw config_error("storage times must be >= 0");
    if (!std::isfinite(t_off)) t_off = default_switch_off(packet, ens, omega);
    ScanResult r;
    r.axis_name = "storage_time";
    r.axis = times;
    std::vector<std::exception_ptr> errors;
    auto se = parallel_map<double>(
        times.size(), jobs,
        [&](std::size_t i) {
            return run_storage(packet, ens, ControlProfile::store(omega, t_off, times[i]), decay, cfg).se;
        },
        errors);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const bool failed = errors[i] != nullptr;
        r.se.push_back(failed ? std::nan("") : se[i]);
        r.t_off.push_back(t_off);
        r.failed.push_back(failed);
        r.notes.push_back(failed ? what_of(errors[i]) : "");
    }
    r.meta["od"] = ens.od;
    r.meta["omega"] = omega;
    r.meta["t_off"] = t_off;
    return r;
}

}  // namespace eitmem
