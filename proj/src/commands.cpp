#include "eitmem/commands.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "eitmem/csv.hpp"
#include "eitmem/errors.hpp"
#include "eitmem/spectral.hpp"
#include "eitmem/timetag_io.hpp"

namespace eitmem {

using nlohmann::json;

namespace {

double ns(double t) { return UnitSystem::to_ns(t); }

// Intensity per ns from an internal-unit amplitude.
double per_ns(double intensity) { return intensity * UnitSystem::from_ns(1.0); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::filesystem::path prepare(const RunConfig& c, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(c.out_dir, ec);
    if (ec) throw config_error("cannot create output directory " + c.out_dir.string() + ": " + ec.message());
    return c.out_dir / name;
}

void save_json(const RunConfig& c, const std::string& name, const json& j) {
    std::ofstream f(prepare(c, name), std::ios::trunc);
    if (!f) throw config_error("cannot write " + (c.out_dir / name).string());
    f << j.dump(2) << '\n';
}

Wavepacket to_ns_grid(const Wavepacket& w) {
    const auto& g = w.grid();
    std::vector<cplx> amp(w.amplitude().begin(), w.amplitude().end());
    std::vector<std::uint8_t> mask(w.precursor_mask().begin(), w.precursor_mask().end());
    return Wavepacket(TimeGrid(ns(g.t_start), ns(g.dt), g.n), std::move(amp), std::move(mask));
}

const char* axis_label(ScanAxis a) {
    switch (a) {
        case ScanAxis::od: return "od";
        case ScanAxis::omega: return "omega";
        case ScanAxis::storage_time: return "storage_time";
    }
    return "";
}

}  // namespace

Wavepacket configured_packet(const RunConfig& c) {
    if (c.pump == PumpShape::gaussian) return source_packet(c.source, c.dt);
    const double half = 0.5 * c.source.l1;
    PumpProfile flat = [half](double z) { return std::abs(z) <= half ? 1.0 : 0.0; };
    return generate_heralded_waveform(c.source, source_grid(c.source, c.dt), flat);
}

json cmd_waveform(const RunConfig& c) {
    c.validate();
    const Wavepacket w = configured_packet(c);
    CsvWriter csv("waveform", {"tau_ns", "intensity", "is_precursor"});
    for (std::size_t k = 0; k < w.size(); ++k)
        csv.add_row({ns(w.grid().at(k)), per_ns(w.intensity(k)), w.is_precursor(k) ? 1.0 : 0.0});
    csv.save(prepare(c, "waveform.csv"));

    const double fwhm = w.intensity_fwhm();
    json j;
    j["pump"] = c.pump == PumpShape::gaussian ? "gaussian" : "constant";
    j["fwhm_ns"] = ns(fwhm);
    j["tau0_ns"] = ns(fwhm) / (2.0 * std::sqrt(std::log(2.0)));
    j["tau0_model_ns"] = ns(source_tau0(c.source));
    j["group_delay_ns"] = ns(source_group_delay(c.source));
    j["peak_ns"] = ns(w.peak_time());
    j["norm"] = wavepacket_norm(w, false);
    j["precursor_norm"] = wavepacket_norm(w, false) - wavepacket_norm(w, true);
    j["samples"] = w.size();
    save_json(c, "waveform.json", j);
    return j;
}

json cmd_store(const RunConfig& c) {
    c.validate();
    const Wavepacket packet = configured_packet(c);
    const double omega = c.control.omega_peak;
    const double t_off = std::isnan(c.control.off_time) ? default_switch_off(packet, c.ensemble, omega) : c.control.off_time;
    const double storage = std::isnan(c.control.on_time) ? c.storage_time : c.control.on_time - t_off;
    const auto ctrl = ControlProfile::store(omega, t_off, storage, c.control.edge_10_90);

    const StorageResult slow = run_slow_light(packet, c.ensemble, omega, c.solver);
    StorageOptions opts;
    opts.unbounded_window = c.unbounded_window;
    const StorageResult st = run_storage(packet, c.ensemble, ctrl, c.decay, c.solver, opts);

    const TimeGrid& g = st.output.grid();
    const Wavepacket input = resample(packet, g);
    const Wavepacket slowed = resample(slow.output, g);
    CsvWriter csv("storage", {"tau_ns", "input", "slowed", "retrieved"});
    for (std::size_t k = 0; k < g.n; ++k)
        csv.add_row({ns(g.at(k)), per_ns(input.intensity(k)), per_ns(slowed.intensity(k)), per_ns(st.retrieved.intensity(k))});
    csv.save(prepare(c, "storage.csv"));

    json j;
    j["se"] = st.se;
    j["slow_light_efficiency"] = slow.se;
    j["slow_light_delay_ns"] = ns(slow.delay);
    j["group_delay_ns"] = ns(group_delay(c.ensemble, omega));
    j["likeness"] = st.likeness;
    j["optimal_delay_ns"] = ns(st.optimal_delay);
    j["storage_time_ns"] = ns(storage);
    j["t_off_ns"] = ns(t_off);
    j["t_on_ns"] = ns(t_off + storage);
    j["retrieval_begin_ns"] = number_or_null(ns(st.retrieval_window.begin));
    j["input_fwhm_ns"] = ns(packet.intensity_fwhm());
    j["fractional_delay"] = fractional_delay(storage, packet.intensity_fwhm());
    j["omega"] = omega;
    j["od"] = c.ensemble.od;
    save_json(c, "storage.json", j);
    return j;
}

json cmd_scan(const RunConfig& c, ScanAxis axis) {
    c.validate();
    const Wavepacket packet = configured_packet(c);
    const StorageScenario scenario{c.storage_time, c.decay};
    OptimizerOptions opts = c.scan.optimizer;
    opts.jobs = c.jobs;
    json j;
    j["axis"] = axis_label(axis);
    json points = json::array();

    if (axis == ScanAxis::od) {
        if (c.scan.od.empty()) throw config_error("scan.od is empty");
        const ScanResult r = scan_optical_depth(c.scan.od, c.ensemble, packet, c.scan.bounds, scenario, c.solver, opts);
        CsvWriter csv("od-scan", {"od", "se_opt", "omega_opt", "omega_halfwidth"});
        for (std::size_t i = 0; i < r.axis.size(); ++i) {
            csv.add_row({r.axis[i], r.se[i], r.optimal_omega[i], r.omega_halfwidth[i]});
            points.push_back({{"od", r.axis[i]},
                              {"se_opt", number_or_null(r.se[i])},
                              {"omega_opt", number_or_null(r.optimal_omega[i])},
                              {"omega_halfwidth", number_or_null(r.omega_halfwidth[i])},
                              {"t_off_ns", number_or_null(ns(r.t_off[i]))},
                              {"failed", static_cast<bool>(r.failed[i])},
                              {"note", r.notes[i]}});
        }
        csv.save(prepare(c, "scan_od.csv"));
    } else if (axis == ScanAxis::omega) {
        if (c.scan.omega.empty()) throw config_error("scan.omega is empty");
        const ScanResult r = scan_control(c.scan.omega, c.ensemble, packet, scenario, c.solver, opts);
        CsvWriter csv("omega-scan", {"omega", "se", "t_off_ns"});
        for (std::size_t i = 0; i < r.axis.size(); ++i) {
            csv.add_row({r.axis[i], r.se[i], ns(r.t_off[i])});
            points.push_back({{"omega", r.axis[i]},
                              {"se", number_or_null(r.se[i])},
                              {"t_off_ns", number_or_null(ns(r.t_off[i]))},
                              {"failed", static_cast<bool>(r.failed[i])},
                              {"note", r.notes[i]}});
        }
        csv.save(prepare(c, "scan_omega.csv"));
    } else {
        if (c.scan.storage_time.empty()) throw config_error("scan.storage_time is empty");
        const double t_off = std::isnan(c.control.off_time) ? std::nan("") : c.control.off_time;
        const ScanResult r = scan_storage_time(c.scan.storage_time, c.ensemble, c.control.omega_peak, packet, c.decay,
                                               c.solver, t_off, c.jobs);
        std::mt19937_64 rng(c.seed);
        CsvWriter csv("storage-time-scan", {"storage_time_ns", "se", "sigma", "se_model"});
        for (std::size_t i = 0; i < r.axis.size(); ++i) {
            double se = r.se[i];
            double sigma = 0.0;
            if (c.scan.poisson_counts > 0.0 && std::isfinite(se)) {
                std::poisson_distribution<long long> counts(std::max(se, 0.0) * c.scan.poisson_counts);
                const auto n = counts(rng);
                se = static_cast<double>(n) / c.scan.poisson_counts;
                sigma = std::sqrt(std::max<double>(static_cast<double>(n), 1.0)) / c.scan.poisson_counts;
            }
            csv.add_row({ns(r.axis[i]), se, sigma, r.se[i]});
            points.push_back({{"storage_time_ns", ns(r.axis[i])},
                              {"se", number_or_null(se)},
                              {"sigma", sigma},
                              {"se_model", number_or_null(r.se[i])},
                              {"failed", static_cast<bool>(r.failed[i])},
                              {"note", r.notes[i]}});
        }
        j["t_off_ns"] = ns(r.meta.at("t_off"));
        j["omega"] = c.control.omega_peak;
        j["input_fwhm_ns"] = ns(packet.intensity_fwhm());
        csv.save(prepare(c, "scan_storage_time.csv"));
    }
    j["points"] = points;
    save_json(c, std::string("scan_") + axis_label(axis) + ".json", j);
    return j;
}

json cmd_fit(const RunConfig& c, FitKind kind, const std::filesystem::path& data) {
    c.validate();
    const CsvTable table = read_csv_table(data);
    json j;
    if (kind == FitKind::eit) {
        TransmissionCurve curve{table.column("detuning"), table.column("transmission")};
        const EitFitResult r = fit_eit(curve, c.fit_guess, c.ensemble);
        j["od"] = r.od;
        j["omega_c"] = r.omega_c;
        j["gamma12"] = r.gamma12;
        j["od_halfwidth"] = r.report.od_halfwidth;
        j["omega_halfwidth"] = r.report.omega_halfwidth;
        j["gamma12_halfwidth"] = r.report.gamma12_halfwidth;
        j["residual_norm"] = r.report.residual_norm;
        j["iterations"] = r.report.iterations;
        j["converged"] = r.report.converged;
        save_json(c, "fit_eit.json", j);
        return j;
    }

    const auto t = table.column("storage_time_ns");
    const auto se = table.column("se");
    const bool weighted = table.find("sigma") != std::string::npos;
    const auto sigma = weighted ? table.column("sigma") : std::vector<double>(t.size(), 0.0);
    std::vector<DecayPoint> pts;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(se[i])) continue;
        pts.push_back({UnitSystem::from_ns(t[i]), se[i], sigma[i]});
    }
    const DecayFit f = fit_gaussian_decay(pts);
    j["tau0_ns"] = number_or_null(ns(f.tau0));
    j["tau0_halfwidth_ns"] = number_or_null(ns(f.report.tau0_halfwidth));
    j["se0"] = f.se0;
    j["unbounded"] = f.report.unbounded;
    j["residual_norm"] = f.report.residual_norm;
    j["iterations"] = f.report.iterations;
    j["converged"] = f.report.converged;
    double crossing = std::nan("");
    if (std::isfinite(f.tau0) && f.se0 > 0.5) crossing = storage_time_at(0.5, f.tau0, f.se0);
    j["se_half_crossing_ns"] = number_or_null(ns(crossing));
    const double fwhm = configured_packet(c).intensity_fwhm();
    j["input_fwhm_ns"] = ns(fwhm);
    j["fractional_delay_at_crossing"] = number_or_null(std::isfinite(crossing) ? fractional_delay(crossing, fwhm) : crossing);
    save_json(c, "fit_decay.json", j);
    return j;
}

json cmd_stats(const RunConfig& c) {
    c.validate();
    const Wavepacket packet = configured_packet(c);
    SourceStatModel model = c.stats.model;
    model.waveform = to_ns_grid(packet);
    model.seed = c.seed;
    const double peak = ns(packet.peak_time());

    const EventStream stream = simulate_event_stream(model, c.stats.duration, true);

    auto g2_json = [](const Gc2Result& r) {
        return json{{"t_w_ns", r.window},
                    {"g2", r.value},
                    {"uncertainty", r.uncertainty},
                    {"n_g", r.counts.n_g},
                    {"n_gt", r.counts.n_gt},
                    {"n_gr", r.counts.n_gr},
                    {"n_gtr", r.counts.n_gtr}};
    };

    json j;
    const Gc2Result main = conditional_g2(stream, c.stats.t_w, peak);
    j["g2"] = g2_json(main);
    j["waveform_peak_ns"] = peak;

    CsvWriter table("g2-window", {"t_w_ns", "g2", "uncertainty", "n_g", "n_gt", "n_gr", "n_gtr"});
    json rows = json::array();
    for (double tw : c.stats.t_w_table) {
        try {
            const Gc2Result r = conditional_g2(stream, tw, peak);
            table.add_row({tw, r.value, r.uncertainty, static_cast<double>(r.counts.n_g), static_cast<double>(r.counts.n_gt),
                           static_cast<double>(r.counts.n_gr), static_cast<double>(r.counts.n_gtr)});
            rows.push_back(g2_json(r));
        } catch (const undefined_g2& e) {
            const auto& n = e.counts();
            table.add_row({tw, std::nan(""), std::nan(""), static_cast<double>(n.n_g), static_cast<double>(n.n_gt),
                           static_cast<double>(n.n_gr), static_cast<double>(n.n_gtr)});
            rows.push_back({{"t_w_ns", tw}, {"g2", nullptr}, {"n_g", n.n_g}, {"n_gt", n.n_gt}, {"n_gr", n.n_gr}, {"n_gtr", n.n_gtr}});
        }
    }
    table.save(prepare(c, "g2_window.csv"));
    j["g2_table"] = rows;

    // The anti-Stokes side of the cross-correlation is the union of T and R.
    EventStream merged = stream;
    for (auto& e : merged)
        if (e.channel == Channel::T || e.channel == Channel::R) e.channel = Channel::AS;
    sort_events(merged);
    const CorrelationHistogram h = pair_cross_correlation(merged, c.stats.bin, c.stats.span);
    CsvWriter corr("correlation", {"delay_ns", "coincidences", "g"});
    double g_peak = 0.0, delay_peak = std::nan("");
    for (std::size_t k = 0; k < h.g.size(); ++k) {
        corr.add_row({h.delay[k], static_cast<double>(h.coincidences[k]), h.g[k]});
        if (h.g[k] > g_peak) {
            g_peak = h.g[k];
            delay_peak = h.delay[k];
        }
    }
    corr.save(prepare(c, "correlation.csv"));

    double g_ss = c.stats.thermal_value, g_asas = c.stats.thermal_value;
    if (!c.stats.thermal_autocorrelation) {
        g_ss = zero_delay_autocorrelation(merged, Channel::G, c.stats.bin);
        g_asas = zero_delay_autocorrelation(merged, Channel::AS, c.stats.bin);
    }
    j["g_sas_peak"] = g_peak;
    j["g_sas_peak_delay_ns"] = number_or_null(delay_peak);
    j["accidental_per_bin"] = h.accidental_per_bin;
    j["g_ss"] = g_ss;
    j["g_asas"] = g_asas;
    j["autocorrelation_source"] = c.stats.thermal_autocorrelation ? "thermal" : "measured";
    j["r_cs"] = g_peak > 0.0 ? cauchy_schwarz_ratio(g_peak, g_ss, g_asas) : 0.0;
    j["events"] = stream.size();
    j["duration_s"] = c.stats.duration;
    if (c.stats.dump_timetags) {
        write_timetag_file(stream, prepare(c, "timetags.ttg"));
        j["timetags"] = "timetags.ttg";
    }
    save_json(c, "stats.json", j);
    return j;
}

}  // namespace eitmem
