// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eitmem/commands.hpp"
#include "eitmem/config.hpp"
#include "eitmem/errors.hpp"
#include "eitmem/mb_solver.hpp"
#include "eitmem/photon_stats.hpp"
#include "eitmem/spectral.hpp"
#include "eitmem/storage.hpp"
#include "json.hpp"

using namespace eitmem;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path config_dir = EITMEM_CONFIG_DIR;
const fs::path work_dir = fs::temp_directory_path() / "eitmem_acceptance";

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    /// Records `name = value` against target +- tol and folds it into pass.
    void within(const std::string& name, double value, double target, double tol, const std::string& unit = "") {
        const bool ok = std::abs(value - target) <= tol;
        pass = pass && ok;
        detail << name << "=" << value << unit << " (" << target << " +- " << tol << unit << (ok ? "" : ", out") << "); ";
    }
    void check(const std::string& what, bool ok) {
        pass = pass && ok;
        detail << what << (ok ? " ok" : " FAILED") << "; ";
    }
    void note(const std::string& text) { detail << text << "; "; }
};

RunConfig config(const std::string& name, const std::string& sub) {
    RunConfig c = load_config(config_dir / name);
    c.out_dir = work_dir / sub;
    return c;
}

double get(const json& j, const char* key) { return j.at(key).get<double>(); }

double relative_l2(const Wavepacket& a, const Wavepacket& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        num += std::norm(a.amplitude()[k] - b.amplitude()[k]);
        den += std::norm(b.amplitude()[k]);
    }
    return std::sqrt(num / den);
}

Wavepacket gaussian(const TimeGrid& g, double t0, double sigma, cplx phase = 1.0) {
    std::vector<cplx> a(g.n);
    for (std::size_t k = 0; k < g.n; ++k) a[k] = phase * std::exp(-0.25 * std::pow((g.at(k) - t0) / sigma, 2));
    return Wavepacket(g, std::move(a));
}

Outcome source_waveform() {
    Outcome o;
    const json j = cmd_waveform(config("reference.json", "c1"));
    o.within("fwhm", get(j, "fwhm_ns"), 400.0, 8.0, " ns");
    o.within("tau0", get(j, "tau0_ns"), 240.0, 4.8, " ns");
    return o;
}

json reference_store() {
    static const json j = cmd_store(config("reference.json", "c2"));
    return j;
}

Outcome slow_light() {
    Outcome o;
    const json j = reference_store();
    o.within("efficiency", get(j, "slow_light_efficiency"), 0.78, 0.05);
    o.within("delay", get(j, "slow_light_delay_ns"), 232.0, 23.2, " ns");
    return o;
}

Outcome storage_point() {
    Outcome o;
    o.within("SE", get(reference_store(), "se"), 0.62, 0.05);
    return o;
}

Outcome od_scan() {
    Outcome o;
    RunConfig c = config("od_scan.json", "c4");
    c.jobs = 4;
    const json j = cmd_scan(c, ScanAxis::od);
    std::vector<double> od, se, omega, hw;
    for (const auto& p : j.at("points")) {
        od.push_back(get(p, "od"));
        se.push_back(p.at("se_opt").is_null() ? std::nan("") : get(p, "se_opt"));
        omega.push_back(p.at("omega_opt").is_null() ? std::nan("") : get(p, "omega_opt"));
        hw.push_back(p.at("omega_halfwidth").is_null() ? std::nan("") : get(p, "omega_halfwidth"));
    }
    bool rising = se.size() == 5;
    for (std::size_t i = 1; i < se.size(); ++i) rising = rising && se[i] > se[i - 1];
    std::ostringstream curve;
    for (std::size_t i = 0; i < se.size(); ++i) curve << (i ? " " : "") << od[i] << ":" << se[i];
    o.note("se_opt " + curve.str());
    o.check("strictly rising", rising);
    o.within("se_opt(168)", se.back(), 0.65, 0.04);
    const double w126 = omega[3], h126 = hw[3];
    o.check("omega_opt(126)=" + std::to_string(w126) + " +- " + std::to_string(h126) + " contains 7.6",
            std::abs(w126 - 7.6) <= h126);
    return o;
}

Outcome storage_time_law() {
    Outcome o;
    const RunConfig c = config("storage_time_scan.json", "c5");
    cmd_scan(c, ScanAxis::storage_time);
    const json f = cmd_fit(c, FitKind::decay, c.out_dir / "scan_storage_time.csv");
    o.within("tau0", get(f, "tau0_ns"), 4000.0, 200.0, " ns");
    o.within("SE=0.5 crossing", get(f, "se_half_crossing_ns"), 2200.0, 200.0, " ns");
    const double frac = get(f, "fractional_delay_at_crossing");
    o.check("fractional delay " + std::to_string(frac) + " >= 5", frac >= 5.0);
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> od_dist(10.0, 200.0), om_dist(2.0, 12.0);
    // Precursor-free source: the five-sample spike is not band limited.
    SourceParams src;
    src.precursor_fraction = 0.0;
    const auto coarse_in = source_packet(src, UnitSystem::from_ns(1.0));
    const auto fine_in = source_packet(src, UnitSystem::from_ns(0.5));
    double worst = 0.0, worst_ratio = 0.0;
    for (int i = 0; i < 10; ++i) {
        EnsembleParams ens;
        ens.od = od_dist(rng);
        const double omega = om_dist(rng);
        const auto ctrl = ControlProfile::constant(omega);
        auto extend = [&](const Wavepacket& w) {
            const double end = w.peak_time() + 2.0 * group_delay(ens, omega) + 3.0 * w.intensity_fwhm();
            return resample(w, TimeGrid::covering(w.grid().t_start, std::max(end, w.grid().t_end()), w.grid().dt));
        };
        const auto a_in = extend(coarse_in);
        const auto b_in = extend(fine_in);
        const auto a = propagate(a_in, ens, ctrl);
        SolverConfig fine;
        fine.n_z = 2 * (a.config.n_z - 1) + 1;
        fine.dt = a.config.dt / 2.0;
        const auto b = propagate(b_in, ens, ctrl, fine);
        const double e1 = relative_l2(a.output, spectral_propagate(a_in, ens, omega));
        const double e2 = relative_l2(b.output, spectral_propagate(b_in, ens, omega));
        worst = std::max(worst, e1);
        worst_ratio = std::max(worst_ratio, e2 / e1);
    }
    o.check("max relative L2 " + std::to_string(worst) + " < 1e-3", worst < 1e-3);
    o.check("max refined/coarse ratio " + std::to_string(worst_ratio) + " <= 0.5", worst_ratio <= 0.5);
    return o;
}

Outcome eit_fit_round_trip() {
    Outcome o;
    const EnsembleParams ens;
    std::vector<double> d(201);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = -10.0 + 0.1 * static_cast<double>(i);
    const auto clean = eit_spectrum(d, ens, 7.6);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> noise(0.0, 0.01);
    double sum_sq = 0.0;
    int failures = 0;
    for (int draw = 0; draw < 100; ++draw) {
        auto curve = clean;
        for (auto& t : curve.transmission) t += noise(rng);
        try {
            const auto f = fit_eit(curve, {100.0, 5.0, 0.01}, ens);
            sum_sq += std::pow((f.od - ens.od) / ens.od, 2);
        } catch (const numerical_error&) {
            ++failures;
            sum_sq += 1.0;
        }
    }
    o.check("fits converged " + std::to_string(100 - failures) + "/100", failures == 0);
    o.within("OD RMS relative error", std::sqrt(sum_sq / 100.0), 0.0, 0.03);
    return o;
}

Outcome photon_statistics() {
    Outcome o;
    const json ideal = cmd_stats(config("stats_ideal.json", "c8_ideal"));
    const auto n_g = ideal.at("g2").at("n_g").get<double>();
    o.check("ideal heralds " + std::to_string(static_cast<long>(n_g)) + " >= 1e5", n_g >= 1e5);
    o.within("ideal g2", get(ideal.at("g2"), "g2"), 0.0, 0.01);
    o.within("two-photon g2", get(cmd_stats(config("stats_two_photon.json", "c8_two")).at("g2"), "g2"), 0.50, 0.02);
    o.within("Poisson g2", get(cmd_stats(config("stats_poisson.json", "c8_poisson")).at("g2"), "g2"), 1.00, 0.05);
    const json src = cmd_stats(config("stats_source.json", "c8_source"));
    o.within("source g2", get(src.at("g2"), "g2"), 0.26, 0.05);
    o.within("source R_CS", get(src, "r_cs"), 54.0, 5.4);
    const json ret = cmd_stats(config("stats_retrieved.json", "c8_retrieved"));
    o.within("retrieved g2", get(ret.at("g2"), "g2"), 0.32, 0.05);
    o.within("retrieved R_CS", get(ret, "r_cs"), 29.0, 2.9);
    return o;
}

Outcome likeness() {
    Outcome o;
    const TimeGrid g(0.0, 0.05, 8000);
    const double l = waveform_likeness(gaussian(g, 60.0, 5.0), gaussian(g, 200.0, 10.0)).likeness;
    o.within("width ratio 2", l, 0.800, 1e-3);
    o.note("likeness at omega 7.6: " + std::to_string(get(reference_store(), "likeness")));
    const json opt = cmd_store(config("optimal_storage.json", "c9"));
    o.note("optimal storage omega " + std::to_string(get(opt, "omega")) + " SE " + std::to_string(get(opt, "se")));
    const double lo = get(opt, "likeness");
    o.check("storage likeness at the OD 126 optimum " + std::to_string(lo) + " >= 0.90", lo >= 0.90);
    return o;
}

Outcome invariants() {
    Outcome o;
    const TimeGrid g = TimeGrid::covering(0.0, UnitSystem::from_ns(3000.0), UnitSystem::from_ns(1.0));
    const double sigma = UnitSystem::from_ns(170.0);
    const auto in = gaussian(g, UnitSystem::from_ns(1000.0), sigma);
    EnsembleParams ens;

    bool energy = true;
    for (double od : {10.0, 60.0, 126.0}) {
        ens.od = od;
        for (double omega : {0.0, 3.0, 7.6}) {
            const auto out = propagate(in, ens, ControlProfile::constant(omega)).output;
            energy = energy && wavepacket_norm(out, false) <= wavepacket_norm(in, false) * (1.0 + 1e-9);
        }
    }
    o.check("energy non-increase", energy);

    ens.od = 60.0;
    const auto ctrl = ControlProfile::store(4.0, UnitSystem::from_ns(1100.0), UnitSystem::from_ns(400.0));
    const cplx a(0.6, -1.3);
    const auto base = propagate(in, ens, ctrl).output;
    const auto scaled = propagate(in.scaled(a), ens, ctrl).output;
    double lin = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < g.n; ++k) {
        lin = std::max(lin, std::abs(scaled.amplitude()[k] - a * base.amplitude()[k]));
        peak = std::max(peak, std::abs(a * base.amplitude()[k]));
    }
    o.check("linearity", lin <= 1e-9 * peak);

    bool zero = true;
    const auto silent = propagate(in.scaled(0.0), ens, ctrl);
    for (auto v : silent.output.amplitude()) zero = zero && v == cplx(0.0);
    o.check("zero-input fixed point", zero);

    const auto packet = source_packet(SourceParams{}, UnitSystem::from_ns(1.0));
    const DecayModel decay = DecayModel::gaussian(UnitSystem::from_us(4.0));
    auto se = [&](double od, double g12, double omega, double storage_ns, cplx phase) {
        EnsembleParams e;
        e.od = od;
        e.gamma12 = g12;
        const auto p = packet.scaled(phase);
        const auto c = ControlProfile::store(omega, default_switch_off(p, e, omega), UnitSystem::from_ns(storage_ns));
        return run_storage(p, e, c, decay).se;
    };
    const double s0 = se(126.0, 0.004, 5.0, 900.0, 1.0);
    o.check("SE phase invariance", std::abs(se(126.0, 0.004, 5.0, 900.0, std::polar(1.0, 1.1)) - s0) < 1e-12 * s0);
    o.check("SE monotone in gamma12", se(126.0, 0.0, 5.0, 900.0, 1.0) > s0 && s0 > se(126.0, 0.02, 5.0, 900.0, 1.0));
    o.check("SE monotone in storage time", se(126.0, 0.004, 5.0, 300.0, 1.0) > s0 && s0 > se(126.0, 0.004, 5.0, 2500.0, 1.0));

    SourceStatModel m;
    m.waveform = Wavepacket(TimeGrid(0.0, 1.0, 400), std::vector<cplx>(400, cplx(1.0)));
    m.noise_rate_as = 1e4;
    const auto s1 = simulate_event_stream(m, 0.05, true);
    const auto s2 = simulate_event_stream(m, 0.05, true);
    m.seed = 2;
    o.check("seeded determinism", s1 == s2 && !(simulate_event_stream(m, 0.05, true) == s1));
    return o;
}

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    fs::remove_all(work_dir);
    fs::create_directories(work_dir);
    const std::vector<Criterion> criteria = {
        {1, "source waveform", 1.0, source_waveform},
        {2, "slow light", 30.0, slow_light},
        {3, "storage point", 30.0, storage_point},
        {4, "optical-depth scan", 1200.0, od_scan},
        {5, "storage-time law", 300.0, storage_time_law},
        {6, "oracle equivalence", 120.0, oracle_equivalence},
        {7, "EIT fit round trip", 60.0, eit_fit_round_trip},
        {8, "photon statistics", 120.0, photon_statistics},
        {9, "likeness", 30.0, likeness},
        {10, "invariant suite", 300.0, invariants},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what() << "; ";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.check("runtime " + std::to_string(secs) + " s < " + std::to_string(c.budget_s) + " s", secs < c.budget_s);
        if (!o.pass) ++failed;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
