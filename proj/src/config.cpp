#include "eitmem/config.hpp"

#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"

#include "eitmem/errors.hpp"

namespace eitmem {

using nlohmann::json;

namespace {

class Section {
public:
    Section(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw config_error(path_ + ": expected an object");
        for (const auto& [key, value] : j_.items()) {
            if (!allowed.count(key)) throw config_error(path_ + ": unknown key '" + key + "'");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    const json& at(const std::string& key) const { return j_.at(key); }
    std::string where(const std::string& key) const { return path_ + "." + key; }

    void number(const std::string& key, double& out, double scale = 1.0) const {
        if (!has(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number()) throw config_error(where(key) + ": expected a number");
        out = v.get<double>() * scale;
    }

    void flag(const std::string& key, bool& out) const {
        if (!has(key)) return;
        if (!j_.at(key).is_boolean()) throw config_error(where(key) + ": expected true or false");
        out = j_.at(key).get<bool>();
    }

    template <class Int>
    void integer(const std::string& key, Int& out) const {
        if (!has(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw config_error(where(key) + ": expected a non-negative integer");
        out = static_cast<Int>(v.get<std::uint64_t>());
    }

    void text(const std::string& key, std::string& out) const {
        if (!has(key)) return;
        if (!j_.at(key).is_string()) throw config_error(where(key) + ": expected a string");
        out = j_.at(key).get<std::string>();
    }

    void numbers(const std::string& key, std::vector<double>& out, double scale = 1.0) const {
        if (!has(key)) return;
        const json& v = j_.at(key);
        if (!v.is_array()) throw config_error(where(key) + ": expected an array of numbers");
        out.clear();
        for (const auto& x : v) {
            if (!x.is_number()) throw config_error(where(key) + ": expected an array of numbers");
            out.push_back(x.get<double>() * scale);
        }
    }

private:
    const json& j_;
    std::string path_;
};

const double ns = UnitSystem::from_ns(1.0);

void read_source(const Section& s, RunConfig& c) {
    s.number("od1", c.source.od1);
    s.number("omega_c1", c.source.omega_c1);
    s.number("l1", c.source.l1);
    s.number("w0", c.source.w0);
    s.number("theta", c.source.theta);
    s.number("kappa0", c.source.kappa0);
    s.number("precursor_fraction", c.source.precursor_fraction);
    s.number("gamma13", c.source.gamma13);
    std::string pump;
    s.text("pump", pump);
    if (pump == "gaussian") c.pump = PumpShape::gaussian;
    else if (pump == "constant") c.pump = PumpShape::constant;
    else if (!pump.empty()) throw config_error(s.where("pump") + ": expected \"gaussian\" or \"constant\"");
}

void read_ensemble(const Section& s, RunConfig& c) {
    s.number("od", c.ensemble.od);
    s.number("length", c.ensemble.length);
    s.number("gamma13", c.ensemble.gamma13);
    s.number("gamma12", c.ensemble.gamma12);
    s.number("delta_s", c.ensemble.delta_s);
    s.number("beta", c.ensemble.beta);
    s.number("c0", c.ensemble.c0);
}

void read_decay(const Section& s, RunConfig& c) {
    std::string kind;
    s.text("kind", kind);
    if (kind == "gaussian") c.decay.kind = DecayModel::Kind::gaussian;
    else if (kind == "exponential") c.decay.kind = DecayModel::Kind::exponential;
    else if (kind == "combined") c.decay.kind = DecayModel::Kind::combined;
    else if (!kind.empty()) throw config_error(s.where("kind") + ": expected gaussian, exponential or combined");
    s.number("tau0", c.decay.tau0, ns);
    s.number("gamma12", c.decay.gamma12);
}

void read_stats(const Section& s, RunConfig& c) {
    auto& m = c.stats.model;
    s.number("trial_rate", m.trial_rate);
    s.number("pair_probability", m.pair_probability);
    s.number("two_pair_probability", m.two_pair_probability);
    s.number("noise_rate_as", m.noise_rate_as);
    s.number("dark_rate_g", m.dark_rate_g);
    s.number("dark_rate_as", m.dark_rate_as);
    s.number("channel_efficiency", m.channel_efficiency);
    s.number("herald_efficiency", m.herald_efficiency);
    s.number("duration", c.stats.duration);
    s.number("t_w", c.stats.t_w);
    s.numbers("t_w_table", c.stats.t_w_table);
    s.number("bin", c.stats.bin);
    s.number("span", c.stats.span);
    s.flag("thermal_autocorrelation", c.stats.thermal_autocorrelation);
    s.number("thermal_value", c.stats.thermal_value);
    s.flag("dump_timetags", c.stats.dump_timetags);
}

void read_scan(const Section& s, RunConfig& c) {
    s.numbers("od", c.scan.od);
    s.numbers("omega", c.scan.omega);
    s.numbers("storage_time", c.scan.storage_time, ns);
    s.number("omega_min", c.scan.bounds.min);
    s.number("omega_max", c.scan.bounds.max);
    s.integer("coarse_points", c.scan.optimizer.coarse_points);
    s.number("omega_rel_tol", c.scan.optimizer.omega_rel_tol);
    s.numbers("t_off_offsets", c.scan.optimizer.t_off_offsets);
    s.number("plateau_drop", c.scan.optimizer.plateau_drop);
    s.integer("plateau_bisections", c.scan.optimizer.plateau_bisections);
    s.number("poisson_counts", c.scan.poisson_counts);
}

}  // namespace

void RunConfig::validate() const {
    if (jobs == 0) throw config_error("jobs must be >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw config_error("grid.dt must be > 0");
    source.validate();
    ensemble.validate();
    if (!(control.omega_peak >= 0.0) || !std::isfinite(control.omega_peak))
        throw config_error("control.omega_peak must be >= 0");
    if (!(control.edge_10_90 > 0.0)) throw config_error("control.edge_10_90 must be > 0");
    if (!std::isnan(control.on_time) && !std::isnan(control.off_time) && control.on_time < control.off_time)
        throw config_error("control.on_time precedes control.off_time");
    if (!(storage_time >= 0.0) || !std::isfinite(storage_time)) throw config_error("storage.storage_time must be >= 0");
    if (!(solver.dt >= 0.0)) throw config_error("solver.dt must be >= 0");
    decay.validate();
    SourceStatModel m = stats.model;
    m.waveform = Wavepacket(TimeGrid(0.0, 1.0, 2), {cplx(1.0), cplx(1.0)});
    try {
        m.validate();
    } catch (const config_error& e) {
        throw config_error(std::string("stats: ") + e.what());
    }
    if (!(stats.duration > 0.0)) throw config_error("stats.duration must be > 0");
    if (!(stats.t_w > 0.0)) throw config_error("stats.t_w must be > 0");
    for (double w : stats.t_w_table)
        if (!(w > 0.0)) throw config_error("stats.t_w_table entries must be > 0");
    if (!(stats.bin >= 1.0)) throw config_error("stats.bin must be >= 1 ns");
    if (!(stats.span >= stats.bin)) throw config_error("stats.span must be >= stats.bin");
    if (!(stats.thermal_value > 0.0)) throw config_error("stats.thermal_value must be > 0");
    for (double od : scan.od)
        if (!(od >= 0.0 && od <= 300.0)) throw config_error("scan.od entries must lie in [0, 300]");
    for (double w : scan.omega)
        if (!(w > 0.0) || !std::isfinite(w)) throw config_error("scan.omega entries must be > 0");
    for (double t : scan.storage_time)
        if (!(t >= 0.0) || !std::isfinite(t)) throw config_error("scan.storage_time entries must be >= 0");
    if (!(scan.bounds.min > 0.0 && scan.bounds.max > scan.bounds.min))
        throw config_error("scan.omega_min/omega_max must satisfy 0 < min < max");
    if (scan.optimizer.coarse_points < 3) throw config_error("scan.coarse_points must be >= 3");
    if (!(scan.optimizer.omega_rel_tol > 0.0)) throw config_error("scan.omega_rel_tol must be > 0");
    if (scan.optimizer.t_off_offsets.empty()) throw config_error("scan.t_off_offsets must not be empty");
    if (!(scan.optimizer.plateau_drop > 0.0)) throw config_error("scan.plateau_drop must be > 0");
    if (!(scan.poisson_counts >= 0.0)) throw config_error("scan.poisson_counts must be >= 0");
    if (!(fit_guess.od > 0.0 && fit_guess.omega_c > 0.0 && fit_guess.gamma12 >= 0.0))
        throw config_error("fit guess must have od > 0, omega_c > 0, gamma12 >= 0");
}

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("config is not valid JSON: ") + e.what(), e.byte);
    }

    RunConfig c;
    const Section top(root, "config",
                      {"seed", "jobs", "out_dir", "grid", "source", "ensemble", "control", "storage", "solver", "decay",
                       "stats", "scan", "fit"});
    top.integer("seed", c.seed);
    top.integer("jobs", c.jobs);
    std::string out;
    top.text("out_dir", out);
    if (!out.empty()) c.out_dir = out;

    if (top.has("grid")) {
        const Section s(top.at("grid"), "grid", {"dt"});
        s.number("dt", c.dt, ns);
    }
    if (top.has("source")) {
        read_source(Section(top.at("source"), "source",
                            {"od1", "omega_c1", "l1", "w0", "theta", "kappa0", "precursor_fraction", "gamma13", "pump"}),
                    c);
    }
    if (top.has("ensemble")) {
        read_ensemble(Section(top.at("ensemble"), "ensemble",
                              {"od", "length", "gamma13", "gamma12", "delta_s", "beta", "c0"}),
                      c);
    }
    if (top.has("control")) {
        const Section s(top.at("control"), "control", {"omega_peak", "off_time", "on_time", "edge_10_90"});
        s.number("omega_peak", c.control.omega_peak);
        s.number("off_time", c.control.off_time, ns);
        s.number("on_time", c.control.on_time, ns);
        s.number("edge_10_90", c.control.edge_10_90, ns);
    }
    if (top.has("storage")) {
        const Section s(top.at("storage"), "storage", {"storage_time", "unbounded_window"});
        s.number("storage_time", c.storage_time, ns);
        s.flag("unbounded_window", c.unbounded_window);
    }
    if (top.has("solver")) {
        const Section s(top.at("solver"), "solver", {"n_z", "dt", "adiabatic_field"});
        s.integer("n_z", c.solver.n_z);
        s.number("dt", c.solver.dt, ns);
        s.flag("adiabatic_field", c.solver.adiabatic_field);
    }
    if (top.has("decay")) read_decay(Section(top.at("decay"), "decay", {"kind", "tau0", "gamma12"}), c);
    if (top.has("stats")) {
        read_stats(Section(top.at("stats"), "stats",
                           {"trial_rate", "pair_probability", "two_pair_probability", "noise_rate_as", "dark_rate_g",
                            "dark_rate_as", "channel_efficiency", "herald_efficiency", "duration", "t_w", "t_w_table",
                            "bin", "span", "thermal_autocorrelation", "thermal_value", "dump_timetags"}),
                   c);
    }
    if (top.has("scan")) {
        read_scan(Section(top.at("scan"), "scan",
                          {"od", "omega", "storage_time", "omega_min", "omega_max", "coarse_points", "omega_rel_tol",
                           "t_off_offsets", "plateau_drop", "plateau_bisections", "poisson_counts"}),
                  c);
    }
    if (top.has("fit")) {
        const Section s(top.at("fit"), "fit", {"od", "omega_c", "gamma12"});
        s.number("od", c.fit_guess.od);
        s.number("omega_c", c.fit_guess.omega_c);
        s.number("gamma12", c.fit_guess.gamma12);
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open config " + path.string());
    return parse_config(std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()));
}

}  // namespace eitmem
