#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "eitmem/commands.hpp"
#include "eitmem/errors.hpp"

namespace {

enum Exit { ok = 0, failure = 1, config = 2, numerical = 3, parse = 4 };

struct Common {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_path, "JSON run configuration");
    app->add_option("--out", c.out, "Output directory");
    app->add_option("--seed", c.seed, "Random seed (overrides the config)");
    app->add_option("--jobs", c.jobs, "Worker cap for scans")->check(CLI::PositiveNumber);
}

eitmem::RunConfig load(const Common& c) {
    eitmem::RunConfig cfg = c.config_path.empty() ? eitmem::parse_config("{}") : eitmem::load_config(c.config_path);
    if (!c.out.empty()) cfg.out_dir = c.out;
    if (c.seed) cfg.seed = *c.seed;
    if (c.jobs) cfg.jobs = *c.jobs;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EIT quantum memory simulator"};
    app.require_subcommand(1);
    Common common;
    add_common(&app, common);

    auto* waveform = app.add_subcommand("waveform", "Heralded single-photon waveform from the sFWM source");
    auto* store = app.add_subcommand("store", "Slow light, storage and retrieval of the source photon");
    auto* scan = app.add_subcommand("scan", "Storage efficiency scans");
    std::string axis;
    scan->add_option("--axis", axis, "od, omega or storage-time")
        ->required()
        ->check(CLI::IsMember({"od", "omega", "storage-time"}));
    auto* fit = app.add_subcommand("fit", "Fit an EIT spectrum or a storage-time decay");
    std::string kind, data;
    fit->add_option("kind", kind, "eit or decay")->required()->check(CLI::IsMember({"eit", "decay"}));
    fit->add_option("--data", data, "CSV data file")->required();
    auto* stats = app.add_subcommand("stats", "Monte Carlo photon statistics");
    for (auto* sub : {waveform, store, scan, fit, stats}) add_common(sub, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config;
    }

    try {
        const eitmem::RunConfig cfg = load(common);
        nlohmann::json summary;
        if (*waveform) summary = eitmem::cmd_waveform(cfg);
        else if (*store) summary = eitmem::cmd_store(cfg);
        else if (*scan) {
            const auto a = axis == "od" ? eitmem::ScanAxis::od
                           : axis == "omega" ? eitmem::ScanAxis::omega
                                             : eitmem::ScanAxis::storage_time;
            summary = eitmem::cmd_scan(cfg, a);
        } else if (*fit) {
            summary = eitmem::cmd_fit(cfg, kind == "eit" ? eitmem::FitKind::eit : eitmem::FitKind::decay, data);
        } else if (*stats) {
            summary = eitmem::cmd_stats(cfg);
        }
        std::cout << summary.dump(2) << '\n';
        return ok;
    } catch (const eitmem::parse_error& e) {
        std::cerr << "parse error: " << e.what() << " (position " << e.position() << ")\n";
        return parse;
    } catch (const eitmem::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config;
    } catch (const eitmem::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
}
