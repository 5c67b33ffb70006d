// Command-line driver for the DNS-aided LES experiments.
//
//   dles --experiment burgers --seeds 1-20 --output-dir out/burgers
//   dles --config ns3d.cfg --set nu=1e-3 --snapshots 50

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dles/harness.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

std::vector<dles::ConfigEntry> parse_sets(const std::vector<std::string>& sets) {
    std::vector<dles::ConfigEntry> out;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw dles::ConfigError(s, "--set expects KEY=VALUE");
        }
        auto entries = dles::parse_config_text(s, "--set");
        out.insert(out.end(), entries.begin(), entries.end());
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DNS-aided discrete LES experiments: burgers, ns3d, spectral1d"};
    app.set_version_flag("--version", "dles 1.0");

    std::string experiment, config_path, seeds, output_dir, snapshots, threads;
    std::vector<std::string> sets;
    bool quiet = false, print_config = false;

    app.add_option("-e,--experiment", experiment, "burgers, ns3d or spectral1d");
    app.add_option("-c,--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
    app.add_option("--seeds", seeds, "seed list, e.g. 1-20 or 1,4,9");
    app.add_option("-o,--output-dir", output_dir, "directory for CSV files and snapshots");
    app.add_option("--snapshots", snapshots, "write field snapshots every N steps (0: never)");
    app.add_option("-j,--threads", threads, "worker threads (0: one per hardware thread)");
    app.add_option("-s,--set", sets, "override any config key, KEY=VALUE (repeatable)");
    app.add_flag("--print-config", print_config, "print the resolved config and exit");
    app.add_flag("-q,--quiet", quiet, "no progress messages");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    dles::ExperimentConfig cfg;
    try {
        std::vector<dles::ConfigEntry> file;
        if (!config_path.empty()) {
            file = dles::load_config_file(config_path);
        }
        std::vector<dles::ConfigEntry> flags;
        auto flag = [&](const char* key, const std::string& v) {
            if (!v.empty()) {
                flags.push_back({key, v});
            }
        };
        flag("experiment", experiment);
        flag("seeds", seeds);
        flag("output_dir", output_dir);
        flag("snapshot_every", snapshots);
        flag("threads", threads);
        for (auto& e : parse_sets(sets)) {
            flags.push_back(std::move(e));
        }
        cfg = dles::resolve_config(file, flags);
    } catch (const dles::Error& e) {
        std::cerr << "dles: " << e.what() << "\n";
        return exit_config;
    }

    if (print_config) {
        std::cout << cfg.canonical() << "output_dir = " << cfg.output_dir << "\n";
        return exit_ok;
    }

    dles::RunOptions opt;
    if (!quiet) {
        opt.log = [](const std::string& s) { std::cerr << s << "\n"; };
        std::cerr << "running " << dles::to_string(cfg.experiment) << " with " << cfg.seeds.size() << " seed(s)\n";
    }
    try {
        const auto records = dles::run_experiment(cfg, opt);
        const auto files = dles::write_outputs(cfg, records);
        std::cout << dles::emit_table(records).text;
        double wall = 0.0;
        for (const auto& r : records) {
            wall += r.wall_seconds;
        }
        std::printf("total run time over seeds: %.1f s\n", wall);
        for (const auto& f : files) {
            std::cout << "wrote " << f.string() << "\n";
        }
    } catch (const dles::NumericalError& e) {
        std::cerr << "dles: numerical abort: " << e.what() << "\n";
        return exit_numerical;
    } catch (const dles::ConfigError& e) {
        std::cerr << "dles: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "dles: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_ok;
}
