// Command line front end: subcommands map onto the experiment runners, a
// plain-text config file provides the science parameters, and every flag
// overrides the matching config key. Exit codes: 0 ok, 2 config error,
// 3 singularity halt, 4 accumulation guard, 5 inconclusive convergence,
// 6 degenerate input, 1 anything else.

#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "fallball/config.hpp"
#include "fallball/errors.hpp"
#include "fallball/experiments.hpp"

namespace {

struct FlagBuffer {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(CLI::App* cmd, const std::string& flag, const std::string& key,
             const std::string& description) {
        auto holder = std::make_shared<std::string>();
        cmd->add_option_function<std::string>(
               flag,
               [this, key, holder](const std::string& value) {
                   entries.emplace_back(key, value);
               },
               description)
            ->expected(1);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"event-driven falling-ball simulator and hyperbolicity analyzer"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> modes = {
        {"simulate", "run the event-driven flow and write the event log"},
        {"lyapunov", "estimate the Lyapunov spectrum of the first-return map"},
        {"cone", "scan cone-boundary directions for strict invariance entry"},
        {"neutral", "compute neutral-space certificates and dimension curves"},
        {"sweep", "Lyapunov summaries over a grid of mass profiles"},
        {"degenerate-demo", "evolve the live subsystem of a degenerate state"},
    };

    std::vector<std::string> config_paths(modes.size());
    std::vector<FlagBuffer> buffers(modes.size());
    std::vector<CLI::App*> commands;

    for (std::size_t i = 0; i < modes.size(); ++i) {
        CLI::App* cmd = app.add_subcommand(modes[i].first, modes[i].second);
        cmd->add_option("-c,--config", config_paths[i], "plain-text config file");
        FlagBuffer& buf = buffers[i];
        buf.add(cmd, "--masses", "masses", "masses, bottom up, e.g. \"3 2 1\"");
        buf.add(cmd, "--h0", "h0", "energy shell (default 1)");
        buf.add(cmd, "--seed", "seed", "master seed");
        buf.add(cmd, "--q0", "q0", "explicit initial heights");
        buf.add(cmd, "--v0", "v0", "explicit initial velocities");
        buf.add(cmd, "--max-events", "max_events", "event budget");
        buf.add(cmd, "--max-time", "max_time", "time budget (0 disables)");
        buf.add(cmd, "--n-returns", "n_returns", "Poincare returns for spectra");
        buf.add(cmd, "--qr-stride", "qr_stride", "returns between reorthonormalizations");
        buf.add(cmd, "--history-stride", "history_stride", "returns between history snapshots");
        buf.add(cmd, "--horizon", "horizon_events", "cone scan horizon (events)");
        buf.add(cmd, "--points", "n_points", "sampled phase points (cone)");
        buf.add(cmd, "--max-restarts", "max_restarts", "restarts after singularities");
        buf.add(cmd, "--burst-limit", "burst_limit", "events allowed per burst window");
        buf.add(cmd, "--burst-window", "burst_window", "burst window length");
        buf.add(cmd, "--tie-tol", "tie_tol", "event-tie tolerance (relative)");
        buf.add(cmd, "--zero-threshold", "zero_threshold", "absolute zero-exponent threshold");
        buf.add(cmd, "--calibration-max", "calibration_max_exponent",
                "calibration max |flow exponent| for the 3x rule");
        buf.add(cmd, "--grid", "grid", "sweep grid, rows separated by ';'");
        buf.add(cmd, "--threads", "threads", "sweep parallelism (0 = hardware)");
        buf.add(cmd, "--out-dir", "out_dir", "output directory");
        buf.add(cmd, "--events-jsonl", "events_jsonl", "also write events.jsonl (true/false)");
        commands.push_back(cmd);
    }

    CLI11_PARSE(app, argc, argv);

    std::size_t selected = 0;
    for (std::size_t i = 0; i < commands.size(); ++i)
        if (commands[i]->parsed()) selected = i;

    try {
        fallball::ExperimentConfig config;
        if (!config_paths[selected].empty())
            config = fallball::parse_config_file(config_paths[selected]);
        config.mode = fallball::parse_run_mode(modes[selected].first);
        for (const auto& [key, value] : buffers[selected].entries)
            fallball::apply_config_entry(config, key, value, "flag --" + key);

        const fallball::RunResult result = fallball::run_experiment(config);
        if (result.status == "ok") {
            std::cout << "status: ok\nmanifest: " << result.manifest_path << "\n";
        } else {
            std::cerr << "status: " << result.status << "\n";
            if (!result.message.empty()) std::cerr << result.message << "\n";
            if (!result.manifest_path.empty())
                std::cerr << "manifest: " << result.manifest_path << "\n";
        }
        return static_cast<int>(result.exit_code);
    } catch (const fallball::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return static_cast<int>(fallball::ExitCode::ConfigError);
    } catch (const fallball::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(fallball::ExitCode::Failure);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(fallball::ExitCode::Failure);
    }
}
