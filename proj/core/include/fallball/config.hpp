#ifndef FALLBALL_CONFIG_HPP
#define FALLBALL_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fallball/defaults.hpp"

namespace fallball {

enum class RunMode { Simulate, Lyapunov, Cone, Neutral, Sweep, DegenerateDemo };

std::string to_string(RunMode mode);
RunMode parse_run_mode(const std::string& text);

/// Everything a run needs, read from a plain-text key/value config file.
/// Science parameters live here only (no environment variables), so the
/// manifest echo is complete.
struct ExperimentConfig {
    RunMode mode = RunMode::Simulate;

    std::vector<double> masses;
    double h0 = 1.0;
    std::uint64_t seed = 1;

    /// Optional explicit initial state; sampled from the seed when absent.
    std::optional<std::vector<double>> q0;
    std::optional<std::vector<double>> v0;

    // budgets
    std::int64_t max_events = 100000;
    std::optional<double> max_time;
    std::int64_t n_returns = 100000;
    int qr_stride = 5;
    std::int64_t history_stride = 100;
    std::int64_t horizon_events = 500;
    int n_points = 100;
    int max_restarts = 5;

    // guards and tolerances
    std::int64_t burst_limit = defaults::kBurstLimit;
    double burst_window = defaults::kBurstWindow;
    double tie_tol = defaults::kEventTieTol;

    // zero-exponent threshold rule (flow units)
    std::optional<double> zero_threshold;             ///< absolute
    std::optional<double> calibration_max_exponent;   ///< 3x this value

    // sweep grid: one mass list per grid point
    std::vector<std::vector<double>> grid;
    int threads = 0;  ///< 0 = hardware concurrency

    std::string out_dir = "out";
    bool events_jsonl = false;

    void validate() const;  ///< throws ConfigError on bad field combinations
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

/// Apply one `key = value` assignment (also used for CLI flag overrides).
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value, const std::string& context);

}  // namespace fallball

#endif
