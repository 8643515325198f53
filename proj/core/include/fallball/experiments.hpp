#ifndef FALLBALL_EXPERIMENTS_HPP
#define FALLBALL_EXPERIMENTS_HPP

#include <nlohmann/json.hpp>
#include <string>

#include "fallball/config.hpp"
#include "fallball/mass_profile.hpp"
#include "fallball/phase_state.hpp"

namespace fallball {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Process exit codes, one per failure class, for scriptable pipelines.
enum class ExitCode : int {
    Ok = 0,
    Failure = 1,
    ConfigError = 2,
    Singularity = 3,
    GuardTrigger = 4,
    Inconclusive = 5,
    DegenerateInput = 6,
};

struct RunResult {
    ExitCode exit_code = ExitCode::Ok;
    std::string status;         ///< "ok" or a short failure tag
    std::string message;        ///< human-readable detail on failure
    std::string manifest_path;  ///< always written, also on failure
    nlohmann::json manifest;
};

/// Build the initial state for a config: explicit (q0, v0) validated against
/// the shell, or sampled from the seed.
PhaseState initial_state(const MassProfile& mp, const ExperimentConfig& config);

RunResult run_simulate(const ExperimentConfig& config);
RunResult run_lyapunov(const ExperimentConfig& config);
RunResult run_cone(const ExperimentConfig& config);
RunResult run_neutral(const ExperimentConfig& config);
RunResult run_sweep(const ExperimentConfig& config);
RunResult run_degenerate_demo(const ExperimentConfig& config);

/// Dispatch on config.mode.
RunResult run_experiment(const ExperimentConfig& config);

/// Shortest round-trip decimal formatting (deterministic output files).
std::string format_double(double x);

/// FNV-1a 64-bit digest, hex; used for output digests in manifests.
std::string fnv1a64_hex(const std::string& bytes);

/// Config echo as JSON (every effective field).
nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace fallball

#endif
