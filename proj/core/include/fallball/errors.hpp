#ifndef FALLBALL_ERRORS_HPP
#define FALLBALL_ERRORS_HPP

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace fallball {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector lengths do not match the number of particles.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input state unusable (zero energy, frozen particles where motion is required).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A configuration violates a structural requirement (overlapping rods, bad masses).
class InvalidConfigurationError : public Error {
public:
    using Error::Error;
};

/// A documented precondition or internal consistency check failed.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Two candidate event times closer than the tie tolerance: the orbit is
/// numerically indistinguishable from a multiple collision. Never resolved
/// silently.
class SingularityError : public Error {
public:
    SingularityError(std::string msg, double t_abs, double t_first, double t_second,
                     int sigma_first, int sigma_second)
        : Error(std::move(msg)),
          t_abs(t_abs),
          t_first(t_first),
          t_second(t_second),
          sigma_first(sigma_first),
          sigma_second(sigma_second) {}

    double t_abs;      ///< absolute time at which prediction was attempted
    double t_first;    ///< smallest candidate event time (relative)
    double t_second;   ///< second smallest candidate event time (relative)
    int sigma_first;
    int sigma_second;
};

/// Velocity samples from the tail of an event burst, kept for the
/// accumulation diagnostics.
struct BurstReport {
    std::int64_t burst_limit = 0;
    double burst_window = 0.0;
    double t_trigger = 0.0;            ///< absolute time of the triggering event
    std::int64_t total_events = 0;     ///< events processed before the trigger
    std::vector<double> tail_times;    ///< absolute times, oldest first
    std::vector<int> tail_sigmas;
    std::vector<std::vector<double>> tail_velocities;  ///< post-collision v per tail event

    /// max over particles of (max - min) of the velocity samples in [first, last).
    double velocity_oscillation(std::size_t first, std::size_t last) const;
};

/// More than burst_limit events fell inside one burst_window: the orbit is
/// behaving like a perturbed degenerate one (event accumulation).
class AccumulationGuardError : public Error {
public:
    AccumulationGuardError(std::string msg, std::shared_ptr<const BurstReport> report)
        : Error(std::move(msg)), report_(std::move(report)) {}

    const BurstReport& report() const { return *report_; }
    std::shared_ptr<const BurstReport> report_ptr() const { return report_; }

private:
    std::shared_ptr<const BurstReport> report_;
};

/// The finite-difference oracle could not produce a trustworthy answer
/// (perturbed orbits crossed a singularity, or the Richardson check failed).
class OracleUnreliableError : public Error {
public:
    using Error::Error;
};

/// Config file could not be parsed; message carries file/line/field context.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace fallball

#endif
