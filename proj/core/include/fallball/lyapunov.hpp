#ifndef FALLBALL_LYAPUNOV_HPP
#define FALLBALL_LYAPUNOV_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fallball/event_flow.hpp"
#include "fallball/mass_profile.hpp"
#include "fallball/phase_state.hpp"
#include "fallball/tangent.hpp"

namespace fallball {

/// A point of the Poincare section: the state immediately after a collision.
struct SectionPoint {
    PhaseState state;
    int last_sigma = -1;
    double t_abs = 0.0;
};

/// Advance a state to just after its first collision, producing a section point.
SectionPoint first_section_point(const MassProfile& mp, const PhaseState& state,
                                 double tie_tol = defaults::kEventTieTol);

struct PoincareStep {
    SectionPoint point;
    double return_time = 0.0;
    CollisionEvent event;
};

/// One application of the first-return map: exactly one collision ahead.
/// Return times are checked against a generous cap derived from the energy
/// shell (the first particle must meet the floor by then).
PoincareStep poincare_step(const MassProfile& mp, const SectionPoint& sp,
                           double tie_tol = defaults::kEventTieTol);

/// One cocycle step: advances the section point and pushes every frame
/// column through the collision jump (flight transport is the identity),
/// then projects back to the section.
PoincareStep cocycle_step(const MassProfile& mp, const SectionPoint& sp, TangentFrame& frame,
                          double tie_tol = defaults::kEventTieTol);

struct SpectrumOptions {
    std::int64_t n_returns = 100000;
    int qr_stride = 5;
    std::uint64_t seed = 1;
    int max_restarts = 5;
    std::int64_t history_stride = 100;  ///< running estimates recorded this often
    double tie_tol = defaults::kEventTieTol;
    std::int64_t burst_limit = defaults::kBurstLimit;
    double burst_window = defaults::kBurstWindow;
};

/// Lyapunov spectrum of the first-return cocycle, estimated by QR
/// reorthonormalization of a random orthonormal frame.
struct LyapunovEstimate {
    std::vector<double> map_exponents;   ///< per return, sorted descending
    std::vector<double> flow_exponents;  ///< map exponents / mean return time
    double mean_return_time = 0.0;
    std::int64_t n_returns = 0;
    int restarts = 0;
    std::vector<std::int64_t> history_returns;
    std::vector<std::vector<double>> history;  ///< running map exponents per snapshot

    /// max_k |lambda_k + lambda_{2n-1-k}| over the sorted map exponents.
    double pairing_defect() const;
    double max_abs_flow_exponent() const;
    double min_abs_flow_exponent() const;
};

/// Iterate the cocycle from a random orthonormal section frame, QR-factoring
/// every qr_stride returns and accumulating log diagonal factors. On a
/// singularity the run restarts from a slightly perturbed initial state (up
/// to max_restarts, recorded).
LyapunovEstimate estimate_spectrum(const MassProfile& mp, const PhaseState& initial,
                                   const SpectrumOptions& options = {});

struct ZeroThresholdRule {
    double threshold = 0.0;  ///< |flow exponent| below this counts as zero
    std::string description;
};

ZeroThresholdRule absolute_zero_threshold(double threshold);

/// Default rule: 3x the max |flow exponent| of an equal-mass calibration run.
ZeroThresholdRule calibrated_zero_threshold(double calibration_max_abs_flow_exponent,
                                            double multiplier = 3.0);

struct ZeroCount {
    bool conclusive = false;
    int count = 0;
    std::string reason;
};

/// Count flow exponents below the threshold. An exponent counts as settled
/// when its running history over the last half either stays inside the zero
/// band or stays outside with relative oscillation below 10%; otherwise the
/// whole count is inconclusive.
ZeroCount zero_exponent_count(const LyapunovEstimate& estimate, const ZeroThresholdRule& rule);

}  // namespace fallball

#endif
