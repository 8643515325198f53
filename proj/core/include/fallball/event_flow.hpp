#ifndef FALLBALL_EVENT_FLOW_HPP
#define FALLBALL_EVENT_FLOW_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "fallball/defaults.hpp"
#include "fallball/errors.hpp"
#include "fallball/mass_profile.hpp"
#include "fallball/phase_state.hpp"

namespace fallball {

/// One collision, fully timestamped. sigma = 0 is the floor, sigma = i >= 1
/// the pair (i, i+1). Positions are recorded after contact snapping, so
/// q_1 = 0 (floor) or q_i = q_{i+1} (pair) holds exactly.
struct CollisionEvent {
    double t = 0.0;  ///< absolute time
    int sigma = 0;
    Eigen::VectorXd q;
    Eigen::VectorXd v_pre;
    Eigen::VectorXd v_post;
};

/// Collision types and times of a trajectory segment, strictly increasing in time.
struct SymbolicSequence {
    std::vector<int> sigmas;
    std::vector<double> times;

    std::size_t size() const { return sigmas.size(); }
    bool operator==(const SymbolicSequence& other) const { return sigmas == other.sigmas; }
};

/// Next collision: time dt from now (may be 0 at a contact) and its type.
struct EventPrediction {
    double dt = 0.0;
    int sigma = 0;
};

struct AdvanceBudget {
    std::optional<std::int64_t> max_events;
    std::optional<double> max_time;
};

struct AdvanceOptions {
    double tie_tol = defaults::kEventTieTol;
    std::int64_t burst_limit = defaults::kBurstLimit;
    double burst_window = defaults::kBurstWindow;
    bool record_events = true;
    int burst_tail_capacity = defaults::kBurstTailCapacity;
};

struct AdvanceDiagnostics {
    std::int64_t n_events = 0;
    double elapsed_time = 0.0;
    double event_rate = 0.0;            ///< events per unit time
    std::int64_t max_burst_count = 0;   ///< most events seen in any burst_window
    double max_energy_drift = 0.0;      ///< max |H - energy_target| over events
};

struct Trajectory {
    PhaseState final_state;
    std::vector<CollisionEvent> events;
    AdvanceDiagnostics diagnostics;

    SymbolicSequence symbols() const;
};

/// Free fall for time dt: q += v dt - dt^2/2, v -= dt. Throws if the flight
/// crosses a collision (detected exactly: the floor height is a downward
/// parabola and gaps are linear, so an endpoint ordering violation is
/// equivalent to a crossing).
PhaseState free_flight(const PhaseState& state, double dt);

/// Earliest collision candidate. Floor time is the positive root of
/// q_1 + v_1 t - t^2/2 = 0; pair times are linear gap crossings
/// (q_{i+1} - q_i) / (v_i - v_{i+1}). Throws SingularityError when the two
/// smallest candidates are closer than tie_tol (relative), and
/// DegenerateInputError for degenerate states.
EventPrediction next_event(const MassProfile& mp, const PhaseState& state,
                           double tie_tol = defaults::kEventTieTol);

/// Elastic pair collision at bond i (particles i, i+1, 1-based):
/// v_i+ = gamma_i v_i- + (1-gamma_i) v_{i+1}-,
/// v_{i+1}+ = (1+gamma_i) v_i- - gamma_i v_{i+1}-.
/// Requires contact (within snap_tol, positions are then set exactly equal)
/// and approach v_i > v_{i+1}.
PhaseState apply_pair_collision(const MassProfile& mp, const PhaseState& state, int bond,
                                double snap_tol = 1e-9);

/// Floor bounce: v_1 -> -v_1. Requires q_1 = 0 (snapped) and v_1 < 0.
PhaseState apply_floor_collision(const PhaseState& state, double snap_tol = 1e-9);

/// Event-driven evolution: alternate next_event / free_flight / collision
/// until the budget is exhausted. Contact coordinates are snapped exactly at
/// every event. Throws SingularityError, AccumulationGuardError, or
/// DegenerateInputError (degenerate states are refused).
Trajectory advance(const MassProfile& mp, PhaseState state, const AdvanceBudget& budget,
                   const AdvanceOptions& options = {});

/// Degenerate-state evolution: the k frozen particles stay on the floor
/// forever; the live subsystem above them runs as its own falling-ball
/// system (a collision with the frozen stack reflects like a floor bounce).
/// Events are reported with the original particle labels.
Trajectory advance_degenerate(const MassProfile& mp, const PhaseState& state,
                              const AdvanceBudget& budget, const AdvanceOptions& options = {});

}  // namespace fallball

#endif
