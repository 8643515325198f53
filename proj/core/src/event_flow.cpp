#include "fallball/event_flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace fallball {

namespace {

// Residual slack when checking that a flight did not cross an event: contact
// snapping keeps true residuals at roundoff scale, far below this.
constexpr double kFlightSlack = 1e-9;

struct RingBuffer {
    explicit RingBuffer(int capacity) : capacity(std::max(capacity, 1)) {}

    void push(double t, int sigma, const Eigen::VectorXd& v) {
        if (static_cast<int>(times.size()) == capacity) {
            times.pop_front();
            sigmas.pop_front();
            velocities.pop_front();
        }
        times.push_back(t);
        sigmas.push_back(sigma);
        velocities.emplace_back(v.data(), v.data() + v.size());
    }

    int capacity;
    std::deque<double> times;
    std::deque<int> sigmas;
    std::deque<std::vector<double>> velocities;
};

}  // namespace

double BurstReport::velocity_oscillation(std::size_t first, std::size_t last) const {
    if (tail_velocities.empty() || first >= last) return 0.0;
    last = std::min(last, tail_velocities.size());
    const std::size_t n = tail_velocities.front().size();
    double osc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t k = first; k < last; ++k) {
            lo = std::min(lo, tail_velocities[k][i]);
            hi = std::max(hi, tail_velocities[k][i]);
        }
        osc = std::max(osc, hi - lo);
    }
    return osc;
}

SymbolicSequence Trajectory::symbols() const {
    SymbolicSequence seq;
    seq.sigmas.reserve(events.size());
    seq.times.reserve(events.size());
    for (const auto& e : events) {
        seq.sigmas.push_back(e.sigma);
        seq.times.push_back(e.t);
    }
    return seq;
}

PhaseState free_flight(const PhaseState& state, double dt) {
    if (!(dt >= 0.0)) throw ContractViolation("flight time must be nonnegative");
    PhaseState out = state;
    out.q.array() += state.v.array() * dt - 0.5 * dt * dt;
    out.v.array() -= dt;
    // The floor height is a downward parabola and each gap is linear in t, so
    // crossing an event during the flight is equivalent to an endpoint
    // violation.
    if (out.q(0) < -kFlightSlack)
        throw ContractViolation("free flight crossed the floor event");
    for (int i = 0; i + 1 < out.size(); ++i) {
        if (out.q(i + 1) - out.q(i) < -kFlightSlack)
            throw ContractViolation("free flight crossed the pair event at bond " +
                                    std::to_string(i + 1));
    }
    return out;
}

EventPrediction next_event(const MassProfile& mp, const PhaseState& state, double tie_tol) {
    if (state.q.size() != mp.size() || state.v.size() != mp.size())
        throw DimensionError("state size does not match mass profile");
    if (is_degenerate(mp, state).degenerate)
        throw DegenerateInputError("next_event undefined on degenerate states");

    const int n = state.size();
    double best = std::numeric_limits<double>::infinity();
    double second = best;
    int best_sigma = -1;
    int second_sigma = -1;

    auto offer = [&](double t, int sigma) {
        if (t < best) {
            second = best;
            second_sigma = best_sigma;
            best = t;
            best_sigma = sigma;
        } else if (t < second) {
            second = t;
            second_sigma = sigma;
        }
    };

    // Floor: positive root of q_1 + v_1 t - t^2/2 = 0, in the
    // cancellation-free branch for downward velocities.
    {
        const double q1 = std::max(state.q(0), 0.0);
        const double v1 = state.v(0);
        const double disc = std::sqrt(v1 * v1 + 2.0 * q1);
        const double t = v1 < 0.0 ? 2.0 * q1 / (disc - v1) : v1 + disc;
        offer(std::max(t, 0.0), 0);
    }

    // Pairs: every particle shares the acceleration, so gaps evolve linearly.
    for (int i = 0; i + 1 < n; ++i) {
        const double rel = state.v(i) - state.v(i + 1);
        if (rel > 0.0) {
            const double gap = std::max(state.q(i + 1) - state.q(i), 0.0);
            offer(gap / rel, i + 1);
        }
    }

    if (best_sigma < 0)
        throw ContractViolation("no candidate event (unreachable for valid states)");
    if (second_sigma >= 0 && second - best <= tie_tol * best) {
        throw SingularityError(
            "candidate events of type " + std::to_string(best_sigma) + " and " +
                std::to_string(second_sigma) + " coincide at t = " + std::to_string(best),
            0.0, best, second, best_sigma, second_sigma);
    }
    return {best, best_sigma};
}

PhaseState apply_pair_collision(const MassProfile& mp, const PhaseState& state, int bond,
                                double snap_tol) {
    if (bond < 1 || bond >= mp.size())
        throw ContractViolation("pair bond out of range: " + std::to_string(bond));
    const int i = bond - 1;
    const int j = bond;
    if (std::abs(state.q(j) - state.q(i)) > snap_tol)
        throw ContractViolation("pair collision without contact at bond " + std::to_string(bond));
    if (!(state.v(i) > state.v(j)))
        throw ContractViolation("pair collision without approach at bond " + std::to_string(bond));

    PhaseState out = state;
    out.q(i) = out.q(j);  // exact contact
    const double g = mp.gamma_at(bond);
    const double vi = state.v(i);
    const double vj = state.v(j);
    out.v(i) = g * vi + (1.0 - g) * vj;
    out.v(j) = (1.0 + g) * vi - g * vj;
    if (!(out.v(i) < out.v(j)))
        throw ContractViolation("post-collision particles do not separate at bond " +
                                std::to_string(bond));
    return out;
}

PhaseState apply_floor_collision(const PhaseState& state, double snap_tol) {
    if (std::abs(state.q(0)) > snap_tol)
        throw ContractViolation("floor collision away from the floor");
    if (!(state.v(0) < 0.0)) throw ContractViolation("floor collision without approach");
    PhaseState out = state;
    out.q(0) = 0.0;
    out.v(0) = -state.v(0);
    return out;
}

namespace {

struct StepResult {
    CollisionEvent event;
    double dt = 0.0;
};

// One free_flight / collision cycle for an already-predicted event. `t_abs`
// is the absolute time assigned to the recorded event.
StepResult step_one_event(const MassProfile& mp, PhaseState& state, double t_abs,
                          const EventPrediction& pred) {
    state = free_flight(state, pred.dt);
    StepResult out;
    out.dt = pred.dt;
    out.event.t = t_abs + pred.dt;
    out.event.sigma = pred.sigma;
    out.event.v_pre = state.v;
    if (pred.sigma == 0)
        state = apply_floor_collision(state);
    else
        state = apply_pair_collision(mp, state, pred.sigma);
    out.event.q = state.q;
    out.event.v_post = state.v;
    return out;
}

Trajectory advance_impl(const MassProfile& mp, PhaseState state, const AdvanceBudget& budget,
                        const AdvanceOptions& options, int sigma_offset) {
    if (!budget.max_events && !budget.max_time)
        throw ContractViolation("advance budget must bound events or time");

    Trajectory traj;
    RingBuffer tail(options.burst_tail_capacity);
    std::deque<double> window;
    double elapsed = 0.0;
    std::int64_t n_events = 0;

    auto finish = [&]() {
        traj.final_state = std::move(state);
        traj.diagnostics.n_events = n_events;
        traj.diagnostics.elapsed_time = elapsed;
        traj.diagnostics.event_rate = elapsed > 0.0 ? static_cast<double>(n_events) / elapsed : 0.0;
        return std::move(traj);
    };

    while (true) {
        if (budget.max_events && n_events >= *budget.max_events) return finish();
        if (budget.max_time && elapsed >= *budget.max_time) return finish();

        const EventPrediction pred = next_event(mp, state, options.tie_tol);
        if (budget.max_time && elapsed + pred.dt > *budget.max_time) {
            state = free_flight(state, *budget.max_time - elapsed);
            elapsed = *budget.max_time;
            return finish();
        }

        StepResult step = step_one_event(mp, state, elapsed, pred);
        elapsed = step.event.t;
        ++n_events;

        step.event.sigma += sigma_offset;
        tail.push(elapsed, step.event.sigma, step.event.v_post);
        if (options.record_events) traj.events.push_back(std::move(step.event));

        const double drift = std::abs(total_energy(mp, state) - state.energy_target);
        traj.diagnostics.max_energy_drift = std::max(traj.diagnostics.max_energy_drift, drift);

        window.push_back(elapsed);
        while (!window.empty() && window.front() < elapsed - options.burst_window)
            window.pop_front();
        traj.diagnostics.max_burst_count =
            std::max(traj.diagnostics.max_burst_count, static_cast<std::int64_t>(window.size()));
        if (static_cast<std::int64_t>(window.size()) > options.burst_limit) {
            auto report = std::make_shared<BurstReport>();
            report->burst_limit = options.burst_limit;
            report->burst_window = options.burst_window;
            report->t_trigger = elapsed;
            report->total_events = n_events;
            report->tail_times.assign(tail.times.begin(), tail.times.end());
            report->tail_sigmas.assign(tail.sigmas.begin(), tail.sigmas.end());
            report->tail_velocities.assign(tail.velocities.begin(), tail.velocities.end());
            throw AccumulationGuardError(
                "more than " + std::to_string(options.burst_limit) + " events within window " +
                    std::to_string(options.burst_window) + " at t = " + std::to_string(elapsed),
                std::move(report));
        }
    }
}

}  // namespace

Trajectory advance(const MassProfile& mp, PhaseState state, const AdvanceBudget& budget,
                   const AdvanceOptions& options) {
    validate_state(mp, state);
    if (is_degenerate(mp, state).degenerate)
        throw DegenerateInputError(
            "advance refuses degenerate states; use advance_degenerate for the demo convention");
    return advance_impl(mp, std::move(state), budget, options, 0);
}

Trajectory advance_degenerate(const MassProfile& mp, const PhaseState& state,
                              const AdvanceBudget& budget, const AdvanceOptions& options) {
    const Degeneracy deg = is_degenerate(mp, state);
    if (!deg.degenerate) return advance(mp, state, budget, options);

    const int n = mp.size();
    const int k = deg.frozen_count;
    const int live = n - k;

    Trajectory traj;
    if (live == 0) {
        traj.final_state = state;
        return traj;
    }

    auto embed = [&](const Eigen::VectorXd& sub) {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
        full.tail(live) = sub;
        return full;
    };

    if (live == 1) {
        // Single live ball on top of the frozen stack: closed-form bounces.
        if (!budget.max_events && !budget.max_time)
            throw ContractViolation("advance budget must bound events or time");
        double q = state.q(n - 1), v = state.v(n - 1), t = 0.0;
        std::int64_t n_events = 0;
        while (true) {
            if (budget.max_events && n_events >= *budget.max_events) break;
            const double disc = std::sqrt(v * v + 2.0 * std::max(q, 0.0));
            const double dt = v < 0.0 ? 2.0 * std::max(q, 0.0) / (disc - v) : v + disc;
            if (budget.max_time && t + dt > *budget.max_time) {
                q += v * (*budget.max_time - t) - 0.5 * (*budget.max_time - t) * (*budget.max_time - t);
                v -= *budget.max_time - t;
                t = *budget.max_time;
                break;
            }
            t += dt;
            v -= dt;
            q = 0.0;
            CollisionEvent e;
            e.t = t;
            e.sigma = k;  // contact with the top of the frozen stack
            Eigen::VectorXd vp = Eigen::VectorXd::Zero(n);
            vp(n - 1) = v;
            e.v_pre = vp;
            v = -v;
            vp(n - 1) = v;
            e.v_post = vp;
            e.q = Eigen::VectorXd::Zero(n);
            if (options.record_events) traj.events.push_back(std::move(e));
            ++n_events;
        }
        PhaseState fs;
        fs.q = embed(Eigen::VectorXd::Constant(1, q));
        fs.v = embed(Eigen::VectorXd::Constant(1, v));
        fs.energy_target = state.energy_target;
        traj.final_state = std::move(fs);
        traj.diagnostics.n_events = n_events;
        traj.diagnostics.elapsed_time = t;
        traj.diagnostics.event_rate = t > 0.0 ? static_cast<double>(n_events) / t : 0.0;
        return traj;
    }

    // Live subsystem is itself a falling-ball system whose floor is the top
    // of the frozen stack; relabel its events back to the full system.
    std::vector<double> sub_masses(state.size() - k);
    for (int i = 0; i < live; ++i) sub_masses[i] = mp.m()(k + i);
    MassProfile sub_mp(sub_masses);
    PhaseState sub;
    sub.q = state.q.tail(live);
    sub.v = state.v.tail(live);
    sub.energy_target = total_energy(sub_mp, sub.q, sub.v);

    Trajectory sub_traj = advance_impl(sub_mp, std::move(sub), budget, options, k);

    traj.diagnostics = sub_traj.diagnostics;
    traj.events.reserve(sub_traj.events.size());
    for (auto& e : sub_traj.events) {
        CollisionEvent full;
        full.t = e.t;
        full.sigma = e.sigma;  // already offset by k
        full.q = embed(e.q);
        full.v_pre = embed(e.v_pre);
        full.v_post = embed(e.v_post);
        traj.events.push_back(std::move(full));
    }
    PhaseState fs;
    fs.q = embed(sub_traj.final_state.q);
    fs.v = embed(sub_traj.final_state.v);
    fs.energy_target = state.energy_target;
    traj.final_state = std::move(fs);
    return traj;
}

}  // namespace fallball
