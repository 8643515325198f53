#ifndef FALLBALL_TESTS_HELPERS_HPP
#define FALLBALL_TESTS_HELPERS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <initializer_list>
#include <vector>

#include "fallball/phase_state.hpp"

namespace fallball::testing {

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

inline PhaseState state_of(const MassProfile& mp, std::initializer_list<double> q,
                           std::initializer_list<double> v) {
    PhaseState s;
    s.q = vec(q);
    s.v = vec(v);
    s.energy_target = total_energy(mp, s.q, s.v);
    return s;
}

/// Closed-form single ball bouncing on the floor under unit gravity;
/// independent oracle for the event-driven flow.
struct BallOracle {
    double q0 = 0.0;
    double v0 = 0.0;

    double first_bounce() const { return v0 + std::sqrt(v0 * v0 + 2.0 * q0); }
    double floor_speed() const { return std::sqrt(v0 * v0 + 2.0 * q0); }

    std::vector<double> bounce_times(double horizon) const {
        std::vector<double> times;
        double t = first_bounce();
        const double period = 2.0 * floor_speed();
        if (period <= 0.0) return times;
        while (t <= horizon) {
            times.push_back(t);
            t += period;
        }
        return times;
    }

    /// (q, v) at time t.
    std::pair<double, double> at(double t) const {
        const double t1 = first_bounce();
        if (t < t1) return {q0 + v0 * t - 0.5 * t * t, v0 - t};
        const double s = floor_speed();
        const double period = 2.0 * s;
        const double tau = std::fmod(t - t1, period);
        return {s * tau - 0.5 * tau * tau, s - tau};
    }
};

}  // namespace fallball::testing

#endif
