#include "fallball/phase_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fallball/errors.hpp"
#include "fallball/rng.hpp"

namespace fallball {

namespace {

void check_lengths(const MassProfile& mp, const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
    if (q.size() != mp.size() || v.size() != mp.size())
        throw DimensionError("state has " + std::to_string(q.size()) + "/" +
                             std::to_string(v.size()) + " components, mass profile has " +
                             std::to_string(mp.size()));
}

}  // namespace

double total_energy(const MassProfile& mp, const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
    check_lengths(mp, q, v);
    return (mp.m().array() * (q.array() + 0.5 * v.array().square())).sum();
}

double total_energy(const MassProfile& mp, const PhaseState& state) {
    return total_energy(mp, state.q, state.v);
}

Eigen::VectorXd particle_energies(const MassProfile& mp, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& v) {
    check_lengths(mp, q, v);
    return (mp.m().array() * (q.array() + 0.5 * v.array().square())).matrix();
}

void validate_state(const MassProfile& mp, const PhaseState& state, double energy_tol) {
    check_lengths(mp, state.q, state.v);
    if (!(state.q(0) >= 0.0)) throw ContractViolation("q_1 must be nonnegative");
    for (int i = 0; i + 1 < state.size(); ++i) {
        if (!(state.q(i) <= state.q(i + 1)))
            throw ContractViolation("ordering violated: q_" + std::to_string(i + 1) + " > q_" +
                                    std::to_string(i + 2));
    }
    const double h = total_energy(mp, state);
    if (!(std::abs(h - state.energy_target) <= energy_tol))
        throw ContractViolation("state is off the energy shell: H = " + std::to_string(h) +
                                ", target " + std::to_string(state.energy_target));
}

PhaseState normalize_to_shell(const MassProfile& mp, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& v, double h0) {
    if (!(h0 > 0.0)) throw ContractViolation("target energy must be positive");
    const double h = total_energy(mp, q, v);
    if (!(h > 0.0)) throw DegenerateInputError("cannot normalize a zero-energy state");
    const double s = std::sqrt(h0 / h);
    PhaseState out;
    out.q = (s * s) * q;
    out.v = s * v;
    out.energy_target = h0;
    return out;
}

RodConversion rods_to_points(double r, const MassProfile& mp, const Eigen::VectorXd& q_rods,
                             const Eigen::VectorXd& v, double h0) {
    check_lengths(mp, q_rods, v);
    if (!(r >= 0.0)) throw InvalidConfigurationError("rod radius must be nonnegative");
    if (q_rods(0) < r)
        throw InvalidConfigurationError("rod 1 overlaps the floor");
    for (int i = 0; i + 1 < mp.size(); ++i) {
        if (q_rods(i + 1) - q_rods(i) < 2.0 * r)
            throw InvalidConfigurationError("rods " + std::to_string(i + 1) + " and " +
                                            std::to_string(i + 2) + " overlap");
    }
    RodConversion out;
    out.state.q.resize(mp.size());
    double shift_energy = 0.0;
    for (int i = 0; i < mp.size(); ++i) {
        const double shift = (2.0 * i + 1.0) * r;  // (2i-1) r with 1-based i
        out.state.q(i) = q_rods(i) - shift;
        shift_energy += shift * mp.m()(i);
    }
    out.state.v = v;
    out.h0 = h0 - shift_energy;
    out.state.energy_target = out.h0;
    return out;
}

RodConversion points_to_rods(double r, const MassProfile& mp, const Eigen::VectorXd& q_points,
                             const Eigen::VectorXd& v, double h0) {
    check_lengths(mp, q_points, v);
    if (!(r >= 0.0)) throw InvalidConfigurationError("rod radius must be nonnegative");
    RodConversion out;
    out.state.q.resize(mp.size());
    double shift_energy = 0.0;
    for (int i = 0; i < mp.size(); ++i) {
        const double shift = (2.0 * i + 1.0) * r;
        out.state.q(i) = q_points(i) + shift;
        shift_energy += shift * mp.m()(i);
    }
    out.state.v = v;
    out.h0 = h0 + shift_energy;
    out.state.energy_target = out.h0;
    return out;
}

PhaseState sample_state(const MassProfile& mp, double h0, std::uint64_t seed) {
    if (!(h0 > 0.0)) throw ContractViolation("target energy must be positive");
    const int n = mp.size();
    Rng rng(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Eigen::VectorXd q(n), v(n);
        for (int i = 0; i < n; ++i) q(i) = rng.uniform01();
        std::sort(q.data(), q.data() + n);
        for (int i = 0; i < n; ++i) v(i) = rng.normal();

        // Reject draws touching the measure-zero sets: coincident heights,
        // a particle on the floor, equal adjacent velocities at contact.
        bool ok = q(0) > 0.0;
        for (int i = 0; ok && i + 1 < n; ++i) ok = q(i) < q(i + 1);
        if (!ok) continue;

        PhaseState state = normalize_to_shell(mp, q, v, h0);
        state.energy_target = h0;
        if (is_degenerate(mp, state).degenerate) continue;
        validate_state(mp, state);
        return state;
    }
    throw DegenerateInputError("sampler failed to produce a valid state");
}

Degeneracy is_degenerate(const MassProfile& mp, const PhaseState& state, double tol) {
    check_lengths(mp, state.q, state.v);
    Degeneracy d;
    for (int i = 0; i < state.size(); ++i) {
        if (std::abs(state.q(i)) <= tol && std::abs(state.v(i)) <= tol)
            d.frozen_count = i + 1;
        else
            break;
    }
    d.degenerate = d.frozen_count >= 1;
    return d;
}

}  // namespace fallball
