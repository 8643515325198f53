#ifndef FALLBALL_PHASE_STATE_HPP
#define FALLBALL_PHASE_STATE_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "fallball/defaults.hpp"
#include "fallball/mass_profile.hpp"

namespace fallball {

/// Positions and velocities on (or near) the energy shell H = energy_target.
/// Heights are ordered 0 <= q_1 <= ... <= q_n. Plain value type; validation
/// is explicit via validate_state.
struct PhaseState {
    Eigen::VectorXd q;
    Eigen::VectorXd v;
    double energy_target = 1.0;

    int size() const { return static_cast<int>(q.size()); }
};

/// H = sum_i (m_i q_i + 1/2 m_i v_i^2).
double total_energy(const MassProfile& mp, const Eigen::VectorXd& q, const Eigen::VectorXd& v);
double total_energy(const MassProfile& mp, const PhaseState& state);

/// Per-particle energies h_i = m_i q_i + 1/2 m_i v_i^2; they sum to H.
Eigen::VectorXd particle_energies(const MassProfile& mp, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& v);

/// Throws unless lengths match, ordering 0 <= q_1 <= ... <= q_n holds
/// (exact comparisons, no epsilon) and |H - energy_target| <= tol.
void validate_state(const MassProfile& mp, const PhaseState& state,
                    double energy_tol = defaults::kEnergyValidationTol);

/// Rescale (q, v) -> (s^2 q, s v) with s = sqrt(h0 / H) so the result lies
/// on the shell H = h0 (homogeneity H(s^2 q, s v) = s^2 H(q, v)).
PhaseState normalize_to_shell(const MassProfile& mp, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& v, double h0);

struct RodConversion {
    PhaseState state;
    double h0;  ///< energy level after the shift
};

/// Hard rods of radius r at centers q_rods map to point particles via
/// q_i -> q_i - (2i-1) r; velocities unchanged; the fixed energy level drops
/// by r * sum (2i-1) m_i.
RodConversion rods_to_points(double r, const MassProfile& mp, const Eigen::VectorXd& q_rods,
                             const Eigen::VectorXd& v, double h0);

/// Inverse of rods_to_points.
RodConversion points_to_rods(double r, const MassProfile& mp, const Eigen::VectorXd& q_points,
                             const Eigen::VectorXd& v, double h0);

/// Draw a valid nondegenerate state on the shell H = h0: positions from a
/// sorted uniform draw, velocities Gaussian, then shell-normalized.
/// Deterministic given the seed; rejection-resamples until valid.
PhaseState sample_state(const MassProfile& mp, double h0, std::uint64_t seed);

struct Degeneracy {
    bool degenerate = false;
    int frozen_count = 0;  ///< maximal k with q_1..q_k and v_1..v_k all ~ 0
};

/// A state is degenerate when k >= 1 bottom particles are stuck on the floor
/// with zero energy (|q_i|, |v_i| <= tol for i <= k).
Degeneracy is_degenerate(const MassProfile& mp, const PhaseState& state,
                         double tol = defaults::kDegeneracyTol);

}  // namespace fallball

#endif
