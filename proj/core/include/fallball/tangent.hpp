#ifndef FALLBALL_TANGENT_HPP
#define FALLBALL_TANGENT_HPP

#include <Eigen/Dense>
#include <vector>

#include "fallball/defaults.hpp"
#include "fallball/event_flow.hpp"
#include "fallball/mass_profile.hpp"
#include "fallball/phase_state.hpp"

namespace fallball {

/// Tangent data in (dh, dv) coordinates, restricted to the transversal
/// section: sum dh_i = 0 (tangency to the energy shell) and sum dv_i = 0
/// (quotient representative transversal to the flow direction).
struct TangentVector {
    Eigen::VectorXd dh;
    Eigen::VectorXd dv;

    int size() const { return static_cast<int>(dh.size()); }
    static TangentVector zero(int n);

    double squared_norm() const { return dh.squaredNorm() + dv.squaredNorm(); }
    double norm() const;

    /// Stacked (dh; dv) as one 2n-vector.
    Eigen::VectorXd flat() const;
    static TangentVector from_flat(const Eigen::VectorXd& x);
};

TangentVector operator+(const TangentVector& a, const TangentVector& b);
TangentVector operator-(const TangentVector& a, const TangentVector& b);
TangentVector operator*(double s, const TangentVector& a);

/// Reduced symplectic form omega(u, w) = <u.dh, w.dv> - <u.dv, w.dh>;
/// preserved exactly by every tangent jump on the section.
double symplectic_form(const TangentVector& u, const TangentVector& w);

/// Quotient by the flow direction (0; -1,...,-1): dv loses its mean, dh is
/// untouched. Leaves Q unchanged when sum dh = 0. Idempotent.
TangentVector project_to_section(TangentVector tv);

/// Convert (dq, dp) to section coordinates: dh_i = m_i dq_i + v_i dp_i,
/// dv_i = dp_i / m_i, then project to the section. Input must be tangent to
/// the energy shell (sum dh = 0 within tol).
TangentVector from_qp(const MassProfile& mp, const PhaseState& state, const Eigen::VectorXd& dq,
                      const Eigen::VectorXd& dp, double tol = defaults::kSectionSumTol);

struct QpVector {
    Eigen::VectorXd dq;
    Eigen::VectorXd dp;
};

/// Inverse of from_qp on the section: dp_i = m_i dv_i, dq_i = dh_i/m_i - v_i dv_i.
QpVector to_qp(const MassProfile& mp, const PhaseState& state, const TangentVector& tv);

/// Between collisions d/dt (dh) = d/dt (dv) = 0: transport is the identity.
TangentVector transport_flight(const TangentVector& tv, double dt);

/// The n x n collision matrix R_i: identity except the 2x2 block
/// [[gamma, 1-gamma], [1+gamma, -gamma]] at rows/columns (i, i+1). Satisfies
/// R_i^2 = 1 and D R_i D^{-1} = R_i^T with D = diag(m).
Eigen::MatrixXd r_matrix(const MassProfile& mp, int bond);

/// Tangent jump across an (i, i+1) collision with approach speed
/// w = v_i - v_{i+1} > 0:
///   dv+ = R_i dv-,
///   dh+ = R_i^T dh- + gamma_i c_i w (dv-_{i+1} - dv-_i) (e_i - e_{i+1}),
/// followed by the section projection. Reduces to dh+ = R_i^T dh- for
/// dv = 0 and to plain swaps when gamma_i = 0.
TangentVector jump_pair(const MassProfile& mp, const PhaseState& state_pre, int bond,
                        const TangentVector& tv);

/// Tangent jump across a floor bounce (q_1 = 0, v_1 < 0): dh is unchanged,
/// dv_1 gains -2 dh_1 / (m_1 v_1-); section projection applied. Identity on
/// vectors with dh_1 = 0.
TangentVector jump_floor(const MassProfile& mp, const PhaseState& state_pre,
                         const TangentVector& tv);

/// Jump for a recorded event (uses the stored pre-collision velocities).
TangentVector apply_event_jump(const MassProfile& mp, const CollisionEvent& event,
                               const TangentVector& tv);

/// A set of tangent columns attached to a phase point.
struct TangentFrame {
    std::vector<TangentVector> columns;
    PhaseState attached_state;

    /// Columns stacked into a 2n x k matrix.
    Eigen::MatrixXd matrix() const;
};

/// Orthonormal basis of the section subspace {sum dh = 0, sum dv = 0} as a
/// 2n x (2n-2) matrix of stacked (dh; dv) columns.
Eigen::MatrixXd section_basis(int n);

struct FdOracleOptions {
    double step = defaults::kFdStep;       ///< relative finite-difference step
    double consistency_tol = 1e-5;         ///< Richardson halving agreement
    double tie_tol = defaults::kEventTieTol;
};

/// Independent check of the analytic tangent maps: central finite
/// differences of the time-T flow map in (q, v), converted to section
/// coordinates at the endpoint. Requires the symbolic sequence over [0, T]
/// to be stable under the perturbation; a Richardson halving must agree to
/// consistency_tol, otherwise OracleUnreliableError.
TangentVector fd_oracle(const MassProfile& mp, const PhaseState& state, const TangentVector& tv,
                        double T, const FdOracleOptions& options = {});

/// Transport tv across a recorded trajectory (flight transport is the
/// identity, so this is the composition of the event jumps).
TangentVector transport_along(const MassProfile& mp, const std::vector<CollisionEvent>& events,
                              TangentVector tv);

}  // namespace fallball

#endif
