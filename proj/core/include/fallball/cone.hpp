#ifndef FALLBALL_CONE_HPP
#define FALLBALL_CONE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "fallball/defaults.hpp"
#include "fallball/event_flow.hpp"
#include "fallball/mass_profile.hpp"
#include "fallball/tangent.hpp"

namespace fallball {

/// Q((dh, dv)) = <dh, dv>. The cone is its nonnegativity set; Q is
/// nondecreasing along the tangent flow when masses are nonincreasing.
double q_form(const TangentVector& tv);

enum class ConeRegion { Interior, Boundary, Outside };

/// Classify by the sign of Q with a boundary band |Q| <= band * |tv|^2.
ConeRegion in_cone(const TangentVector& tv, double band = defaults::kConeBoundaryBand);

/// Closed-form Q increment across a pair jump: gamma_i c_i w (dv_{i+1} - dv_i)^2.
double q_jump_pair_delta(const MassProfile& mp, int bond, double w, const TangentVector& tv_pre);

/// Closed-form Q increment across a floor jump: -2 dh_1^2 / (m_1 v_1-) >= 0.
double q_jump_floor_delta(const MassProfile& mp, double v1_pre, const TangentVector& tv_pre);

/// Closed-form Q increment for a recorded event.
double q_event_delta(const MassProfile& mp, const CollisionEvent& event,
                     const TangentVector& tv_pre);

enum class ConeDirectionKind { PureDh, PureDv };

/// Cone-boundary direction tracked through a trajectory. The tracked vector
/// is renormalized to unit length after every event, so per-event deltas are
/// relative to a unit pre-event vector and q values stay bounded.
struct ConeReport {
    ConeDirectionKind kind = ConeDirectionKind::PureDh;
    int direction_index = 0;
    double q_initial = 0.0;
    double q_final = 0.0;
    std::vector<std::pair<std::int64_t, double>> per_event_deltas;
    std::optional<std::int64_t> strict_entry_event;  ///< first event with Q strictly positive
};

struct ScanOptions {
    std::int64_t horizon_events = 500;
    double strict_band = defaults::kStrictConeBand;
    AdvanceOptions advance;
};

/// Track the cone-boundary basis directions (pure-dh and pure-dv) through
/// the tangent jumps of the orbit of `state`. One report per direction.
std::vector<ConeReport> strict_invariance_scan(const MassProfile& mp, const PhaseState& state,
                                               const ScanOptions& options = {});

/// First event index by which every tracked direction has entered the open
/// cone, if all of them did.
std::optional<std::int64_t> all_entered_event(const std::vector<ConeReport>& reports);

/// Neutral directions of a recorded collision segment. basis_h spans the
/// initial (dh; 0) vectors that keep Q = 0 through the whole segment;
/// basis_v spans the (0; dv) vectors with the same property. Both are
/// determined by the symbolic collision sequence alone.
struct NeutralSpaceCertificate {
    SymbolicSequence segment;
    Eigen::MatrixXd basis_h;  ///< n x dim_h, orthonormal columns
    Eigen::MatrixXd basis_v;  ///< n x dim_v, orthonormal columns
    int dim_h = 0;
    int dim_v = 0;
};

/// Subspace of initial dh (sum dh = 0) such that the vector propagated by
/// R_sigma^T at pair events has first component zero at every floor event.
Eigen::MatrixXd neutral_space_h(const MassProfile& mp, const std::vector<CollisionEvent>& events,
                                double rank_threshold = defaults::kRankThreshold);

/// Subspace of initial dv (sum dv = 0) such that at every pair event with
/// gamma > 0 the running vector has equal components across the bond; swaps
/// apply at gamma = 0 events, floor events act as the identity.
Eigen::MatrixXd neutral_space_v(const MassProfile& mp, const std::vector<CollisionEvent>& events,
                                double rank_threshold = defaults::kRankThreshold);

NeutralSpaceCertificate neutral_space(const MassProfile& mp,
                                      const std::vector<CollisionEvent>& events,
                                      double rank_threshold = defaults::kRankThreshold);

/// dim_h and dim_v for every prefix length 0..n_events (nonincreasing).
struct NeutralDimCurves {
    std::vector<int> dim_h;
    std::vector<int> dim_v;
};

NeutralDimCurves neutral_dim_curves(const MassProfile& mp,
                                    const std::vector<CollisionEvent>& events,
                                    double rank_threshold = defaults::kRankThreshold);

/// Conserved-quantity checks for neutral candidate vectors along a segment:
/// (a) <dh(t), v(t)> stays ~0 at every event,
/// (b) w(t) = <q(t), dh(t)> fits a single linear function of t,
/// (c) sum dh_i^2 / m_i stays constant.
struct NeutralCheckTolerances {
    double velocity_inner = 1e-10;
    double w_residual = 1e-9;
    double quadratic_drift = 1e-12;
};

struct NeutralCheckReport {
    struct PerVector {
        double max_velocity_inner = 0.0;
        double w_linear_residual = 0.0;
        double quadratic_drift = 0.0;
        bool pass_velocity_inner = true;
        bool pass_w_linear = true;
        bool pass_quadratic = true;
        bool pass() const { return pass_velocity_inner && pass_w_linear && pass_quadratic; }
    };
    std::vector<PerVector> vectors;
    bool all_pass = true;
};

NeutralCheckReport neutral_invariant_checks(const MassProfile& mp,
                                            const std::vector<CollisionEvent>& events,
                                            const Eigen::MatrixXd& basis_h,
                                            const NeutralCheckTolerances& tol = {});

}  // namespace fallball

#endif
