#include "fallball/tangent.hpp"

#include <cmath>
#include <string>

namespace fallball {

TangentVector TangentVector::zero(int n) {
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

double TangentVector::norm() const { return std::sqrt(squared_norm()); }

Eigen::VectorXd TangentVector::flat() const {
    Eigen::VectorXd x(2 * size());
    x.head(size()) = dh;
    x.tail(size()) = dv;
    return x;
}

TangentVector TangentVector::from_flat(const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size()) / 2;
    return {x.head(n), x.tail(n)};
}

TangentVector operator+(const TangentVector& a, const TangentVector& b) {
    return {a.dh + b.dh, a.dv + b.dv};
}

TangentVector operator-(const TangentVector& a, const TangentVector& b) {
    return {a.dh - b.dh, a.dv - b.dv};
}

TangentVector operator*(double s, const TangentVector& a) { return {s * a.dh, s * a.dv}; }

double symplectic_form(const TangentVector& u, const TangentVector& w) {
    return u.dh.dot(w.dv) - u.dv.dot(w.dh);
}

TangentVector project_to_section(TangentVector tv) {
    tv.dv.array() -= tv.dv.mean();
    return tv;
}

TangentVector from_qp(const MassProfile& mp, const PhaseState& state, const Eigen::VectorXd& dq,
                      const Eigen::VectorXd& dp, double tol) {
    if (dq.size() != mp.size() || dp.size() != mp.size())
        throw DimensionError("tangent components do not match the mass profile");
    TangentVector tv;
    tv.dh = mp.m().cwiseProduct(dq) + state.v.cwiseProduct(dp);
    tv.dv = dp.cwiseQuotient(mp.m());
    const double scale = std::max(1.0, tv.dh.cwiseAbs().maxCoeff());
    if (std::abs(tv.dh.sum()) > tol * scale)
        throw ContractViolation("input is not tangent to the energy shell (sum dh != 0)");
    return project_to_section(std::move(tv));
}

QpVector to_qp(const MassProfile& mp, const PhaseState& state, const TangentVector& tv) {
    QpVector out;
    out.dp = mp.m().cwiseProduct(tv.dv);
    out.dq = tv.dh.cwiseQuotient(mp.m()) - state.v.cwiseProduct(tv.dv);
    return out;
}

TangentVector transport_flight(const TangentVector& tv, double /*dt*/) { return tv; }

Eigen::MatrixXd r_matrix(const MassProfile& mp, int bond) {
    if (bond < 1 || bond >= mp.size())
        throw ContractViolation("bond out of range: " + std::to_string(bond));
    const int n = mp.size();
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
    const double g = mp.gamma_at(bond);
    const int i = bond - 1;
    r(i, i) = g;
    r(i, i + 1) = 1.0 - g;
    r(i + 1, i) = 1.0 + g;
    r(i + 1, i + 1) = -g;
    return r;
}

namespace {

TangentVector jump_pair_with(const MassProfile& mp, int bond, double w, const TangentVector& tv) {
    if (!(w > 0.0))
        throw ContractViolation("pair tangent jump requires approach speed w > 0");
    const int i = bond - 1;
    const int j = bond;
    const double g = mp.gamma_at(bond);
    const double c = mp.c_at(bond);

    TangentVector out = tv;
    // dv+ = R dv-
    const double dvi = tv.dv(i), dvj = tv.dv(j);
    out.dv(i) = g * dvi + (1.0 - g) * dvj;
    out.dv(j) = (1.0 + g) * dvi - g * dvj;
    // dh+ = R^T dh-  +  gamma c w (dv_j - dv_i) (e_i - e_j)
    const double dhi = tv.dh(i), dhj = tv.dh(j);
    out.dh(i) = g * dhi + (1.0 + g) * dhj;
    out.dh(j) = (1.0 - g) * dhi - g * dhj;
    const double kick = g * c * w * (dvj - dvi);
    out.dh(i) += kick;
    out.dh(j) -= kick;
    return project_to_section(std::move(out));
}

TangentVector jump_floor_with(const MassProfile& mp, double v1_pre, const TangentVector& tv) {
    if (!(v1_pre < 0.0))
        throw ContractViolation("floor tangent jump requires downward v_1");
    TangentVector out = tv;
    out.dv(0) -= 2.0 * tv.dh(0) / (mp.m()(0) * v1_pre);
    return project_to_section(std::move(out));
}

}  // namespace

TangentVector jump_pair(const MassProfile& mp, const PhaseState& state_pre, int bond,
                        const TangentVector& tv) {
    if (bond < 1 || bond >= mp.size())
        throw ContractViolation("bond out of range: " + std::to_string(bond));
    if (std::abs(state_pre.q(bond) - state_pre.q(bond - 1)) > 1e-9)
        throw ContractViolation("pair tangent jump without contact");
    return jump_pair_with(mp, bond, state_pre.v(bond - 1) - state_pre.v(bond), tv);
}

TangentVector jump_floor(const MassProfile& mp, const PhaseState& state_pre,
                         const TangentVector& tv) {
    if (std::abs(state_pre.q(0)) > 1e-9)
        throw ContractViolation("floor tangent jump away from the floor");
    return jump_floor_with(mp, state_pre.v(0), tv);
}

TangentVector apply_event_jump(const MassProfile& mp, const CollisionEvent& event,
                               const TangentVector& tv) {
    if (event.sigma == 0) return jump_floor_with(mp, event.v_pre(0), tv);
    return jump_pair_with(mp, event.sigma, event.v_pre(event.sigma - 1) - event.v_pre(event.sigma),
                          tv);
}

Eigen::MatrixXd TangentFrame::matrix() const {
    if (columns.empty()) return {};
    Eigen::MatrixXd m(2 * columns.front().size(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = columns[k].flat();
    return m;
}

Eigen::MatrixXd section_basis(int n) {
    // Orthonormal basis of {x : sum x = 0} in R^n, doubled block-diagonally.
    Eigen::MatrixXd ones = Eigen::VectorXd::Ones(n);
    Eigen::MatrixXd full = Eigen::MatrixXd::Identity(n, n) - ones * ones.transpose() / n;
    // Extract an orthonormal basis of the column space (rank n-1).
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(full, Eigen::ComputeThinU);
    Eigen::MatrixXd u = svd.matrixU().leftCols(n - 1);
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(2 * n, 2 * (n - 1));
    basis.topLeftCorner(n, n - 1) = u;
    basis.bottomRightCorner(n, n - 1) = u;
    return basis;
}

TangentVector transport_along(const MassProfile& mp, const std::vector<CollisionEvent>& events,
                              TangentVector tv) {
    for (const auto& e : events) tv = apply_event_jump(mp, e, tv);
    return tv;
}

namespace {

// Difference quotient of the time-T flow map along direction tv with step h.
TangentVector flow_difference(const MassProfile& mp, const PhaseState& state,
                              const TangentVector& tv, double T, double h,
                              const SymbolicSequence& reference, double tie_tol) {
    const QpVector qp = to_qp(mp, state, tv);
    AdvanceOptions opts;
    opts.tie_tol = tie_tol;
    opts.record_events = true;
    AdvanceBudget budget;
    budget.max_time = T;

    auto evolve = [&](double sign) {
        PhaseState s = state;
        s.q += sign * h * qp.dq;
        s.v += sign * h * tv.dv;  // dv is already dp/m
        s.energy_target = total_energy(mp, s.q, s.v);
        Trajectory traj = advance(mp, std::move(s), budget, opts);
        if (!(traj.symbols() == reference))
            throw OracleUnreliableError(
                "perturbed orbit crossed a singularity (symbolic sequence changed)");
        return traj.final_state;
    };

    const PhaseState plus = evolve(+1.0);
    const PhaseState minus = evolve(-1.0);

    // Base endpoint velocities are needed for the (dq,dp) -> (dh,dv)
    // conversion; re-evolve the unperturbed state.
    PhaseState base = state;
    Trajectory base_traj = advance(mp, std::move(base), budget, opts);

    const Eigen::VectorXd dq = (plus.q - minus.q) / (2.0 * h);
    const Eigen::VectorXd dv_vel = (plus.v - minus.v) / (2.0 * h);
    TangentVector out;
    out.dh = mp.m().cwiseProduct(dq) + base_traj.final_state.v.cwiseProduct(
                                           mp.m().cwiseProduct(dv_vel));
    out.dv = dv_vel;
    return project_to_section(std::move(out));
}

}  // namespace

TangentVector fd_oracle(const MassProfile& mp, const PhaseState& state, const TangentVector& tv,
                        double T, const FdOracleOptions& options) {
    AdvanceOptions opts;
    opts.tie_tol = options.tie_tol;
    AdvanceBudget budget;
    budget.max_time = T;
    PhaseState base = state;
    const SymbolicSequence reference = advance(mp, std::move(base), budget, opts).symbols();

    const double scale = std::max(1.0, tv.norm());
    const double h = options.step / scale;
    const TangentVector coarse = flow_difference(mp, state, tv, T, h, reference, options.tie_tol);
    const TangentVector fine = flow_difference(mp, state, tv, T, 0.5 * h, reference, options.tie_tol);

    const double diff = (coarse - fine).norm();
    const double ref = std::max(fine.norm(), 1e-30);
    if (diff > 10.0 * options.consistency_tol * ref)
        throw OracleUnreliableError("Richardson halving disagrees: relative change " +
                                    std::to_string(diff / ref));
    return fine;
}

}  // namespace fallball
