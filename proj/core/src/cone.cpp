#include "fallball/cone.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fallball {

double q_form(const TangentVector& tv) { return tv.dh.dot(tv.dv); }

ConeRegion in_cone(const TangentVector& tv, double band) {
    const double q = q_form(tv);
    const double scale = tv.squared_norm();
    if (std::abs(q) <= band * scale) return ConeRegion::Boundary;
    return q > 0.0 ? ConeRegion::Interior : ConeRegion::Outside;
}

double q_jump_pair_delta(const MassProfile& mp, int bond, double w, const TangentVector& tv_pre) {
    if (bond < 1 || bond >= mp.size())
        throw ContractViolation("bond out of range: " + std::to_string(bond));
    if (!(w > 0.0)) throw ContractViolation("pair delta requires approach speed w > 0");
    const double d = tv_pre.dv(bond) - tv_pre.dv(bond - 1);
    return mp.gamma_at(bond) * mp.c_at(bond) * w * d * d;
}

double q_jump_floor_delta(const MassProfile& mp, double v1_pre, const TangentVector& tv_pre) {
    if (!(v1_pre < 0.0)) throw ContractViolation("floor delta requires downward v_1");
    const double dh1 = tv_pre.dh(0);
    return -2.0 * dh1 * dh1 / (mp.m()(0) * v1_pre);
}

double q_event_delta(const MassProfile& mp, const CollisionEvent& event,
                     const TangentVector& tv_pre) {
    if (event.sigma == 0) return q_jump_floor_delta(mp, event.v_pre(0), tv_pre);
    const double w = event.v_pre(event.sigma - 1) - event.v_pre(event.sigma);
    return q_jump_pair_delta(mp, event.sigma, w, tv_pre);
}

std::vector<ConeReport> strict_invariance_scan(const MassProfile& mp, const PhaseState& state,
                                               const ScanOptions& options) {
    AdvanceBudget budget;
    budget.max_events = options.horizon_events;
    const Trajectory traj = advance(mp, state, budget, options.advance);

    const int n = mp.size();
    // Boundary directions: the two Lagrangian subspaces dv = 0 and dh = 0.
    const Eigen::MatrixXd basis = section_basis(n).topLeftCorner(n, n - 1);

    struct Tracked {
        ConeReport report;
        TangentVector u;
    };
    std::vector<Tracked> tracked;
    for (int k = 0; k < n - 1; ++k) {
        Tracked t;
        t.report.kind = ConeDirectionKind::PureDh;
        t.report.direction_index = k;
        t.u = TangentVector{basis.col(k), Eigen::VectorXd::Zero(n)};
        tracked.push_back(std::move(t));
    }
    for (int k = 0; k < n - 1; ++k) {
        Tracked t;
        t.report.kind = ConeDirectionKind::PureDv;
        t.report.direction_index = k;
        t.u = TangentVector{Eigen::VectorXd::Zero(n), basis.col(k)};
        tracked.push_back(std::move(t));
    }
    for (auto& t : tracked) t.report.q_initial = q_form(t.u);

    for (std::size_t e = 0; e < traj.events.size(); ++e) {
        const auto idx = static_cast<std::int64_t>(e);
        for (auto& t : tracked) {
            const double q_before = q_form(t.u);
            TangentVector next = apply_event_jump(mp, traj.events[e], t.u);
            t.report.per_event_deltas.emplace_back(idx, q_form(next) - q_before);
            const double norm = next.norm();
            if (norm > 0.0) next = (1.0 / norm) * next;
            t.u = std::move(next);
            if (!t.report.strict_entry_event && q_form(t.u) > options.strict_band)
                t.report.strict_entry_event = idx;
        }
    }

    std::vector<ConeReport> reports;
    reports.reserve(tracked.size());
    for (auto& t : tracked) {
        t.report.q_final = q_form(t.u);
        reports.push_back(std::move(t.report));
    }
    return reports;
}

std::optional<std::int64_t> all_entered_event(const std::vector<ConeReport>& reports) {
    std::int64_t latest = -1;
    for (const auto& r : reports) {
        if (!r.strict_entry_event) return std::nullopt;
        latest = std::max(latest, *r.strict_entry_event);
    }
    return latest;
}

namespace {

// Orthonormal nullspace basis of the stacked constraint rows.
Eigen::MatrixXd nullspace(const Eigen::MatrixXd& rows, int n, double rank_threshold) {
    if (rows.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = rank_threshold * sv(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return svd.matrixV().rightCols(n - rank);
}

Eigen::MatrixXd transposed_r(const MassProfile& mp, int bond) {
    return r_matrix(mp, bond).transpose();
}

Eigen::MatrixXd swap_matrix(int n, int bond) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n);
    s(bond - 1, bond - 1) = 0.0;
    s(bond, bond) = 0.0;
    s(bond - 1, bond) = 1.0;
    s(bond, bond - 1) = 1.0;
    return s;
}

// Incremental constraint builders shared by the certificate and the curves.
struct HConstraints {
    explicit HConstraints(const MassProfile& mp)
        : mp(mp), running(Eigen::MatrixXd::Identity(mp.size(), mp.size())) {
        rows.push_back(Eigen::RowVectorXd::Ones(mp.size()));
    }

    void feed(const CollisionEvent& e) {
        if (e.sigma == 0)
            rows.push_back(running.row(0));
        else
            running = transposed_r(mp, e.sigma) * running;
    }

    Eigen::MatrixXd stacked() const {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), mp.size());
        for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i];
        return m;
    }

    const MassProfile& mp;
    Eigen::MatrixXd running;  ///< dh(t) = running * dh(0)
    std::vector<Eigen::RowVectorXd> rows;
};

struct VConstraints {
    explicit VConstraints(const MassProfile& mp)
        : mp(mp), running(Eigen::MatrixXd::Identity(mp.size(), mp.size())) {
        rows.push_back(Eigen::RowVectorXd::Ones(mp.size()));
    }

    void feed(const CollisionEvent& e) {
        if (e.sigma == 0) return;  // (0; dv) is untouched by floor bounces
        if (mp.gamma_at(e.sigma) == 0.0) {
            running = swap_matrix(mp.size(), e.sigma) * running;
        } else {
            rows.push_back(running.row(e.sigma - 1) - running.row(e.sigma));
        }
    }

    Eigen::MatrixXd stacked() const {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), mp.size());
        for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i];
        return m;
    }

    const MassProfile& mp;
    Eigen::MatrixXd running;
    std::vector<Eigen::RowVectorXd> rows;
};

}  // namespace

Eigen::MatrixXd neutral_space_h(const MassProfile& mp, const std::vector<CollisionEvent>& events,
                                double rank_threshold) {
    HConstraints c(mp);
    for (const auto& e : events) c.feed(e);
    return nullspace(c.stacked(), mp.size(), rank_threshold);
}

Eigen::MatrixXd neutral_space_v(const MassProfile& mp, const std::vector<CollisionEvent>& events,
                                double rank_threshold) {
    VConstraints c(mp);
    for (const auto& e : events) c.feed(e);
    return nullspace(c.stacked(), mp.size(), rank_threshold);
}

NeutralSpaceCertificate neutral_space(const MassProfile& mp,
                                      const std::vector<CollisionEvent>& events,
                                      double rank_threshold) {
    NeutralSpaceCertificate cert;
    for (const auto& e : events) {
        cert.segment.sigmas.push_back(e.sigma);
        cert.segment.times.push_back(e.t);
    }
    cert.basis_h = neutral_space_h(mp, events, rank_threshold);
    cert.basis_v = neutral_space_v(mp, events, rank_threshold);
    cert.dim_h = static_cast<int>(cert.basis_h.cols());
    cert.dim_v = static_cast<int>(cert.basis_v.cols());
    return cert;
}

NeutralDimCurves neutral_dim_curves(const MassProfile& mp,
                                    const std::vector<CollisionEvent>& events,
                                    double rank_threshold) {
    NeutralDimCurves curves;
    HConstraints h(mp);
    VConstraints v(mp);
    const int n = mp.size();
    auto dim_of = [&](const Eigen::MatrixXd& rows) {
        return static_cast<int>(nullspace(rows, n, rank_threshold).cols());
    };
    curves.dim_h.push_back(dim_of(h.stacked()));
    curves.dim_v.push_back(dim_of(v.stacked()));
    for (const auto& e : events) {
        h.feed(e);
        v.feed(e);
        curves.dim_h.push_back(dim_of(h.stacked()));
        curves.dim_v.push_back(dim_of(v.stacked()));
    }
    return curves;
}

NeutralCheckReport neutral_invariant_checks(const MassProfile& mp,
                                            const std::vector<CollisionEvent>& events,
                                            const Eigen::MatrixXd& basis_h,
                                            const NeutralCheckTolerances& tol) {
    NeutralCheckReport report;
    const Eigen::VectorXd inv_m = mp.m().cwiseInverse();

    for (Eigen::Index col = 0; col < basis_h.cols(); ++col) {
        NeutralCheckReport::PerVector pv;
        Eigen::VectorXd dh = basis_h.col(col);
        const double quad0 = dh.cwiseAbs2().dot(inv_m);

        std::vector<double> times, ws;
        times.reserve(events.size());
        ws.reserve(events.size());

        for (const auto& e : events) {
            if (e.sigma >= 1) dh = transposed_r(mp, e.sigma) * dh;
            // Floor events leave dh untouched (and neutrality pins dh_1 = 0).
            pv.max_velocity_inner = std::max(pv.max_velocity_inner, std::abs(dh.dot(e.v_post)));
            pv.quadratic_drift =
                std::max(pv.quadratic_drift, std::abs(dh.cwiseAbs2().dot(inv_m) - quad0));
            times.push_back(e.t);
            ws.push_back(dh.dot(e.q));
        }

        // Least-squares line through (t_k, w_k); max residual.
        if (times.size() >= 2) {
            const auto m = static_cast<Eigen::Index>(times.size());
            Eigen::MatrixXd a(m, 2);
            Eigen::VectorXd b(m);
            for (Eigen::Index k = 0; k < m; ++k) {
                a(k, 0) = 1.0;
                a(k, 1) = times[static_cast<std::size_t>(k)];
                b(k) = ws[static_cast<std::size_t>(k)];
            }
            const Eigen::Vector2d fit = a.colPivHouseholderQr().solve(b);
            pv.w_linear_residual = (a * fit - b).cwiseAbs().maxCoeff();
        }

        pv.pass_velocity_inner = pv.max_velocity_inner <= tol.velocity_inner;
        pv.pass_w_linear = pv.w_linear_residual <= tol.w_residual;
        pv.pass_quadratic = pv.quadratic_drift <= tol.quadratic_drift;
        report.all_pass = report.all_pass && pv.pass();
        report.vectors.push_back(pv);
    }
    return report;
}

}  // namespace fallball
