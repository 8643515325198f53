#include "fallball/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fallball/rng.hpp"

namespace fallball {

namespace {

// Any event must come no later than the floor flight of particle 1 from the
// top of the shell: h_1 <= H bounds both |v_1| and q_1.
double return_time_cap(const MassProfile& mp, double h0) {
    const double m1 = mp.m()(0);
    const double vmax = std::sqrt(2.0 * h0 / m1);
    const double qmax = h0 / m1;
    return 4.0 * (vmax + std::sqrt(vmax * vmax + 2.0 * qmax));
}

}  // namespace

SectionPoint first_section_point(const MassProfile& mp, const PhaseState& state, double tie_tol) {
    validate_state(mp, state);
    AdvanceBudget budget;
    budget.max_events = 1;
    AdvanceOptions opts;
    opts.tie_tol = tie_tol;
    Trajectory traj = advance(mp, state, budget, opts);
    if (traj.events.empty()) throw ContractViolation("no event reached");
    SectionPoint sp;
    sp.state = std::move(traj.final_state);
    sp.last_sigma = traj.events.front().sigma;
    sp.t_abs = traj.events.front().t;
    return sp;
}

PoincareStep poincare_step(const MassProfile& mp, const SectionPoint& sp, double tie_tol) {
    const EventPrediction pred = next_event(mp, sp.state, tie_tol);
    if (!(pred.dt <= return_time_cap(mp, sp.state.energy_target)))
        throw ContractViolation("return time exceeds the shell-derived cap");

    PoincareStep out;
    PhaseState state = free_flight(sp.state, pred.dt);
    out.event.t = sp.t_abs + pred.dt;
    out.event.sigma = pred.sigma;
    out.event.v_pre = state.v;
    state = pred.sigma == 0 ? apply_floor_collision(state)
                            : apply_pair_collision(mp, state, pred.sigma);
    out.event.q = state.q;
    out.event.v_post = state.v;
    out.return_time = pred.dt;
    out.point.state = std::move(state);
    out.point.last_sigma = pred.sigma;
    out.point.t_abs = out.event.t;
    return out;
}

PoincareStep cocycle_step(const MassProfile& mp, const SectionPoint& sp, TangentFrame& frame,
                          double tie_tol) {
    PoincareStep step = poincare_step(mp, sp, tie_tol);
    for (auto& column : frame.columns) column = apply_event_jump(mp, step.event, column);
    frame.attached_state = step.point.state;
    return step;
}

namespace {

// Thin QR of the stacked frame; overwrites the frame with the Q columns and
// returns the log of the |diagonal| of R.
std::vector<double> qr_renormalize(TangentFrame& frame) {
    Eigen::MatrixXd m = frame.matrix();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const Eigen::MatrixXd thin_q =
        qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
    const Eigen::MatrixXd r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();

    std::vector<double> logs(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
        const double d = std::abs(r(k, k));
        if (!(d > 0.0))
            throw ContractViolation("tangent frame lost linear independence during QR");
        logs[static_cast<std::size_t>(k)] = std::log(d);
        // Fix signs so Q columns continue the tracked directions.
        frame.columns[static_cast<std::size_t>(k)] =
            TangentVector::from_flat(r(k, k) < 0.0 ? Eigen::VectorXd(-thin_q.col(k))
                                                   : Eigen::VectorXd(thin_q.col(k)));
    }
    return logs;
}

TangentFrame random_section_frame(const MassProfile& mp, const PhaseState& state,
                                  std::uint64_t seed) {
    const int n = mp.size();
    const int k = 2 * (n - 1);
    Rng rng(seed);
    Eigen::MatrixXd coeff(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) coeff(i, j) = rng.normal();
    const Eigen::MatrixXd basis = section_basis(n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(coeff);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(k, k);
    const Eigen::MatrixXd cols = basis * q;

    TangentFrame frame;
    frame.attached_state = state;
    frame.columns.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) frame.columns.push_back(TangentVector::from_flat(cols.col(j)));
    return frame;
}

LyapunovEstimate run_once(const MassProfile& mp, const PhaseState& initial,
                          const SpectrumOptions& options) {
    const int n = mp.size();
    const int k = 2 * (n - 1);

    SectionPoint sp = first_section_point(mp, initial, options.tie_tol);
    TangentFrame frame = random_section_frame(mp, sp.state, options.seed);

    LyapunovEstimate est;
    std::vector<double> acc(static_cast<std::size_t>(k), 0.0);
    double total_time = 0.0;

    for (std::int64_t r = 1; r <= options.n_returns; ++r) {
        const PoincareStep step = cocycle_step(mp, sp, frame, options.tie_tol);
        sp = step.point;
        total_time += step.return_time;

        if (r % options.qr_stride == 0 || r == options.n_returns) {
            const std::vector<double> logs = qr_renormalize(frame);
            for (int i = 0; i < k; ++i) acc[static_cast<std::size_t>(i)] += logs[static_cast<std::size_t>(i)];
        }
        if (r % options.history_stride == 0 || r == options.n_returns) {
            std::vector<double> running(acc);
            for (auto& x : running) x /= static_cast<double>(r);
            std::sort(running.rbegin(), running.rend());
            est.history_returns.push_back(r);
            est.history.push_back(std::move(running));
        }
    }

    est.n_returns = options.n_returns;
    est.mean_return_time = total_time / static_cast<double>(options.n_returns);
    est.map_exponents.assign(acc.begin(), acc.end());
    for (auto& x : est.map_exponents) x /= static_cast<double>(options.n_returns);
    std::sort(est.map_exponents.rbegin(), est.map_exponents.rend());
    est.flow_exponents = est.map_exponents;
    for (auto& x : est.flow_exponents) x /= est.mean_return_time;
    return est;
}

}  // namespace

LyapunovEstimate estimate_spectrum(const MassProfile& mp, const PhaseState& initial,
                                   const SpectrumOptions& options) {
    PhaseState start = initial;
    int restarts = 0;
    while (true) {
        try {
            LyapunovEstimate est = run_once(mp, start, options);
            est.restarts = restarts;
            return est;
        } catch (const SingularityError&) {
            if (restarts >= options.max_restarts) throw;
            ++restarts;
            // Singular orbits have measure zero: a tiny velocity kick escapes.
            Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(restarts)));
            Eigen::VectorXd v = start.v;
            for (int i = 0; i < v.size(); ++i) v(i) += 1e-9 * rng.normal();
            start = normalize_to_shell(mp, start.q, v, start.energy_target);
        }
    }
}

double LyapunovEstimate::pairing_defect() const {
    double defect = 0.0;
    const std::size_t k = map_exponents.size();
    for (std::size_t i = 0; i < k; ++i)
        defect = std::max(defect, std::abs(map_exponents[i] + map_exponents[k - 1 - i]));
    return defect;
}

double LyapunovEstimate::max_abs_flow_exponent() const {
    double m = 0.0;
    for (double x : flow_exponents) m = std::max(m, std::abs(x));
    return m;
}

double LyapunovEstimate::min_abs_flow_exponent() const {
    double m = std::numeric_limits<double>::infinity();
    for (double x : flow_exponents) m = std::min(m, std::abs(x));
    return m;
}

ZeroThresholdRule absolute_zero_threshold(double threshold) {
    return {threshold, "absolute threshold " + std::to_string(threshold)};
}

ZeroThresholdRule calibrated_zero_threshold(double calibration_max_abs_flow_exponent,
                                            double multiplier) {
    return {multiplier * calibration_max_abs_flow_exponent,
            std::to_string(multiplier) + "x equal-mass calibration max |lambda| = " +
                std::to_string(calibration_max_abs_flow_exponent)};
}

ZeroCount zero_exponent_count(const LyapunovEstimate& estimate, const ZeroThresholdRule& rule) {
    ZeroCount out;
    if (estimate.history.empty() || estimate.mean_return_time <= 0.0) {
        out.reason = "no history recorded";
        return out;
    }
    const std::size_t k = estimate.map_exponents.size();
    const std::size_t half = estimate.history.size() / 2;
    const double map_threshold = rule.threshold * estimate.mean_return_time;

    int zeros = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double max_abs = 0.0;
        double min_abs = lo;
        for (std::size_t s = half; s < estimate.history.size(); ++s) {
            const double x = estimate.history[s][i];
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            max_abs = std::max(max_abs, std::abs(x));
            min_abs = std::min(min_abs, std::abs(x));
        }
        if (max_abs < map_threshold) {
            ++zeros;  // pinned inside the zero band over the whole last half
            continue;
        }
        const double osc = hi - lo;
        if (min_abs >= map_threshold && osc <= 0.10 * max_abs) continue;  // settled nonzero
        out.reason = "exponent " + std::to_string(i) +
                     " straddles the zero band or oscillates above 10% over the last half";
        return out;
    }
    out.conclusive = true;
    out.count = zeros;
    return out;
}

}  // namespace fallball
