#include "fallball/experiments.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "fallball/cone.hpp"
#include "fallball/event_flow.hpp"
#include "fallball/lyapunov.hpp"
#include "fallball/rng.hpp"

namespace fallball {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xf];
        h >>= 4;
    }
    return std::string(buf, 16);
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["mode"] = to_string(c.mode);
    j["masses"] = c.masses;
    j["h0"] = c.h0;
    j["seed"] = c.seed;
    if (c.q0) j["q0"] = *c.q0;
    if (c.v0) j["v0"] = *c.v0;
    j["max_events"] = c.max_events;
    if (c.max_time) j["max_time"] = *c.max_time;
    j["n_returns"] = c.n_returns;
    j["qr_stride"] = c.qr_stride;
    j["history_stride"] = c.history_stride;
    j["horizon_events"] = c.horizon_events;
    j["n_points"] = c.n_points;
    j["max_restarts"] = c.max_restarts;
    j["burst_limit"] = c.burst_limit;
    j["burst_window"] = c.burst_window;
    j["tie_tol"] = c.tie_tol;
    if (c.zero_threshold) j["zero_threshold"] = *c.zero_threshold;
    if (c.calibration_max_exponent) j["calibration_max_exponent"] = *c.calibration_max_exponent;
    if (!c.grid.empty()) j["grid"] = c.grid;
    j["threads"] = c.threads;
    j["out_dir"] = c.out_dir;
    j["events_jsonl"] = c.events_jsonl;
    return j;
}

PhaseState initial_state(const MassProfile& mp, const ExperimentConfig& config) {
    if (config.q0) {
        PhaseState state;
        state.q = Eigen::Map<const Eigen::VectorXd>(config.q0->data(),
                                                    static_cast<Eigen::Index>(config.q0->size()));
        state.v = Eigen::Map<const Eigen::VectorXd>(config.v0->data(),
                                                    static_cast<Eigen::Index>(config.v0->size()));
        state.energy_target = config.h0;
        validate_state(mp, state);
        return state;
    }
    return sample_state(mp, config.h0, config.seed);
}

namespace {

AdvanceOptions advance_options(const ExperimentConfig& c) {
    AdvanceOptions o;
    o.tie_tol = c.tie_tol;
    o.burst_limit = c.burst_limit;
    o.burst_window = c.burst_window;
    return o;
}

struct RunContext {
    std::map<std::string, std::string> outputs;  ///< filename -> content
    json extra = json::object();                 ///< mode-specific manifest entries
    bool inconclusive = false;
};

std::string events_csv(const std::vector<CollisionEvent>& events, int n) {
    std::string out = "t,sigma";
    for (int i = 1; i <= n; ++i) out += ",q_" + std::to_string(i);
    for (int i = 1; i <= n; ++i) out += ",v_" + std::to_string(i);
    out += "\n";
    for (const auto& e : events) {
        out += format_double(e.t);
        out += ',';
        out += std::to_string(e.sigma);
        for (int i = 0; i < n; ++i) {
            out += ',';
            out += format_double(e.q(i));
        }
        for (int i = 0; i < n; ++i) {
            out += ',';
            out += format_double(e.v_post(i));
        }
        out += '\n';
    }
    return out;
}

std::string events_jsonl(const std::vector<CollisionEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        json j;
        j["t"] = e.t;
        j["sigma"] = e.sigma;
        j["v_pre"] = std::vector<double>(e.v_pre.data(), e.v_pre.data() + e.v_pre.size());
        j["v_post"] = std::vector<double>(e.v_post.data(), e.v_post.data() + e.v_post.size());
        out += j.dump();
        out += '\n';
    }
    return out;
}

json diagnostics_json(const AdvanceDiagnostics& d) {
    json j;
    j["n_events"] = d.n_events;
    j["elapsed_time"] = d.elapsed_time;
    j["event_rate"] = d.event_rate;
    j["max_burst_count"] = d.max_burst_count;
    j["max_energy_drift"] = d.max_energy_drift;
    return j;
}

RunResult execute(const ExperimentConfig& config,
                  const std::function<void(RunContext&)>& body) {
    const auto t_start = std::chrono::steady_clock::now();
    RunResult result;
    RunContext ctx;

    try {
        config.validate();
        body(ctx);
        if (ctx.inconclusive) {
            result.exit_code = ExitCode::Inconclusive;
            result.status = "inconclusive";
        } else {
            result.exit_code = ExitCode::Ok;
            result.status = "ok";
        }
    } catch (const ConfigError& e) {
        result.exit_code = ExitCode::ConfigError;
        result.status = "config-error";
        result.message = e.what();
    } catch (const SingularityError& e) {
        result.exit_code = ExitCode::Singularity;
        result.status = "singularity";
        result.message = e.what();
        ctx.extra["singularity"] = {{"t_first", e.t_first},
                                    {"t_second", e.t_second},
                                    {"sigma_first", e.sigma_first},
                                    {"sigma_second", e.sigma_second}};
    } catch (const AccumulationGuardError& e) {
        result.exit_code = ExitCode::GuardTrigger;
        result.status = "accumulation-guard";
        result.message = e.what();
        const BurstReport& r = e.report();
        ctx.extra["accumulation_guard"] = {{"burst_limit", r.burst_limit},
                                           {"burst_window", r.burst_window},
                                           {"t_trigger", r.t_trigger},
                                           {"total_events", r.total_events}};
    } catch (const DegenerateInputError& e) {
        result.exit_code = ExitCode::DegenerateInput;
        result.status = "degenerate-input";
        result.message = e.what();
    } catch (const Error& e) {
        result.exit_code = ExitCode::Failure;
        result.status = "error";
        result.message = e.what();
    }

    json manifest;
    manifest["artifact_version"] = kArtifactVersion;
    manifest["status"] = result.status;
    manifest["exit_code"] = static_cast<int>(result.exit_code);
    if (!result.message.empty()) manifest["message"] = result.message;
    manifest["config"] = config_to_json(config);
    for (auto it = ctx.extra.begin(); it != ctx.extra.end(); ++it) manifest[it.key()] = it.value();

    json digests = json::object();
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) {
        result.exit_code = ExitCode::ConfigError;
        result.status = "config-error";
        result.message = "cannot create output directory '" + config.out_dir + "'";
        result.manifest = manifest;
        return result;
    }
    for (const auto& [name, content] : ctx.outputs) {
        const fs::path path = fs::path(config.out_dir) / name;
        std::ofstream out(path, std::ios::binary);
        out << content;
        digests[name] = fnv1a64_hex(content);
    }
    manifest["outputs"] = digests;

    const auto t_end = std::chrono::steady_clock::now();
    manifest["wall_time_s"] = std::chrono::duration<double>(t_end - t_start).count();

    const fs::path manifest_path = fs::path(config.out_dir) / "manifest.json";
    {
        std::ofstream out(manifest_path, std::ios::binary);
        out << manifest.dump(2) << '\n';
    }
    result.manifest_path = manifest_path.string();
    result.manifest = std::move(manifest);
    return result;
}

json zero_count_json(const ZeroCount& count, const ZeroThresholdRule& rule) {
    json j;
    j["rule"] = rule.description;
    j["threshold"] = rule.threshold;
    j["conclusive"] = count.conclusive;
    if (count.conclusive)
        j["count"] = count.count;
    else
        j["reason"] = count.reason;
    return j;
}

}  // namespace

RunResult run_simulate(const ExperimentConfig& config) {
    return execute(config, [&](RunContext& ctx) {
        MassProfile mp(config.masses);
        PhaseState state = initial_state(mp, config);
        AdvanceBudget budget;
        budget.max_events = config.max_events;
        budget.max_time = config.max_time;
        Trajectory traj = advance(mp, std::move(state), budget, advance_options(config));
        ctx.outputs["events.csv"] = events_csv(traj.events, mp.size());
        if (config.events_jsonl) ctx.outputs["events.jsonl"] = events_jsonl(traj.events);
        ctx.extra["diagnostics"] = diagnostics_json(traj.diagnostics);
    });
}

RunResult run_degenerate_demo(const ExperimentConfig& config) {
    return execute(config, [&](RunContext& ctx) {
        if (!config.q0)
            throw ConfigError("degenerate-demo needs an explicit initial state (q0, v0)");
        MassProfile mp(config.masses);
        PhaseState state = initial_state(mp, config);
        const Degeneracy deg = is_degenerate(mp, state);
        ctx.extra["frozen_count"] = deg.frozen_count;
        AdvanceBudget budget;
        budget.max_events = config.max_events;
        budget.max_time = config.max_time;
        Trajectory traj = advance_degenerate(mp, state, budget, advance_options(config));
        ctx.outputs["events.csv"] = events_csv(traj.events, mp.size());
        if (config.events_jsonl) ctx.outputs["events.jsonl"] = events_jsonl(traj.events);
        ctx.extra["diagnostics"] = diagnostics_json(traj.diagnostics);
    });
}

RunResult run_lyapunov(const ExperimentConfig& config) {
    return execute(config, [&](RunContext& ctx) {
        MassProfile mp(config.masses);
        PhaseState state = initial_state(mp, config);

        SpectrumOptions opts;
        opts.n_returns = config.n_returns;
        opts.qr_stride = config.qr_stride;
        opts.seed = derive_seed(config.seed, 0xf7a3e);
        opts.max_restarts = config.max_restarts;
        opts.history_stride = config.history_stride;
        opts.tie_tol = config.tie_tol;
        opts.burst_limit = config.burst_limit;
        opts.burst_window = config.burst_window;

        const LyapunovEstimate est = estimate_spectrum(mp, state, opts);

        json spectrum;
        spectrum["map_exponents"] = est.map_exponents;
        spectrum["flow_exponents"] = est.flow_exponents;
        spectrum["mean_return_time"] = est.mean_return_time;
        spectrum["n_returns"] = est.n_returns;
        spectrum["qr_stride"] = config.qr_stride;
        spectrum["restarts"] = est.restarts;
        spectrum["pairing_defect"] = est.pairing_defect();

        if (config.zero_threshold || config.calibration_max_exponent) {
            const ZeroThresholdRule rule =
                config.zero_threshold ? absolute_zero_threshold(*config.zero_threshold)
                                      : calibrated_zero_threshold(*config.calibration_max_exponent);
            const ZeroCount count = zero_exponent_count(est, rule);
            spectrum["zero_count"] = zero_count_json(count, rule);
            if (!count.conclusive) ctx.inconclusive = true;
        }

        std::string history = "returns";
        const std::size_t k = est.map_exponents.size();
        for (std::size_t i = 1; i <= k; ++i) history += ",map_lambda_" + std::to_string(i);
        history += "\n";
        for (std::size_t s = 0; s < est.history.size(); ++s) {
            history += std::to_string(est.history_returns[s]);
            for (double x : est.history[s]) {
                history += ',';
                history += format_double(x);
            }
            history += '\n';
        }

        ctx.outputs["spectrum.json"] = spectrum.dump(2) + "\n";
        ctx.outputs["history.csv"] = std::move(history);
        ctx.extra["restarts"] = est.restarts;
    });
}

RunResult run_cone(const ExperimentConfig& config) {
    return execute(config, [&](RunContext& ctx) {
        MassProfile mp(config.masses);
        ScanOptions scan;
        scan.horizon_events = config.horizon_events;
        scan.advance = advance_options(config);

        json points = json::array();
        int entered_points = 0;
        std::int64_t scanned = 0;
        for (int p = 0; p < config.n_points; ++p) {
            const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(p));
            const PhaseState state = sample_state(mp, config.h0, seed);
            json jp;
            jp["point"] = p;
            try {
                const std::vector<ConeReport> reports = strict_invariance_scan(mp, state, scan);
                const auto entry = all_entered_event(reports);
                if (entry) ++entered_points;
                ++scanned;
                jp["all_entered_event"] = entry ? json(*entry) : json(nullptr);
                json dirs = json::array();
                for (const auto& r : reports) {
                    json jd;
                    jd["kind"] = r.kind == ConeDirectionKind::PureDh ? "dh" : "dv";
                    jd["index"] = r.direction_index;
                    jd["q_initial"] = r.q_initial;
                    jd["q_final"] = r.q_final;
                    jd["strict_entry_event"] =
                        r.strict_entry_event ? json(*r.strict_entry_event) : json(nullptr);
                    json deltas = json::array();
                    for (const auto& [idx, dq] : r.per_event_deltas) deltas.push_back({idx, dq});
                    jd["per_event_deltas"] = std::move(deltas);
                    dirs.push_back(std::move(jd));
                }
                jp["directions"] = std::move(dirs);
            } catch (const SingularityError& e) {
                jp["error"] = std::string("singularity: ") + e.what();
            } catch (const AccumulationGuardError& e) {
                jp["error"] = std::string("accumulation-guard: ") + e.what();
            }
            points.push_back(std::move(jp));
        }

        json report;
        report["horizon_events"] = config.horizon_events;
        report["n_points"] = config.n_points;
        report["summary"] = {
            {"scanned", scanned},
            {"entry_fraction",
             scanned > 0 ? static_cast<double>(entered_points) / static_cast<double>(scanned)
                         : 0.0}};
        report["points"] = std::move(points);
        ctx.outputs["cone.json"] = report.dump(2) + "\n";
    });
}

RunResult run_neutral(const ExperimentConfig& config) {
    return execute(config, [&](RunContext& ctx) {
        MassProfile mp(config.masses);
        PhaseState state = initial_state(mp, config);
        AdvanceBudget budget;
        budget.max_events = config.max_events;
        budget.max_time = config.max_time;
        Trajectory traj = advance(mp, std::move(state), budget, advance_options(config));

        const NeutralSpaceCertificate cert = neutral_space(mp, traj.events);
        const NeutralDimCurves curves = neutral_dim_curves(mp, traj.events);

        auto matrix_to_json = [](const Eigen::MatrixXd& m) {
            json cols = json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                json col = json::array();
                for (Eigen::Index r = 0; r < m.rows(); ++r) col.push_back(m(r, c));
                cols.push_back(std::move(col));
            }
            return cols;
        };

        json jc;
        jc["segment"] = {{"sigmas", cert.segment.sigmas}, {"times", cert.segment.times}};
        jc["dim_h"] = cert.dim_h;
        jc["dim_v"] = cert.dim_v;
        jc["basis_h"] = matrix_to_json(cert.basis_h);
        jc["basis_v"] = matrix_to_json(cert.basis_v);
        ctx.outputs["certificate.json"] = jc.dump(2) + "\n";

        std::string csv = "prefix_events,t,dim_h,dim_v\n";
        for (std::size_t i = 0; i < curves.dim_h.size(); ++i) {
            const double t = i == 0 ? 0.0 : traj.events[i - 1].t;
            csv += std::to_string(i);
            csv += ',';
            csv += format_double(t);
            csv += ',';
            csv += std::to_string(curves.dim_h[i]);
            csv += ',';
            csv += std::to_string(curves.dim_v[i]);
            csv += '\n';
        }
        ctx.outputs["dims.csv"] = std::move(csv);
        ctx.extra["diagnostics"] = diagnostics_json(traj.diagnostics);
    });
}

RunResult run_sweep(const ExperimentConfig& config) {
    return execute(config, [&](RunContext& ctx) {
        struct Row {
            std::vector<double> masses;
            std::string ordering;
            std::string status = "ok";
            double min_abs = 0.0;
            double max_abs = 0.0;
            double mean_return_time = 0.0;
            int restarts = 0;
            LyapunovEstimate est;
            bool have_est = false;
            bool equal_masses = false;
        };

        const std::size_t n_points = config.grid.size();
        std::vector<Row> rows(n_points);

        std::atomic<std::size_t> cursor{0};
        auto worker = [&]() {
            for (std::size_t i; (i = cursor.fetch_add(1)) < n_points;) {
                Row& row = rows[i];
                row.masses = config.grid[i];
                try {
                    MassProfile mp(row.masses);
                    row.ordering = to_string(mp.ordering_class());
                    row.equal_masses = mp.m().minCoeff() == mp.m().maxCoeff();

                    SpectrumOptions opts;
                    opts.n_returns = config.n_returns;
                    opts.qr_stride = config.qr_stride;
                    opts.seed = derive_seed(config.seed, 0x5eed + i);
                    opts.max_restarts = config.max_restarts;
                    opts.history_stride = config.history_stride;
                    opts.tie_tol = config.tie_tol;
                    opts.burst_limit = config.burst_limit;
                    opts.burst_window = config.burst_window;

                    const PhaseState state =
                        sample_state(mp, config.h0, derive_seed(config.seed, 0xab1e + i));
                    row.est = estimate_spectrum(mp, state, opts);
                    row.have_est = true;
                    row.min_abs = row.est.min_abs_flow_exponent();
                    row.max_abs = row.est.max_abs_flow_exponent();
                    row.mean_return_time = row.est.mean_return_time;
                    row.restarts = row.est.restarts;
                } catch (const Error& e) {
                    row.status = std::string("error: ") + e.what();
                }
            }
        };

        unsigned hw = std::thread::hardware_concurrency();
        if (hw == 0) hw = 1;
        const std::size_t n_threads =
            std::min<std::size_t>(config.threads > 0 ? static_cast<std::size_t>(config.threads) : hw,
                                  std::max<std::size_t>(n_points, 1));
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t + 1 < n_threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();

        // Zero-count threshold: explicit rule if configured, otherwise 3x the
        // max |flow exponent| of the first equal-mass grid point.
        std::optional<ZeroThresholdRule> rule;
        if (config.zero_threshold) {
            rule = absolute_zero_threshold(*config.zero_threshold);
        } else if (config.calibration_max_exponent) {
            rule = calibrated_zero_threshold(*config.calibration_max_exponent);
        } else {
            for (const Row& row : rows) {
                if (row.have_est && row.equal_masses) {
                    rule = calibrated_zero_threshold(row.max_abs);
                    break;
                }
            }
        }
        if (rule) ctx.extra["zero_threshold_rule"] = rule->description;

        std::string csv =
            "index,masses,ordering,status,min_abs_flow_exponent,max_abs_flow_exponent,"
            "mean_return_time,restarts,zero_count\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& row = rows[i];
            std::string masses_txt;
            for (std::size_t k = 0; k < row.masses.size(); ++k) {
                if (k) masses_txt += ' ';
                masses_txt += format_double(row.masses[k]);
            }
            csv += std::to_string(i);
            csv += ",\"" + masses_txt + "\"";
            csv += ',' + row.ordering;
            csv += ",\"" + row.status + "\"";
            if (row.have_est) {
                csv += ',' + format_double(row.min_abs);
                csv += ',' + format_double(row.max_abs);
                csv += ',' + format_double(row.mean_return_time);
                csv += ',' + std::to_string(row.restarts);
                if (rule) {
                    const ZeroCount count = zero_exponent_count(row.est, *rule);
                    csv += count.conclusive ? ',' + std::to_string(count.count)
                                            : std::string(",inconclusive");
                } else {
                    csv += ",n/a";
                }
            } else {
                csv += ",,,,,";
            }
            csv += '\n';
        }
        ctx.outputs["sweep.csv"] = std::move(csv);
    });
}

RunResult run_experiment(const ExperimentConfig& config) {
    switch (config.mode) {
        case RunMode::Simulate: return run_simulate(config);
        case RunMode::Lyapunov: return run_lyapunov(config);
        case RunMode::Cone: return run_cone(config);
        case RunMode::Neutral: return run_neutral(config);
        case RunMode::Sweep: return run_sweep(config);
        case RunMode::DegenerateDemo: return run_degenerate_demo(config);
    }
    throw ConfigError("unhandled run mode");
}

}  // namespace fallball
