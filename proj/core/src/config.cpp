#include "fallball/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fallball/errors.hpp"

namespace fallball {

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Simulate: return "simulate";
        case RunMode::Lyapunov: return "lyapunov";
        case RunMode::Cone: return "cone";
        case RunMode::Neutral: return "neutral";
        case RunMode::Sweep: return "sweep";
        case RunMode::DegenerateDemo: return "degenerate-demo";
    }
    return "simulate";
}

RunMode parse_run_mode(const std::string& text) {
    if (text == "simulate") return RunMode::Simulate;
    if (text == "lyapunov") return RunMode::Lyapunov;
    if (text == "cone") return RunMode::Cone;
    if (text == "neutral") return RunMode::Neutral;
    if (text == "sweep") return RunMode::Sweep;
    if (text == "degenerate-demo") return RunMode::DegenerateDemo;
    throw ConfigError("unknown mode '" + text + "'");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& value, const std::string& context) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc() || res.ptr != last)
        throw ConfigError(context + ": expected a number, got '" + value + "'");
    return out;
}

std::int64_t parse_int(const std::string& value, const std::string& context) {
    std::int64_t out = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size())
        throw ConfigError(context + ": expected an integer, got '" + value + "'");
    return out;
}

std::uint64_t parse_uint(const std::string& value, const std::string& context) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size())
        throw ConfigError(context + ": expected a nonnegative integer, got '" + value + "'");
    return out;
}

bool parse_bool(const std::string& value, const std::string& context) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(context + ": expected a boolean, got '" + value + "'");
}

std::vector<double> parse_list(const std::string& value, const std::string& context) {
    std::vector<double> out;
    std::istringstream in(value);
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok, context));
    return out;
}

std::vector<std::vector<double>> parse_grid(const std::string& value, const std::string& context) {
    std::vector<std::vector<double>> out;
    std::string row;
    std::istringstream in(value);
    while (std::getline(in, row, ';')) {
        row = trim(row);
        if (row.empty()) continue;
        out.push_back(parse_list(row, context));
    }
    return out;
}

}  // namespace

void apply_config_entry(ExperimentConfig& c, const std::string& key, const std::string& value,
                        const std::string& context) {
    if (key == "mode") {
        c.mode = parse_run_mode(value);
    } else if (key == "masses") {
        c.masses = parse_list(value, context);
    } else if (key == "h0") {
        c.h0 = parse_double(value, context);
    } else if (key == "seed") {
        c.seed = parse_uint(value, context);
    } else if (key == "q0") {
        c.q0 = parse_list(value, context);
    } else if (key == "v0") {
        c.v0 = parse_list(value, context);
    } else if (key == "max_events") {
        c.max_events = parse_int(value, context);
    } else if (key == "max_time") {
        const double t = parse_double(value, context);
        if (t > 0.0)
            c.max_time = t;
        else
            c.max_time.reset();
    } else if (key == "n_returns") {
        c.n_returns = parse_int(value, context);
    } else if (key == "qr_stride") {
        c.qr_stride = static_cast<int>(parse_int(value, context));
    } else if (key == "history_stride") {
        c.history_stride = parse_int(value, context);
    } else if (key == "horizon_events") {
        c.horizon_events = parse_int(value, context);
    } else if (key == "n_points") {
        c.n_points = static_cast<int>(parse_int(value, context));
    } else if (key == "max_restarts") {
        c.max_restarts = static_cast<int>(parse_int(value, context));
    } else if (key == "burst_limit") {
        c.burst_limit = parse_int(value, context);
    } else if (key == "burst_window") {
        c.burst_window = parse_double(value, context);
    } else if (key == "tie_tol") {
        c.tie_tol = parse_double(value, context);
    } else if (key == "zero_threshold") {
        c.zero_threshold = parse_double(value, context);
    } else if (key == "calibration_max_exponent") {
        c.calibration_max_exponent = parse_double(value, context);
    } else if (key == "grid") {
        c.grid = parse_grid(value, context);
    } else if (key == "threads") {
        c.threads = static_cast<int>(parse_int(value, context));
    } else if (key == "out_dir") {
        c.out_dir = value;
    } else if (key == "events_jsonl") {
        c.events_jsonl = parse_bool(value, context);
    } else {
        throw ConfigError(context + ": unknown key '" + key + "'");
    }
}

void ExperimentConfig::validate() const {
    if (mode == RunMode::Sweep) {
        if (grid.empty()) throw ConfigError("sweep mode needs a nonempty 'grid'");
        for (const auto& row : grid)
            if (row.size() < 2) throw ConfigError("every sweep grid point needs >= 2 masses");
    } else {
        if (masses.size() < 2) throw ConfigError("'masses' needs at least 2 entries");
        for (double m : masses)
            if (!(m > 0.0)) throw ConfigError("all masses must be positive");
    }
    if (!(h0 > 0.0)) throw ConfigError("'h0' must be positive");
    if (max_events < 0) throw ConfigError("'max_events' must be nonnegative");
    if (n_returns < 1) throw ConfigError("'n_returns' must be positive");
    if (qr_stride < 1) throw ConfigError("'qr_stride' must be positive");
    if (history_stride < 1) throw ConfigError("'history_stride' must be positive");
    if (horizon_events < 0) throw ConfigError("'horizon_events' must be nonnegative");
    if (n_points < 1) throw ConfigError("'n_points' must be positive");
    if (max_restarts < 0) throw ConfigError("'max_restarts' must be nonnegative");
    if (burst_limit < 1) throw ConfigError("'burst_limit' must be positive");
    if (!(burst_window > 0.0)) throw ConfigError("'burst_window' must be positive");
    if (!(tie_tol > 0.0)) throw ConfigError("'tie_tol' must be positive");
    if (zero_threshold && !(*zero_threshold > 0.0))
        throw ConfigError("'zero_threshold' must be positive");
    if (calibration_max_exponent && !(*calibration_max_exponent >= 0.0))
        throw ConfigError("'calibration_max_exponent' must be nonnegative");
    if (threads < 0) throw ConfigError("'threads' must be nonnegative");
    if ((q0 && !v0) || (v0 && !q0)) throw ConfigError("'q0' and 'v0' must be given together");
    if (q0 && q0->size() != masses.size())
        throw ConfigError("'q0' length does not match 'masses'");
    if (v0 && v0->size() != masses.size())
        throw ConfigError("'v0' length does not match 'masses'");
    if (out_dir.empty()) throw ConfigError("'out_dir' must not be empty");
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        const std::string context = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos)
            throw ConfigError(context + ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(context + ": empty key");
        apply_config_entry(config, key, value, context);
    }
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

}  // namespace fallball
