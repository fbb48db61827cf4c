#include "capflow/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

namespace capflow {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

double to_double(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw ConfigError("invalid number for '" + key + "': '" + value + "'");
    return x;
}

long to_long(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw ConfigError("invalid integer for '" + key + "': '" + value + "'");
    return x;
}

void reject_unknown(const std::map<std::string, std::string>& kv, const std::set<std::string>& allowed) {
    for (const auto& [k, v] : kv)
        if (!allowed.count(k)) throw ConfigError("unknown config key '" + k + "'");
}

Mode parse_mode(const std::string& v) {
    try {
        return mode_from_string(trim(v));
    } catch (const GridError& e) {
        throw ConfigError(e.what());
    }
}

void check_theta(double theta) {
    if (!(theta > 0.0 && theta < kPi)) throw ConfigError("theta out of (0, pi)");
}

// Shared grid keys: mode, n, n_beta, n_alpha.
struct GridKeys {
    Mode mode = Mode::Axisym;
    int n = 2;
    int n_beta = 0;
    int n_alpha = 1;
};

GridKeys parse_grid_keys(const std::map<std::string, std::string>& kv, int default_n_beta) {
    GridKeys g;
    g.n_beta = default_n_beta;
    if (auto it = kv.find("mode"); it != kv.end()) g.mode = parse_mode(it->second);
    if (auto it = kv.find("n"); it != kv.end()) g.n = static_cast<int>(to_long("n", it->second));
    if (auto it = kv.find("n_beta"); it != kv.end()) g.n_beta = static_cast<int>(to_long("n_beta", it->second));
    g.n_alpha = g.mode == Mode::Full2D ? 32 : 1;
    if (auto it = kv.find("n_alpha"); it != kv.end()) g.n_alpha = static_cast<int>(to_long("n_alpha", it->second));
    if (g.n_beta <= 0) throw ConfigError("n_beta must be positive");
    if (g.n_alpha <= 0) throw ConfigError("n_alpha must be positive");
    if (g.n < 2) throw ConfigError("n must be at least 2");
    if (g.mode == Mode::Full2D && g.n != 2) throw ConfigError("full2d mode requires n = 2");
    if (g.mode == Mode::Axisym && g.n_alpha != 1) throw ConfigError("n_alpha applies to full2d mode only");
    try {
        (void)build_grid(g.mode, g.n, g.n_beta, g.n_alpha);
    } catch (const GridError& e) {
        throw ConfigError(e.what());
    }
    return g;
}

const std::set<std::string> kFlowKeys = {"theta",     "mode",     "n",           "n_beta",        "n_alpha",
                                         "initial",   "dt_safety", "t_max",      "stop_tol",      "mono_tol",
                                         "volume_tol", "output_every", "monitor_every", "max_steps", "seed"};

FlowConfig flow_from_map(const std::map<std::string, std::string>& kv, bool require_theta) {
    FlowConfig c;
    if (auto it = kv.find("theta"); it != kv.end()) {
        c.theta = parse_angle(it->second);
    } else if (require_theta) {
        throw ConfigError("missing required key 'theta'");
    }
    const GridKeys g = parse_grid_keys(kv, 128);
    c.mode = g.mode;
    c.n = g.n;
    c.n_beta = g.n_beta;
    c.n_alpha = g.n_alpha;
    if (auto it = kv.find("initial"); it != kv.end()) c.initial = parse_initial(it->second);
    auto num = [&](const char* key, double& dst) {
        if (auto it = kv.find(key); it != kv.end()) dst = to_double(key, it->second);
    };
    auto integer = [&](const char* key, long& dst) {
        if (auto it = kv.find(key); it != kv.end()) dst = to_long(key, it->second);
    };
    num("dt_safety", c.dt_safety);
    num("t_max", c.t_max);
    num("stop_tol", c.stop_tol);
    num("mono_tol", c.mono_tol);
    num("volume_tol", c.volume_tol);
    integer("output_every", c.output_every);
    integer("monitor_every", c.monitor_every);
    integer("max_steps", c.max_steps);
    if (auto it = kv.find("seed"); it != kv.end()) c.seed = static_cast<std::uint64_t>(to_long("seed", it->second));

    if (!(c.dt_safety > 0.0 && c.dt_safety <= 1.0)) throw ConfigError("dt_safety must lie in (0, 1]");
    if (!(c.t_max >= 0.0)) throw ConfigError("t_max must be non-negative");
    if (!(c.stop_tol > 0.0)) throw ConfigError("stop_tol must be positive");
    if (!(c.mono_tol >= 0.0)) throw ConfigError("mono_tol must be non-negative");
    if (c.output_every < 0) throw ConfigError("output_every must be non-negative");
    if (c.monitor_every <= 0) throw ConfigError("monitor_every must be positive");
    if (c.max_steps < 0) throw ConfigError("max_steps must be non-negative");
    if (c.initial.r <= 0.0) throw ConfigError("initial radius must be positive");
    return c;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::istringstream in(text);
    auto handle = [&](std::string entry) {
        if (auto hash = entry.find('#'); hash != std::string::npos) entry.erase(hash);
        entry = trim(entry);
        if (entry.empty()) return;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + entry + "'");
        const std::string key = trim(entry.substr(0, eq));
        const std::string value = trim(entry.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key in '" + entry + "'");
        if (kv.count(key)) throw ConfigError("duplicate config key '" + key + "'");
        kv[key] = value;
    };
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::size_t start = 0;
        for (std::size_t semi; (semi = line.find(';', start)) != std::string::npos; start = semi + 1)
            handle(line.substr(start, semi - start));
        handle(line.substr(start));
    }
    return kv;
}

double parse_angle(const std::string& value) {
    const auto parts = split_ws(value);
    if (parts.size() != 2) throw ConfigError("angle needs a value and a unit (deg or rad): '" + value + "'");
    const double x = to_double("theta", parts[0]);
    double theta;
    if (parts[1] == "deg")
        theta = x * kPi / 180.0;
    else if (parts[1] == "rad")
        theta = x;
    else
        throw ConfigError("unknown angle unit '" + parts[1] + "' (expected deg or rad)");
    check_theta(theta);
    return theta;
}

std::vector<double> parse_angle_list(const std::string& value) {
    // "30, 60, 90 deg"
    const auto parts = split_ws(value);
    if (parts.size() < 2) throw ConfigError("angle list needs values and a unit: '" + value + "'");
    const std::string unit = parts.back();
    std::string numbers = value.substr(0, value.rfind(unit));
    std::replace(numbers.begin(), numbers.end(), ',', ' ');
    std::vector<double> out;
    for (const auto& w : split_ws(numbers)) out.push_back(parse_angle(w + " " + unit));
    if (out.empty()) throw ConfigError("empty angle list");
    return out;
}

InitialSpec parse_initial(const std::string& value) {
    const auto parts = split_ws(value);
    if (parts.empty()) throw ConfigError("empty initial-surface spec");
    InitialSpec s;
    s.kind = parts[0];
    static const std::set<std::string> kinds = {"cap", "perturbed", "random", "sphere", "ellipsoid"};
    if (!kinds.count(s.kind)) throw ConfigError("unknown initial kind '" + s.kind + "'");
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string::npos) throw ConfigError("expected name=value in initial spec, got '" + parts[i] + "'");
        const std::string k = parts[i].substr(0, eq), v = parts[i].substr(eq + 1);
        if (k == "r")
            s.r = to_double("initial r", v);
        else if (k == "eps")
            s.eps = to_double("initial eps", v);
        else if (k == "shape")
            s.shape = static_cast<int>(to_long("initial shape", v));
        else
            throw ConfigError("unknown initial parameter '" + k + "'");
    }
    if (!(s.r > 0.0)) throw ConfigError("initial radius must be positive");
    if (s.kind == "perturbed") {
        try {
            (void)named_perturbation(s.shape, s.eps);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    return s;
}

FlowConfig parse_config(const std::string& text) {
    const auto kv = parse_key_values(text);
    reject_unknown(kv, kFlowKeys);
    FlowConfig c = flow_from_map(kv, true);
    if (c.initial.kind == "perturbed" && named_perturbation(c.initial.shape, 0.0).azimuthal.size() > 0 &&
        c.mode != Mode::Full2D)
        throw ConfigError("perturbation shape " + std::to_string(c.initial.shape) + " needs full2d mode");
    return c;
}

StudyConfig parse_study_config(const std::string& text, const std::string& subcommand) {
    const auto kv = parse_key_values(text);
    reject_unknown(kv, {"mode", "n", "n_beta", "n_alpha", "thetas", "samples", "eps", "tolerance", "order_min",
                        "cap_n_beta", "levels", "seed"});
    StudyConfig c;
    int default_nb = 512;
    if (subcommand == "check-inequalities") {
        default_nb = 4096;
        c.samples = 50;
        c.tolerance = 1e-6;
        c.eps = 0.1;
    } else if (subcommand == "convergence-study") {
        default_nb = 32;
    }
    // Full2D studies default to square 128 x 128 grids and a looser
    // identity tolerance; n_alpha follows n_beta unless given.
    const bool full = kv.count("mode") && trim(kv.at("mode")) == "full2d";
    if (full && subcommand != "convergence-study") {
        default_nb = 128;
        c.cap_n_beta = 256;
        if (subcommand == "check-identities") c.tolerance = 1e-4;
    }
    auto grid_kv = kv;
    if (full && !kv.count("n_alpha"))
        grid_kv["n_alpha"] = kv.count("n_beta") ? kv.at("n_beta") : std::to_string(default_nb);
    const GridKeys g = parse_grid_keys(grid_kv, default_nb);
    c.mode = g.mode;
    c.n = g.n;
    c.n_beta = g.n_beta;
    c.n_alpha = g.n_alpha;
    if (subcommand == "check-inequalities")
        c.thetas = parse_angle_list("30, 60, 90 deg");
    else
        c.thetas = parse_angle_list("30, 60, 90, 120, 150 deg");
    if (auto it = kv.find("thetas"); it != kv.end()) c.thetas = parse_angle_list(it->second);
    if (auto it = kv.find("samples"); it != kv.end()) c.samples = static_cast<int>(to_long("samples", it->second));
    if (auto it = kv.find("eps"); it != kv.end()) c.eps = to_double("eps", it->second);
    if (auto it = kv.find("tolerance"); it != kv.end()) c.tolerance = to_double("tolerance", it->second);
    if (auto it = kv.find("order_min"); it != kv.end()) c.order_min = to_double("order_min", it->second);
    if (auto it = kv.find("cap_n_beta"); it != kv.end())
        c.cap_n_beta = static_cast<int>(to_long("cap_n_beta", it->second));
    if (auto it = kv.find("levels"); it != kv.end()) c.levels = static_cast<int>(to_long("levels", it->second));
    if (auto it = kv.find("seed"); it != kv.end()) c.seed = static_cast<std::uint64_t>(to_long("seed", it->second));
    if (c.samples <= 0) throw ConfigError("samples must be positive");
    if (!(c.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    if (c.levels < 3) throw ConfigError("levels must be at least 3");
    if (c.cap_n_beta < 8) throw ConfigError("cap_n_beta must be at least 8");
    return c;
}

SweepConfig parse_sweep_config(const std::string& text) {
    auto kv = parse_key_values(text);
    std::set<std::string> allowed = kFlowKeys;
    allowed.insert("thetas");
    reject_unknown(kv, allowed);
    SweepConfig c;
    if (auto it = kv.find("thetas"); it != kv.end()) {
        c.thetas = parse_angle_list(it->second);
        kv.erase(it);
    }
    c.flow = flow_from_map(kv, c.thetas.empty());
    if (c.thetas.empty()) c.thetas = {c.flow.theta};
    return c;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string timeseries_header(int n) {
    std::string h = "t,dt,max_F";
    for (int k = 0; k <= n + 1; ++k) h += ",V" + std::to_string(k);
    for (int k = 1; k <= n; ++k) h += ",mink_res_" + std::to_string(k);
    h += ",static_res,iso_ratio";
    for (int k = 1; k <= n; ++k) h += ",af_ratio_" + std::to_string(k);
    h += ",mink_gap,min_u,min_kappa,max_H,bc_res,r_fit,rms_fit";
    return h;
}

std::string timeseries_row(const FunctionalReport& r) {
    std::string s = format_double(r.t) + "," + format_double(r.dt) + "," + format_double(r.max_F);
    for (double v : r.V) s += "," + format_double(v);
    for (double v : r.mink_residual) s += "," + format_double(v);
    s += "," + format_double(r.static_residual) + "," + format_double(r.iso_ratio);
    for (double v : r.af_ratio) s += "," + format_double(v);
    for (double v : {r.minkowski_gap, r.min_u, r.min_kappa, r.max_H, r.bc_residual, r.fitted_cap.r, r.fitted_cap.rms})
        s += "," + format_double(v);
    return s;
}

void write_timeseries(const std::filesystem::path& path, const std::vector<FunctionalReport>& reports, int n) {
    if (reports.empty()) throw IoError("refusing to write an empty time series to '" + path.string() + "'");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << timeseries_header(n) << '\n';
    for (const auto& r : reports) out << timeseries_row(r) << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string snapshot_text(const RadialGraph& rg, double t) {
    const Grid& g = rg.grid;
    std::string s = "capflow-snapshot v1\n";
    s += to_string(g.mode) + " " + std::to_string(g.n) + " " + std::to_string(g.nb) + " " + std::to_string(g.na) +
         " " + format_double(rg.theta) + " " + format_double(t) + "\n";
    for (int j = 0; j < g.nb; ++j)
        for (int k = 0; k < g.na; ++k) {
            const double phi = rg.phi[g.index(j, k)];
            const double rho = std::exp(phi);
            const double x = rho * g.sin_beta[j] * (g.full2d() ? g.cos_alpha[k] : 1.0);
            const double z = rho * g.cos_beta[j];
            if (g.full2d()) {
                const double y = rho * g.sin_beta[j] * g.sin_alpha[k];
                s += format_double(g.beta[j]) + " " + format_double(g.alpha[k]) + " " + format_double(phi) + " " +
                     format_double(x) + " " + format_double(y) + " " + format_double(z) + "\n";
            } else {
                s += format_double(g.beta[j]) + " " + format_double(phi) + " " + format_double(x) + " " +
                     format_double(z) + "\n";
            }
        }
    return s;
}

void write_snapshot(const std::filesystem::path& path, const RadialGraph& rg, double t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << snapshot_text(rg, t);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Snapshot parse_snapshot(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "capflow-snapshot v1") throw IoError("not a capflow-snapshot v1 file");
    if (!std::getline(in, line)) throw IoError("snapshot header truncated");
    const auto head = split_ws(line);
    if (head.size() != 6) throw IoError("malformed snapshot header line");
    const Mode mode = mode_from_string(head[0]);
    const int n = std::stoi(head[1]), nb = std::stoi(head[2]), na = std::stoi(head[3]);
    Snapshot snap;
    snap.rg.grid = build_grid(mode, n, nb, na);
    snap.rg.theta = std::strtod(head[4].c_str(), nullptr);
    snap.t = std::strtod(head[5].c_str(), nullptr);
    const std::size_t cols = mode == Mode::Full2D ? 6 : 4;
    const std::size_t phi_col = mode == Mode::Full2D ? 2 : 1;
    snap.rg.phi.resize(snap.rg.grid.size());
    for (std::size_t i = 0; i < snap.rg.phi.size(); ++i) {
        if (!std::getline(in, line)) throw IoError("snapshot truncated at node " + std::to_string(i));
        const auto w = split_ws(line);
        if (w.size() != cols) throw IoError("malformed snapshot node line " + std::to_string(i));
        snap.rg.phi[i] = std::strtod(w[phi_col].c_str(), nullptr);
    }
    return snap;
}

Snapshot read_snapshot(const std::filesystem::path& path) { return parse_snapshot(read_text_file(path)); }

std::string describe_grid(const Grid& g) {
    std::ostringstream s;
    s << to_string(g.mode) << " n=" << g.n << " n_beta=" << g.nb << " n_alpha=" << g.na
      << " dbeta=" << format_double(g.dbeta);
    return s.str();
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "command: " << m.command << '\n';
    out << "version: " << m.version << '\n';
    out << "grid: " << m.grid << '\n';
    out << "start: " << m.start_time << '\n';
    out << "end: " << m.end_time << '\n';
    out << "status: " << m.status << '\n';
    for (const auto& f : m.files) out << "file: " << f << '\n';
    out << "config:\n";
    std::istringstream cfg(m.config_echo);
    for (std::string line; std::getline(cfg, line);) out << "  " << line << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

VerdictWriter::VerdictWriter(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
}

void VerdictWriter::write(const nlohmann::json& record) {
    if (!out_.is_open()) return;
    out_ << record.dump() << '\n';
    out_.flush();
    if (!out_) throw IoError("write failed for '" + path_.string() + "'");
}

}  // namespace capflow
