// Configuration parsing and every serialized output: CSV time series,
// plain-text snapshots, run manifests and JSON-lines verdicts.
#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "capflow/flow.hpp"

namespace capflow {

inline constexpr const char* kVersion = "capflow 1.0.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// `key = value` entries separated by newlines or ';'; '#' starts a comment.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Angle with an explicit unit: "60 deg" or "1.0471975511965976 rad".
double parse_angle(const std::string& value);
std::vector<double> parse_angle_list(const std::string& value);
InitialSpec parse_initial(const std::string& value);

FlowConfig parse_config(const std::string& text);

// Settings for the check-* and convergence-study subcommands.
struct StudyConfig {
    Mode mode = Mode::Axisym;
    int n = 2;
    int n_beta = 512;
    int n_alpha = 1;
    std::vector<double> thetas;
    int samples = 20;
    double eps = 0.1;
    double tolerance = 1e-5;
    double order_min = 1.8;
    int cap_n_beta = 4096;  // resolution of the equality-case caps
    int levels = 4;
    std::uint64_t seed = 1;
};

StudyConfig parse_study_config(const std::string& text, const std::string& subcommand);

// Config used by `sweep`: a flow config plus a list of contact angles.
struct SweepConfig {
    FlowConfig flow;
    std::vector<double> thetas;
};
SweepConfig parse_sweep_config(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);

// CSV time series.
std::string timeseries_header(int n);
std::string timeseries_row(const FunctionalReport& r);
void write_timeseries(const std::filesystem::path& path, const std::vector<FunctionalReport>& reports, int n);

// Snapshot v1.
std::string snapshot_text(const RadialGraph& rg, double t);
void write_snapshot(const std::filesystem::path& path, const RadialGraph& rg, double t);
struct Snapshot {
    RadialGraph rg;
    double t = 0.0;
};
Snapshot parse_snapshot(const std::string& text);
Snapshot read_snapshot(const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    std::string config_echo;
    std::string version = kVersion;
    std::string grid;
    std::string start_time;
    std::string end_time;
    std::string status;
    std::vector<std::string> files;
};

std::string describe_grid(const Grid& g);
std::string utc_timestamp();
void write_manifest(const std::filesystem::path& path, const RunManifest& m);

// Append-only JSON-lines stream.
class VerdictWriter {
public:
    VerdictWriter() = default;
    explicit VerdictWriter(const std::filesystem::path& path);
    void write(const nlohmann::json& record);
    bool is_open() const { return out_.is_open(); }

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

std::string format_double(double x);

}  // namespace capflow
