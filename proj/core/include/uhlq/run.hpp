#pragma once

#include "uhlq/gdqpt.hpp"
#include "uhlq/quench.hpp"
#include "uhlq/spin_half.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace uhlq {

enum class OutputFormat { csv, json };

struct SpinScenarioConfig {
    double omega0 = 1.0;
    double temperature = 1.0;
    double theta = 0.0;
    double phi = 0.0;
};

struct GenericScenarioConfig {
    Matrix h0;
    Matrix h;
    double beta = 1.0;
    std::optional<double> period;
};

struct GridConfig {
    double t_max = 0.0;
    double dt = 0.0;
};

struct OutputConfig {
    std::string path; // output directory
    OutputFormat format = OutputFormat::csv;
};

struct AnalysisConfig {
    bool detect_gdqpt = true;
    int cyclic_n_max = 0; // 0 disables cyclic sampling
};

struct RunConfig {
    std::variant<SpinScenarioConfig, GenericScenarioConfig> scenario;
    GridConfig grid;
    OutputConfig outputs;
    AnalysisConfig analysis;
};

struct SweepConfig {
    RunConfig base;                   // base.scenario must be the spin form
    std::vector<double> temperatures; // one run per temperature
};

RunConfig load_run_config(const std::string& path);
SweepConfig load_sweep_config(const std::string& path);
QuenchScenario scenario_from_config(const RunConfig& config);

/// One output row; theta_u is meaningful only on cyclic rows.
struct TrajectoryRecord {
    double t = 0.0;
    Complex g;
    bool phase_defined = false;
    double theta_g = 0.0;
    Rate r;
    bool is_cyclic = false;
    bool theta_u_defined = false;
    double theta_u = 0.0;
};

struct RunResult {
    std::vector<TrajectoryRecord> trajectory;
    std::vector<GdqptEvent> events;
    std::vector<CyclicSample> cyclic;
    DetectorDiagnostics diagnostics;
};

/// The computation behind `trajectory`, without file I/O.
RunResult compute_trajectory(const RunConfig& config);

/// Writes trajectory/events/cyclic tables into the configured directory.
/// Files are written to a temp name and renamed, so failures leave no
/// partial outputs. Fixed 12-significant-digit formatting keeps reruns
/// byte-identical.
void write_outputs(const RunResult& result, const OutputConfig& outputs);

void run_trajectory(const RunConfig& config);
void run_sweep(const SweepConfig& config, int threads = 0);

/// The two-temperature preset (T = 1.0 w0 and T = 0.01 w0, equator quench,
/// t_max = 20/w0): one command reproduces the headline phase/rate tables.
void run_figure1(const std::string& out_dir);

/// Thread count for sweeps: UHLQ_THREADS if set, else hardware concurrency.
int thread_count_from_env();

std::string format_double(double v); // %.12g

} // namespace uhlq
