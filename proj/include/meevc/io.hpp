#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "meevc/bench.hpp"

namespace meevc::io {

/// One resolved run: benchmark choice plus every knob the CLI or a JSON
/// config can set. Unknown config keys are rejected.
struct RunConfig {
  std::string benchmark;  // tgv | shear-layer | dipole | trilinear-table | custom
  std::string out_dir = "out";
  std::uint64_t seed = 12345;

  int elements = 0;          // K (benchmark default when 0)
  int degree = 0;            // N
  double deformation = 0.0;  // c
  std::optional<double> dt;
  std::optional<double> reynolds;  // infinity = inviscid
  double t_end = 0.0;              // benchmark default when 0
  int quad_degree = 0;             // NQ (N+3 when 0)
  double newton_tol = 1e-12;
  int newton_max_iter = 30;
  int snapshot_grid = 201;
  std::string gauge = "mean-zero";  // mean-zero | pin
  double grading_beta = 1.8;        // dipole mesh clustering
  std::string initial = "";         // custom: tgv | shear-layer | dipole | zero
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parse and validate a JSON config file into overrides on top of cfg.
void apply_config_file(RunConfig& cfg, const std::string& path);
/// Fill benchmark defaults and validate; throws ConfigError.
RunConfig finalize_config(RunConfig cfg);

/// Exit codes: 0 ok, 2 config error, 3 solver failure, 4 I/O error.
int run(const RunConfig& cfg);

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records);
std::string field_csv(const bench::FieldSnapshot& snap);
std::string wall_trace_csv(const bench::WallTrace& trace);
std::string error_table_csv(const bench::ErrorReport& report);
std::string trilinear_csv(const std::vector<bench::TrilinearEntry>& entries);
std::string metadata_json(const RunConfig& cfg, const std::vector<int>& newton_iterations,
                          bool completed, const std::string& error);

void write_file(const std::string& path, const std::string& content);

}  // namespace meevc::io
