#pragma once

#include <cstdint>
#include <vector>

#include "meevc/solver.hpp"

namespace meevc::bench {

/// Closed-form Taylor-Green vortex on the periodic square [0,2]^2.
struct TGVExact {
  double reynolds = 100.0;

  double decay(double t) const;  // exp(-2 pi^2 t / Re)
  double u(double x, double y, double t) const;
  double v(double x, double y, double t) const;
  Eigen::Vector2d velocity(double x, double y, double t) const;
  double pressure(double x, double y, double t) const;        // static p
  double total_pressure(double x, double y, double t) const;  // P = p + |u|^2/2
  double vorticity(double x, double y, double t) const;
  Eigen::Vector2d curl_vorticity(double x, double y, double t) const;
};

struct ErrorNorms {
  double hdiv_u = 0.0;
  double hcurl_omega = 0.0;
  double l2_p = 0.0;
};

/// Quadrature-evaluated norms against exact fields; the velocity/vorticity
/// errors are measured at t, the (staggered) pressure at t - dt/2. The
/// pressure comparison aligns the means of both fields first.
ErrorNorms error_norms(const MidpointStepper& stepper, const FlowState& state,
                       const TGVExact& exact, double dt_for_pressure_shift);

struct TgvStudyConfig {
  std::vector<int> degrees{1, 2, 3};
  std::vector<int> element_counts{4, 6, 8};
  std::vector<double> deformations{0.0, 0.25};
  double dt = 1.0 / 25.0;
  double reynolds = 100.0;
  double t_end = 1.0;
};

struct TgvErrorRow {
  int degree = 0;
  int elements = 0;
  double deformation = 0.0;
  ErrorNorms errors;
  // Observed h-rates against the previous element count (NaN on the first row).
  double rate_u = 0.0, rate_omega = 0.0, rate_p = 0.0;
};

struct ErrorReport {
  std::vector<TgvErrorRow> rows;
};

ErrorReport tgv_error_study(const TgvStudyConfig& cfg);

/// Uniform sample of a scalar field over the mesh (reference-space grid,
/// physical coordinates emitted).
struct FieldSnapshot {
  double t = 0.0;
  int grid = 0;
  std::vector<double> x, y, value;
};

FieldSnapshot sample_scalar(const Field& f, double t, int grid);

struct ShearLayerConfig {
  int elements = 12;
  int degree = 2;
  double deformation = 0.0;
  double dt = 1.0 / 50.0;
  double reynolds = std::numeric_limits<double>::infinity();
  double t_end = 8.0;
  int snapshot_grid = 201;
  std::vector<double> snapshot_times{0.0, 4.0, 8.0};
  int quad_degree = 0;  // N+3 when 0
  double newton_tol = 1e-12;
  int newton_max_iter = 30;
};

struct ShearLayerResult {
  TransientResult transient;
  std::vector<FieldSnapshot> snapshots;
};

/// Roll-up of the periodic double shear layer on [0, 2 pi]^2
/// (tanh profile of width pi/15, transverse perturbation 0.05 sin x).
ShearLayerResult shear_layer_run(const ShearLayerConfig& cfg);

Eigen::Vector2d shear_layer_velocity(double x, double y);

/// Two counter-rotating Gaussian monopoles at (0, +-0.1) with core
/// radius 0.1 and peak vorticity 320 on [-1,1]^2; no-slip walls.
struct DipoleSetup {
  double omega_e = 320.0;
  double core_radius = 0.1;
  double center_y1 = 0.1;
  double center_y2 = -0.1;
  double reynolds = 625.0;

  Eigen::Vector2d velocity(double x, double y) const;  // unscaled
  double vorticity(double x, double y) const;          // unscaled
};

struct DipoleConfig {
  int elements = 24;
  int degree = 2;
  double grading_beta = 1.8;  // tanh wall clustering; <= 0 gives a uniform mesh
  double dt = 1.0 / 100.0;
  double reynolds = 625.0;
  double t_end = 0.5;
  int snapshot_grid = 201;
  std::vector<double> snapshot_times{};
  std::vector<double> wall_trace_times{0.4, 0.6, 1.0};
  int wall_trace_samples = 241;
  int quad_degree = 0;  // N+3 when 0
  double newton_tol = 1e-12;
  int newton_max_iter = 30;
};

struct WallTrace {
  double t = 0.0;
  std::vector<double> y, omega;  // along x = -1, y in [-0.6, 0]
};

struct DipoleResult {
  TransientResult transient;
  double scaling = 0.0;  // f with K^0 = 2 on the run mesh
  std::vector<FieldSnapshot> snapshots;
  std::vector<WallTrace> wall_traces;
};

DipoleResult dipole_run(const DipoleConfig& cfg);

/// High-resolution projection-only evaluation of the initial dipole:
/// scaling factor f, scaled enstrophy and palinstrophy.
struct DipoleScalingReport {
  double scaling = 0.0;
  double kinetic_energy = 0.0;  // after scaling (target 2)
  double enstrophy = 0.0;
  double palinstrophy = 0.0;
  double total_vorticity = 0.0;
};

DipoleScalingReport dipole_scaling_report(int elements, int degree);

/// a(w_h, u_h, curl w_h) for projected random-phase sine fields with
/// u_h = curl psi_h, over (c, N, NQ) like the quadrature study.
struct TrilinearEntry {
  double deformation = 0.0;
  int degree = 0;
  int quad_degree = 0;
  double value = 0.0;
};

struct TrilinearTableConfig {
  uint64_t seed = 12345;
  int elements = 12;
  std::vector<double> deformations{0.0, 0.25};
  std::vector<int> degrees{2, 3, 4};
  std::vector<int> quad_degrees{1, 2, 3, 4, 5, 6};
};

std::vector<TrilinearEntry> trilinear_table(const TrilinearTableConfig& cfg);

/// Uniform double in (0,1) from the top 53 bits; keeps the table
/// reproducible across standard libraries.
double rng_uniform01(std::uint64_t& state);

}  // namespace meevc::bench
