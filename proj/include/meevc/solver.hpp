#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "meevc/assembly.hpp"
#include "meevc/diagnostics.hpp"

namespace meevc {

using TimeScalarFn = std::function<double(double, double, double)>;
using TimeVectorFn = std::function<Eigen::Vector2d(double, double, double)>;

/// Discrete state (u_h^k, w_h^k, P_h^{k-1/2}) at time index k.
struct FlowState {
  int k = 0;
  double t = 0.0;
  Eigen::VectorXd u;      // D coefficients
  Eigen::VectorXd omega;  // C coefficients
  Eigen::VectorXd p;      // S coefficients, attached to t - dt/2
};

/// Partition of the boundary into the two pairs
///   (normal-velocity essential | total-pressure natural) and
///   (vorticity essential | tangential-velocity natural).
/// Within each pair the sections are disjoint and cover every
/// non-periodic wall. No-slip is normal={all}, tangential={all} with
/// zero data.
struct BCConfig {
  WallSet normal;
  WallSet pressure;
  WallSet vorticity;
  WallSet tangential;
  TimeScalarFn normal_velocity;      // u.n on the normal section
  TimeScalarFn total_pressure;       // P on the pressure section
  TimeScalarFn vorticity_value;      // w on the vorticity section
  TimeScalarFn tangential_velocity;  // u x n on the tangential section
};

enum class PressureGauge { MeanZero, Pin };

struct SolverConfig {
  double dt = 0.0;
  double reynolds = std::numeric_limits<double>::infinity();  // infinity = inviscid
  double newton_tol = 1e-12;
  int newton_max_iter = 30;
  assembly::QuadConfig quad{4};
  BCConfig bc;
  PressureGauge gauge = PressureGauge::MeanZero;

  double inv_reynolds() const { return std::isinf(reynolds) ? 0.0 : 1.0 / reynolds; }
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_norms;
  bool converged = false;
};

struct NewtonFailure : std::runtime_error {
  NewtonReport report;
  NewtonFailure(const std::string& what, NewtonReport r)
      : std::runtime_error(what), report(std::move(r)) {}
};

struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sparse LU with a residual check; throws SingularSystem on failure.
Eigen::VectorXd linear_solve(const SparseMat& a, const Eigen::VectorXd& b);

struct TransientResult {
  std::vector<DiagnosticsRecord> records;
  std::vector<int> newton_iterations;  // per accepted step
  FlowState final_state;
  bool completed = false;
  std::string error;
};

using StepHook = std::function<void(const FlowState&, const DiagnosticsRecord&)>;

/// Implicit-midpoint integrator for the coupled (u, w, P) system with
/// Newton-Raphson linearization. One instance pins mesh, degree,
/// quadrature, and boundary setup; states flow through it.
class MidpointStepper {
 public:
  MidpointStepper(const FunctionSpace& d_space, const FunctionSpace& c_space,
                  const FunctionSpace& s_space, SolverConfig cfg);

  const SolverConfig& config() const { return cfg_; }
  const SparseMat& mass_d() const { return mass_d_; }
  const SparseMat& mass_c() const { return mass_c_; }
  const SparseMat& mass_s() const { return mass_s_; }
  const SparseMat& curl() const { return curl_; }
  const SparseMat& div() const { return div_; }
  int unknowns() const { return ntot_; }

  /// Full nonlinear residual of the midpoint step at a guess for level k,
  /// essential rows replaced by constraint residuals, gauge row appended.
  Eigen::VectorXd residual(const FlowState& prev, const FlowState& guess,
                           const TimeVectorFn& force) const;

  /// One converged step; throws NewtonFailure after newton_max_iter.
  std::pair<FlowState, NewtonReport> step(const FlowState& prev, const TimeVectorFn& force) const;

  /// u^0 by canonical projection; w^0 from the discrete kinematic
  /// relation at t0 (or by projection of an analytic vorticity when given).
  FlowState initial_state(const VectorFn& u0, double t0,
                          const std::optional<ScalarFn>& omega0 = std::nullopt) const;

  DiagnosticsRecord diagnose(const FlowState& state) const;
  DiagnosticsRecord diagnose(const FlowState& prev, const FlowState& curr) const;

  TransientResult run_transient(const VectorFn& u0, double t0, double t_end,
                                const TimeVectorFn& force = nullptr,
                                const StepHook& hook = nullptr) const;
  TransientResult run_transient(const FlowState& initial, double t_end,
                                const TimeVectorFn& force = nullptr,
                                const StepHook& hook = nullptr) const;

  const FunctionSpace& d_space() const { return *d_; }
  const FunctionSpace& c_space() const { return *c_; }
  const FunctionSpace& s_space() const { return *s_; }

 private:
  const FunctionSpace* d_;
  const FunctionSpace* c_;
  const FunctionSpace* s_;
  SolverConfig cfg_;
  int nd_, nc_, ns_, ntot_;
  bool gauge_active_ = false;
  SparseMat mass_d_, mass_c_, mass_s_, curl_, div_;
  SparseMat visc_;        // mass_d * curl
  SparseMat grad_;        // div^T * mass_s
  SparseMat kin_;         // curl^T * mass_d
  std::vector<int> essential_u_;      // D dofs on the normal section
  std::vector<int> essential_omega_;  // C dofs on the vorticity section
  std::vector<char> essential_mask_;  // over the full unknown vector
  std::vector<Eigen::Triplet<double>> const_triplets_;

  Eigen::VectorXd essential_values(double t) const;  // full-length, zeros elsewhere
  void validate_bc() const;
};

}  // namespace meevc
