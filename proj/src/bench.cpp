#include "meevc/bench.hpp"

#include <algorithm>
#include <cmath>

namespace meevc::bench {

namespace {

// Element index for a reference coordinate given the break array.
int locate(const std::vector<double>& breaks, double r, double* local) {
  int k = static_cast<int>(breaks.size()) - 2;
  int i = static_cast<int>(std::upper_bound(breaks.begin(), breaks.end(), r) - breaks.begin()) - 1;
  i = std::clamp(i, 0, k);
  *local = 2.0 * (r - breaks[i]) / (breaks[i + 1] - breaks[i]) - 1.0;
  return i;
}

}  // namespace

double TGVExact::decay(double t) const { return std::exp(-2.0 * M_PI * M_PI * t / reynolds); }

double TGVExact::u(double x, double y, double t) const {
  return -std::sin(M_PI * x) * std::cos(M_PI * y) * decay(t);
}

double TGVExact::v(double x, double y, double t) const {
  return std::cos(M_PI * x) * std::sin(M_PI * y) * decay(t);
}

Eigen::Vector2d TGVExact::velocity(double x, double y, double t) const {
  return {u(x, y, t), v(x, y, t)};
}

double TGVExact::pressure(double x, double y, double t) const {
  return 0.25 * (std::cos(2.0 * M_PI * x) + std::cos(2.0 * M_PI * y)) * decay(t) * decay(t);
}

double TGVExact::total_pressure(double x, double y, double t) const {
  const double uu = u(x, y, t), vv = v(x, y, t);
  return pressure(x, y, t) + 0.5 * (uu * uu + vv * vv);
}

double TGVExact::vorticity(double x, double y, double t) const {
  return -2.0 * M_PI * std::sin(M_PI * x) * std::sin(M_PI * y) * decay(t);
}

Eigen::Vector2d TGVExact::curl_vorticity(double x, double y, double t) const {
  // curl w = (dw/dy, -dw/dx)
  const double s = 2.0 * M_PI * M_PI * decay(t);
  return {-s * std::sin(M_PI * x) * std::cos(M_PI * y), s * std::cos(M_PI * x) * std::sin(M_PI * y)};
}

ErrorNorms error_norms(const MidpointStepper& stepper, const FlowState& state,
                       const TGVExact& exact, double dt_for_pressure_shift) {
  const FunctionSpace& d = stepper.d_space();
  const FunctionSpace& c = stepper.c_space();
  const FunctionSpace& s = stepper.s_space();
  const Mesh& mesh = d.mesh();
  const double t = state.t;
  const double tp = state.t - 0.5 * dt_for_pressure_shift;

  // Decoupled from the assembly quadrature.
  QuadRule rule = gauss_nodes(stepper.config().quad.gauss_degree + 2);

  Field u_h(d, state.u);
  Field w_h(c, state.omega);
  Field p_h(s, state.p);
  Field div_u(s, stepper.div() * state.u);
  Field curl_w(d, stepper.curl() * state.omega);

  const double area = mesh.config().scale * mesh.config().scale;
  // Integral-type S dofs: the coefficient sum is the domain integral.
  const double p_h_mean = state.p.sum() / area;
  double p_ex_int = 0.0;
  for (int elem = 0; elem < mesh.element_count(); ++elem) {
    for (const auto& qp : mesh.physical_quadrature(elem, rule))
      p_ex_int += qp.weight * qp.jac.det * exact.total_pressure(qp.physical[0], qp.physical[1], tp);
  }
  const double p_ex_mean = p_ex_int / area;

  double e_u = 0.0, e_divu = 0.0, e_w = 0.0, e_curlw = 0.0, e_p = 0.0;
  for (int elem = 0; elem < mesh.element_count(); ++elem) {
    for (size_t qy = 0; qy < rule.points.size(); ++qy) {
      for (size_t qx = 0; qx < rule.points.size(); ++qx) {
        const double xi = rule.points[qx], eta = rule.points[qy];
        auto js = mesh.jacobian_local(elem, xi, eta);
        auto xph = mesh.map_local(elem, xi, eta);
        const double w = rule.weights[qx] * rule.weights[qy] * js.det;

        Eigen::Vector2d du = reconstruct_vector(u_h, elem, xi, eta) -
                             exact.velocity(xph[0], xph[1], t);
        e_u += w * du.squaredNorm();
        const double dv = reconstruct_scalar(div_u, elem, xi, eta);
        e_divu += w * dv * dv;

        const double dw = reconstruct_scalar(w_h, elem, xi, eta) -
                          exact.vorticity(xph[0], xph[1], t);
        e_w += w * dw * dw;
        Eigen::Vector2d dc = reconstruct_vector(curl_w, elem, xi, eta) -
                             exact.curl_vorticity(xph[0], xph[1], t);
        e_curlw += w * dc.squaredNorm();

        const double dp = (reconstruct_scalar(p_h, elem, xi, eta) - p_h_mean) -
                          (exact.total_pressure(xph[0], xph[1], tp) - p_ex_mean);
        e_p += w * dp * dp;
      }
    }
  }
  ErrorNorms out;
  out.hdiv_u = std::sqrt(e_u + e_divu);
  out.hcurl_omega = std::sqrt(e_w + e_curlw);
  out.l2_p = std::sqrt(e_p);
  return out;
}

ErrorReport tgv_error_study(const TgvStudyConfig& cfg) {
  ErrorReport report;
  for (double c : cfg.deformations) {
    for (int n : cfg.degrees) {
      const TgvErrorRow* prev = nullptr;
      for (size_t ik = 0; ik < cfg.element_counts.size(); ++ik) {
        const int k = cfg.element_counts[ik];
        MeshConfig mc;
        mc.elements_per_side = k;
        mc.deformation = c;
        mc.scale = 2.0;
        mc.periodic = {true, true};
        Mesh mesh(mc);
        FunctionSpace d(mesh, n, SpaceKind::D);
        FunctionSpace cs(mesh, n, SpaceKind::C);
        FunctionSpace ss(mesh, n, SpaceKind::S);
        SolverConfig sc;
        sc.dt = cfg.dt;
        sc.reynolds = cfg.reynolds;
        sc.quad = assembly::default_quad(n);
        MidpointStepper stepper(d, cs, ss, sc);

        TGVExact exact{cfg.reynolds};
        auto u0 = [&](double x, double y) { return exact.velocity(x, y, 0.0); };
        TransientResult tr = stepper.run_transient(u0, 0.0, cfg.t_end);
        if (!tr.completed) throw NewtonFailure("tgv_error_study: " + tr.error, {});

        TgvErrorRow row;
        row.degree = n;
        row.elements = k;
        row.deformation = c;
        row.errors = error_norms(stepper, tr.final_state, exact, cfg.dt);
        if (prev) {
          const double hr = std::log(static_cast<double>(k) / prev->elements);
          row.rate_u = std::log(prev->errors.hdiv_u / row.errors.hdiv_u) / hr;
          row.rate_omega = std::log(prev->errors.hcurl_omega / row.errors.hcurl_omega) / hr;
          row.rate_p = std::log(prev->errors.l2_p / row.errors.l2_p) / hr;
        } else {
          row.rate_u = row.rate_omega = row.rate_p = std::nan("");
        }
        report.rows.push_back(row);
        prev = &report.rows.back();
      }
    }
  }
  return report;
}

FieldSnapshot sample_scalar(const Field& f, double t, int grid) {
  const Mesh& mesh = f.space->mesh();
  FieldSnapshot snap;
  snap.t = t;
  snap.grid = grid;
  snap.x.reserve(static_cast<size_t>(grid) * grid);
  const int k = mesh.side_count();
  std::vector<double> bx(k + 1), by(k + 1);
  for (int i = 0; i <= k; ++i) {
    bx[i] = mesh.cell_x(std::min(i, k - 1))[i == k ? 1 : 0];
    by[i] = mesh.cell_y(std::min(i, k - 1))[i == k ? 1 : 0];
  }
  for (int gj = 0; gj < grid; ++gj) {
    for (int gi = 0; gi < grid; ++gi) {
      const double r = static_cast<double>(gi) / (grid - 1);
      const double s = static_cast<double>(gj) / (grid - 1);
      double xi = 0.0, eta = 0.0;
      const int ex = locate(bx, r, &xi);
      const int ey = locate(by, s, &eta);
      const int elem = mesh.element_id(ex, ey);
      auto p = mesh.map_local(elem, xi, eta);
      snap.x.push_back(p[0]);
      snap.y.push_back(p[1]);
      snap.value.push_back(reconstruct_scalar(f, elem, xi, eta));
    }
  }
  return snap;
}

Eigen::Vector2d shear_layer_velocity(double x, double y) {
  const double delta = M_PI / 15.0;
  const double eps = 0.05;
  const double u = (y <= M_PI) ? std::tanh((y - 0.5 * M_PI) / delta)
                               : std::tanh((1.5 * M_PI - y) / delta);
  return {u, eps * std::sin(x)};
}

ShearLayerResult shear_layer_run(const ShearLayerConfig& cfg) {
  MeshConfig mc;
  mc.elements_per_side = cfg.elements;
  mc.deformation = cfg.deformation;
  mc.scale = 2.0 * M_PI;
  mc.periodic = {true, true};
  Mesh mesh(mc);
  FunctionSpace d(mesh, cfg.degree, SpaceKind::D);
  FunctionSpace c(mesh, cfg.degree, SpaceKind::C);
  FunctionSpace s(mesh, cfg.degree, SpaceKind::S);
  SolverConfig sc;
  sc.dt = cfg.dt;
  sc.reynolds = cfg.reynolds;
  sc.quad = cfg.quad_degree > 0 ? assembly::QuadConfig{cfg.quad_degree}
                                : assembly::default_quad(cfg.degree);
  sc.newton_tol = cfg.newton_tol;
  sc.newton_max_iter = cfg.newton_max_iter;
  MidpointStepper stepper(d, c, s, sc);

  ShearLayerResult out;
  auto hook = [&](const FlowState& st, const DiagnosticsRecord&) {
    for (double target : cfg.snapshot_times) {
      if (std::abs(st.t - target) < 0.5 * cfg.dt) {
        Field w(c, st.omega);
        out.snapshots.push_back(sample_scalar(w, st.t, cfg.snapshot_grid));
        break;
      }
    }
  };
  out.transient = stepper.run_transient([](double x, double y) { return shear_layer_velocity(x, y); },
                                        0.0, cfg.t_end, nullptr, hook);
  return out;
}

Eigen::Vector2d DipoleSetup::velocity(double x, double y) const {
  const double r0sq = core_radius * core_radius;
  const double r1sq = x * x + (y - center_y1) * (y - center_y1);
  const double r2sq = x * x + (y - center_y2) * (y - center_y2);
  const double e1 = std::exp(-r1sq / r0sq), e2 = std::exp(-r2sq / r0sq);
  return {-0.5 * omega_e * (y - center_y1) * e1 + 0.5 * omega_e * (y - center_y2) * e2,
          -0.5 * omega_e * x * e2 + 0.5 * omega_e * x * e1};
}

double DipoleSetup::vorticity(double x, double y) const {
  const double r0sq = core_radius * core_radius;
  const double r1sq = x * x + (y - center_y1) * (y - center_y1);
  const double r2sq = x * x + (y - center_y2) * (y - center_y2);
  return omega_e * (1.0 - r1sq / r0sq) * std::exp(-r1sq / r0sq) -
         omega_e * (1.0 - r2sq / r0sq) * std::exp(-r2sq / r0sq);
}

namespace {

WallTrace wall_trace_left(const Field& omega, double t, int samples) {
  const Mesh& mesh = omega.space->mesh();
  WallTrace tr;
  tr.t = t;
  const int k = mesh.side_count();
  std::vector<double> by(k + 1);
  for (int i = 0; i <= k; ++i) by[i] = mesh.cell_y(std::min(i, k - 1))[i == k ? 1 : 0];
  for (int i = 0; i < samples; ++i) {
    const double y = -0.6 + 0.6 * static_cast<double>(i) / (samples - 1);
    // The wall is metrically straight: y = offset_y + alpha * s on r = 0.
    const double s = (y - mesh.config().offset[1]) / mesh.config().scale;
    double eta = 0.0;
    const int ey = locate(by, s, &eta);
    const int elem = mesh.element_id(0, ey);
    tr.y.push_back(y);
    tr.omega.push_back(reconstruct_scalar(omega, elem, -1.0, eta));
  }
  return tr;
}

}  // namespace

DipoleResult dipole_run(const DipoleConfig& cfg) {
  MeshConfig mc;
  mc.elements_per_side = cfg.elements;
  mc.scale = 2.0;
  mc.offset = {-1.0, -1.0};
  if (cfg.grading_beta > 0.0) {
    mc.spacing_x = tanh_spacing(cfg.elements, cfg.grading_beta);
    mc.spacing_y = mc.spacing_x;
  }
  Mesh mesh(mc);
  FunctionSpace d(mesh, cfg.degree, SpaceKind::D);
  FunctionSpace c(mesh, cfg.degree, SpaceKind::C);
  FunctionSpace s(mesh, cfg.degree, SpaceKind::S);

  SolverConfig sc;
  sc.dt = cfg.dt;
  sc.reynolds = cfg.reynolds;
  sc.quad = cfg.quad_degree > 0 ? assembly::QuadConfig{cfg.quad_degree}
                                : assembly::default_quad(cfg.degree);
  sc.newton_tol = cfg.newton_tol;
  sc.newton_max_iter = cfg.newton_max_iter;
  sc.bc.normal = WallSet::all();
  sc.bc.tangential = WallSet::all();
  sc.bc.normal_velocity = [](double, double, double) { return 0.0; };
  sc.bc.tangential_velocity = [](double, double, double) { return 0.0; };
  MidpointStepper stepper(d, c, s, sc);

  DipoleSetup setup;
  setup.reynolds = cfg.reynolds;
  auto raw = [&](double x, double y) { return setup.velocity(x, y); };
  Field u_raw = assembly::project(d, VectorFn(raw), assembly::projection_quad(cfg.degree));
  const double k_raw = diagnostics::kinetic_energy(stepper.mass_d(), u_raw.coeffs);
  const double f = std::sqrt(2.0 / k_raw);

  DipoleResult out;
  out.scaling = f;
  auto u0 = [&](double x, double y) { return Eigen::Vector2d(f * setup.velocity(x, y)); };

  auto hook = [&](const FlowState& st, const DiagnosticsRecord&) {
    for (double target : cfg.snapshot_times) {
      if (std::abs(st.t - target) < 0.5 * cfg.dt) {
        Field w(c, st.omega);
        out.snapshots.push_back(sample_scalar(w, st.t, cfg.snapshot_grid));
        break;
      }
    }
    for (double target : cfg.wall_trace_times) {
      if (std::abs(st.t - target) < 0.5 * cfg.dt) {
        Field w(c, st.omega);
        out.wall_traces.push_back(wall_trace_left(w, st.t, cfg.wall_trace_samples));
        break;
      }
    }
  };
  out.transient = stepper.run_transient(u0, 0.0, cfg.t_end, nullptr, hook);
  return out;
}

DipoleScalingReport dipole_scaling_report(int elements, int degree) {
  MeshConfig mc;
  mc.elements_per_side = elements;
  mc.scale = 2.0;
  mc.offset = {-1.0, -1.0};
  Mesh mesh(mc);
  FunctionSpace d(mesh, degree, SpaceKind::D);
  FunctionSpace c(mesh, degree, SpaceKind::C);
  auto quad = assembly::default_quad(degree);
  SparseMat mass_d = assembly::mass_matrix(d, quad);
  SparseMat mass_c = assembly::mass_matrix(c, quad);
  SparseMat curl = incidence_curl(c, d);

  DipoleSetup setup;
  Field u_raw = assembly::project(d, VectorFn([&](double x, double y) { return setup.velocity(x, y); }),
                                  assembly::projection_quad(degree));
  Field w_raw = assembly::project(c, ScalarFn([&](double x, double y) { return setup.vorticity(x, y); }),
                                  assembly::projection_quad(degree));
  DipoleScalingReport rep;
  const double k_raw = diagnostics::kinetic_energy(mass_d, u_raw.coeffs);
  rep.scaling = std::sqrt(2.0 / k_raw);
  Eigen::VectorXd u_scaled = rep.scaling * u_raw.coeffs;
  Eigen::VectorXd w_scaled = rep.scaling * w_raw.coeffs;
  rep.kinetic_energy = diagnostics::kinetic_energy(mass_d, u_scaled);
  rep.enstrophy = diagnostics::enstrophy(mass_c, w_scaled);
  rep.palinstrophy = diagnostics::palinstrophy(mass_d, curl, w_scaled);
  rep.total_vorticity = diagnostics::total_vorticity(mass_c, w_scaled);
  return rep;
}

double rng_uniform01(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::vector<TrilinearEntry> trilinear_table(const TrilinearTableConfig& cfg) {
  std::uint64_t rng = cfg.seed;
  const double e = rng_uniform01(rng);
  const double f = rng_uniform01(rng);
  const double g = rng_uniform01(rng);
  const double h = rng_uniform01(rng);
  auto omega_fn = [&](double x, double y) {
    return 2.0 * M_PI * std::sin(2.0 * M_PI * x + e) * std::sin(2.0 * M_PI * y + f);
  };
  auto psi_fn = [&](double x, double y) {
    return 2.0 * M_PI * std::sin(2.0 * M_PI * x + g) * std::sin(2.0 * M_PI * y + h);
  };

  std::vector<TrilinearEntry> out;
  for (double c : cfg.deformations) {
    MeshConfig mc;
    mc.elements_per_side = cfg.elements;
    mc.deformation = c;
    mc.periodic = {true, true};
    Mesh mesh(mc);
    for (int n : cfg.degrees) {
      FunctionSpace cs(mesh, n, SpaceKind::C);
      FunctionSpace ds(mesh, n, SpaceKind::D);
      SparseMat curl = incidence_curl(cs, ds);
      Field w = assembly::project(cs, ScalarFn(omega_fn), assembly::projection_quad(n));
      Field psi = assembly::project(cs, ScalarFn(psi_fn), assembly::projection_quad(n));
      Field u(ds, curl * psi.coeffs);  // divergence-free by the complex
      for (int nq : cfg.quad_degrees) {
        TrilinearEntry entry;
        entry.deformation = c;
        entry.degree = n;
        entry.quad_degree = nq;
        entry.value = assembly::curl_trilinear_probe(w, u, curl, assembly::QuadConfig{nq});
        out.push_back(entry);
      }
    }
  }
  return out;
}

}  // namespace meevc::bench
