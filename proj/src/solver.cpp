#include "meevc/solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>

namespace meevc {

namespace {

void append_sparse(std::vector<Eigen::Triplet<double>>& trips, const SparseMat& m, int row0,
                   int col0, double scale = 1.0) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMat::InnerIterator it(m, k); it; ++it)
      trips.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()),
                         scale * it.value());
}

}  // namespace

Eigen::VectorXd linear_solve(const SparseMat& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw std::invalid_argument("linear_solve: dimension mismatch");
  Eigen::SparseLU<SparseMat> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw SingularSystem("linear_solve: singular matrix");
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success) throw SingularSystem("linear_solve: backsolve failed");
  const double bn = b.cwiseAbs().maxCoeff();
  if (bn > 0.0) {
    const double rn = (a * x - b).cwiseAbs().maxCoeff() / bn;
    if (!(rn <= 1e-11))
      throw SingularSystem("linear_solve: residual " + std::to_string(rn) + " exceeds 1e-11");
  }
  return x;
}

MidpointStepper::MidpointStepper(const FunctionSpace& d_space, const FunctionSpace& c_space,
                                 const FunctionSpace& s_space, SolverConfig cfg)
    : d_(&d_space), c_(&c_space), s_(&s_space), cfg_(std::move(cfg)) {
  if (!(cfg_.dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
  if (!(cfg_.reynolds > 0.0)) throw std::invalid_argument("solver: Re must be positive");
  if (!(cfg_.newton_tol > 0.0)) throw std::invalid_argument("solver: newton_tol must be positive");
  validate_bc();

  nd_ = d_->dim();
  nc_ = c_->dim();
  ns_ = s_->dim();
  gauge_active_ = cfg_.bc.pressure.empty();
  ntot_ = nd_ + nc_ + ns_ + (gauge_active_ ? 1 : 0);

  mass_d_ = assembly::mass_matrix(*d_, cfg_.quad);
  mass_c_ = assembly::mass_matrix(*c_, cfg_.quad);
  mass_s_ = assembly::mass_matrix(*s_, cfg_.quad);
  curl_ = incidence_curl(*c_, *d_);
  div_ = incidence_div(*d_, *s_);
  visc_ = mass_d_ * curl_;
  grad_ = SparseMat(div_.transpose()) * mass_s_;
  kin_ = SparseMat(curl_.transpose()) * mass_d_;

  if (!cfg_.bc.normal.empty()) essential_u_ = d_->boundary_dofs(cfg_.bc.normal);
  if (!cfg_.bc.vorticity.empty()) essential_omega_ = c_->boundary_dofs(cfg_.bc.vorticity);
  essential_mask_.assign(ntot_, 0);
  for (int i : essential_u_) essential_mask_[i] = 1;
  for (int i : essential_omega_) essential_mask_[nd_ + i] = 1;

  // Constant Jacobian blocks; the convection blocks join per iteration.
  const int iu = 0, iw = nd_, ip = nd_ + nc_;
  const double inv_re = cfg_.inv_reynolds();
  append_sparse(const_triplets_, mass_d_, iu, iu, 1.0 / cfg_.dt);
  if (inv_re > 0.0) append_sparse(const_triplets_, visc_, iu, iw, 0.5 * inv_re);
  append_sparse(const_triplets_, grad_, iu, ip, -1.0);
  append_sparse(const_triplets_, kin_, iw, iu, 1.0);
  append_sparse(const_triplets_, mass_c_, iw, iw, -1.0);
  append_sparse(const_triplets_, div_, ip, iu, 1.0);
  if (gauge_active_) {
    const int il = ntot_ - 1;
    for (int i = 0; i < ns_; ++i) const_triplets_.emplace_back(ip + i, il, 1.0);
    if (cfg_.gauge == PressureGauge::MeanZero) {
      // Integral-type S dofs: the domain integral of P is the plain
      // coefficient sum.
      for (int i = 0; i < ns_; ++i) const_triplets_.emplace_back(il, ip + i, 1.0);
    } else {
      const_triplets_.emplace_back(il, ip + 0, 1.0);
    }
  }
}

void MidpointStepper::validate_bc() const {
  const Mesh& mesh = d_->mesh();
  const BCConfig& bc = cfg_.bc;
  if (bc.normal.intersects(bc.pressure) || bc.vorticity.intersects(bc.tangential))
    throw std::invalid_argument("bc: sections within a pair must be disjoint");
  for (int w = 0; w < 4; ++w) {
    const bool xdir = (w <= 1);
    const bool periodic = xdir ? mesh.periodic_x() : mesh.periodic_y();
    const bool in_first = bc.normal.walls[w] || bc.pressure.walls[w];
    const bool in_second = bc.vorticity.walls[w] || bc.tangential.walls[w];
    if (periodic && (in_first || in_second))
      throw std::invalid_argument("bc: section assigned to a periodic wall");
    if (!periodic && (!in_first || !in_second))
      throw std::invalid_argument("bc: each pair must cover every non-periodic wall");
  }
}

Eigen::VectorXd MidpointStepper::essential_values(double t) const {
  Eigen::VectorXd vals = Eigen::VectorXd::Zero(ntot_);
  const BCConfig& bc = cfg_.bc;
  if (!essential_u_.empty() && bc.normal_velocity) {
    auto data = assembly::essential_flux_values(
        *d_, bc.normal, [&](double x, double y) { return bc.normal_velocity(x, y, t); },
        cfg_.quad);
    for (auto [dof, v] : data) vals[dof] = v;
  }
  if (!essential_omega_.empty() && bc.vorticity_value) {
    auto data = assembly::essential_node_values(
        *c_, bc.vorticity, [&](double x, double y) { return bc.vorticity_value(x, y, t); });
    for (auto [dof, v] : data) vals[nd_ + dof] = v;
  }
  return vals;
}

Eigen::VectorXd MidpointStepper::residual(const FlowState& prev, const FlowState& guess,
                                          const TimeVectorFn& force) const {
  const double dt = cfg_.dt;
  const double t_new = prev.t + dt;
  const double t_mid = prev.t + 0.5 * dt;
  const double inv_re = cfg_.inv_reynolds();
  const int iu = 0, iw = nd_, ip = nd_ + nc_;

  Eigen::VectorXd u_mid = 0.5 * (prev.u + guess.u);
  Eigen::VectorXd w_mid = 0.5 * (prev.omega + guess.omega);

  Field w_mid_field(*c_, w_mid);
  SparseMat a_mid = assembly::convection_matrix(w_mid_field, *d_, cfg_.quad);

  Eigen::VectorXd r = Eigen::VectorXd::Zero(ntot_);
  r.segment(iu, nd_) = mass_d_ * ((guess.u - prev.u) / dt) + a_mid * u_mid +
                       inv_re * (visc_ * w_mid) - grad_ * guess.p;
  if (force) {
    auto f_mid = [&](double x, double y) { return force(x, y, t_mid); };
    r.segment(iu, nd_) -= assembly::force_load(f_mid, *d_, cfg_.quad);
  }
  if (!cfg_.bc.pressure.empty() && cfg_.bc.total_pressure) {
    auto phat = [&](double x, double y) { return cfg_.bc.total_pressure(x, y, t_mid); };
    r.segment(iu, nd_) += assembly::natural_bc_pressure(phat, cfg_.bc.pressure, *d_, cfg_.quad);
  }

  r.segment(iw, nc_) = kin_ * guess.u - mass_c_ * guess.omega;
  if (!cfg_.bc.tangential.empty() && cfg_.bc.tangential_velocity) {
    auto upar = [&](double x, double y) { return cfg_.bc.tangential_velocity(x, y, t_new); };
    r.segment(iw, nc_) -= assembly::natural_bc_tangential(upar, cfg_.bc.tangential, *c_, cfg_.quad);
  }

  r.segment(ip, ns_) = div_ * guess.u;
  if (gauge_active_) {
    // The gauge multiplier rides along in the Newton unknown vector and is
    // not part of FlowState; residual() is the lambda = 0 system.
    r[ntot_ - 1] = cfg_.gauge == PressureGauge::MeanZero ? guess.p.sum() : guess.p[0];
  }

  Eigen::VectorXd ess = essential_values(t_new);
  for (int i : essential_u_) r[i] = guess.u[i] - ess[i];
  for (int i : essential_omega_) r[nd_ + i] = guess.omega[i] - ess[nd_ + i];
  return r;
}

std::pair<FlowState, NewtonReport> MidpointStepper::step(const FlowState& prev,
                                                         const TimeVectorFn& force) const {
  const double dt = cfg_.dt;
  const double t_new = prev.t + dt;
  const int iu = 0, iw = nd_, ip = nd_ + nc_;

  Eigen::VectorXd x(ntot_);
  x.segment(iu, nd_) = prev.u;
  x.segment(iw, nc_) = prev.omega;
  x.segment(ip, ns_) = prev.p;
  if (gauge_active_) x[ntot_ - 1] = 0.0;

  NewtonReport report;
  FlowState guess{prev.k + 1, t_new, prev.u, prev.omega, prev.p};

  Eigen::SparseLU<SparseMat> lu;
  for (int it = 0; it <= cfg_.newton_max_iter; ++it) {
    guess.u = x.segment(iu, nd_);
    guess.omega = x.segment(iw, nc_);
    guess.p = x.segment(ip, ns_);
    Eigen::VectorXd r = residual(prev, guess, force);
    // Divergence rows carry the gauge multiplier column.
    if (gauge_active_) r.segment(ip, ns_).array() += x[ntot_ - 1];

    const double rn = r.cwiseAbs().maxCoeff();
    report.residual_norms.push_back(rn);
    report.iterations = it;
    if (rn <= cfg_.newton_tol) {
      report.converged = true;
      return {guess, report};
    }
    if (it == cfg_.newton_max_iter) break;

    // Jacobian: constant blocks plus the midpoint convection linearization.
    Eigen::VectorXd u_mid = 0.5 * (prev.u + guess.u);
    Eigen::VectorXd w_mid = 0.5 * (prev.omega + guess.omega);
    Field w_mid_field(*c_, w_mid);
    Field u_mid_field(*d_, u_mid);
    SparseMat a_mid = assembly::convection_matrix(w_mid_field, *d_, cfg_.quad);
    SparseMat b_mid = assembly::convection_jacobian_wrt_omega(u_mid_field, *c_, *d_, cfg_.quad);

    std::vector<Eigen::Triplet<double>> trips = const_triplets_;
    append_sparse(trips, a_mid, iu, iu, 0.5);
    append_sparse(trips, b_mid, iu, iw, 0.5);

    // Essential rows become identity; essential columns are eliminated
    // into the right-hand side (their Newton update is known from the
    // constraint rows).
    Eigen::VectorXd rhs = -r;
    std::vector<Eigen::Triplet<double>> reduced;
    reduced.reserve(trips.size() + essential_u_.size() + essential_omega_.size());
    for (const auto& tr : trips) {
      if (essential_mask_[tr.row()]) continue;
      if (essential_mask_[tr.col()]) {
        rhs[tr.row()] -= tr.value() * (-r[tr.col()]);
        continue;
      }
      reduced.push_back(tr);
    }
    for (int i = 0; i < ntot_; ++i)
      if (essential_mask_[i]) reduced.emplace_back(i, i, 1.0);

    SparseMat jac(ntot_, ntot_);
    jac.setFromTriplets(reduced.begin(), reduced.end());
    jac.makeCompressed();

    lu.compute(jac);
    if (lu.info() != Eigen::Success)
      throw SingularSystem("newton_solve: singular Jacobian (check gauge/boundary setup)");
    Eigen::VectorXd delta = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw SingularSystem("newton_solve: backsolve failed");
    x += delta;
  }
  throw NewtonFailure("newton_solve: no convergence after " +
                          std::to_string(cfg_.newton_max_iter) + " iterations (last residual " +
                          std::to_string(report.residual_norms.back()) + ")",
                      report);
}

FlowState MidpointStepper::initial_state(const VectorFn& u0, double t0,
                                         const std::optional<ScalarFn>& omega0) const {
  FlowState st;
  st.k = 0;
  st.t = t0;
  st.u = assembly::project(*d_, u0, assembly::projection_quad(d_->degree())).coeffs;
  st.p = Eigen::VectorXd::Zero(ns_);

  if (omega0) {
    st.omega = assembly::project(*c_, *omega0, assembly::projection_quad(c_->degree())).coeffs;
    return st;
  }

  // Discrete kinematic relation at k = 0: <u0, curl xi> - <w0, xi> = port.
  Eigen::VectorXd rhs = kin_ * st.u;
  if (!cfg_.bc.tangential.empty() && cfg_.bc.tangential_velocity) {
    auto upar = [&](double x, double y) { return cfg_.bc.tangential_velocity(x, y, t0); };
    rhs -= assembly::natural_bc_tangential(upar, cfg_.bc.tangential, *c_, cfg_.quad);
  }
  std::vector<Eigen::Triplet<double>> trips;
  append_sparse(trips, mass_c_, 0, 0);
  Eigen::VectorXd ess = essential_values(t0);
  std::vector<char> mask(nc_, 0);
  for (int i : essential_omega_) mask[i] = 1;
  std::vector<Eigen::Triplet<double>> reduced;
  for (const auto& tr : trips) {
    if (mask[tr.row()]) continue;
    if (mask[tr.col()]) {
      rhs[tr.row()] -= tr.value() * ess[nd_ + tr.col()];
      continue;
    }
    reduced.push_back(tr);
  }
  for (int i : essential_omega_) {
    reduced.emplace_back(i, i, 1.0);
    rhs[i] = ess[nd_ + i];
  }
  SparseMat m(nc_, nc_);
  m.setFromTriplets(reduced.begin(), reduced.end());
  m.makeCompressed();
  st.omega = linear_solve(m, rhs);
  return st;
}

DiagnosticsRecord MidpointStepper::diagnose(const FlowState& state) const {
  DiagnosticsRecord rec;
  rec.k = state.k;
  rec.t = state.t;
  rec.kinetic_energy = diagnostics::kinetic_energy(mass_d_, state.u);
  rec.enstrophy = diagnostics::enstrophy(mass_c_, state.omega);
  rec.palinstrophy = diagnostics::palinstrophy(mass_d_, curl_, state.omega);
  rec.total_vorticity = diagnostics::total_vorticity(mass_c_, state.omega);
  rec.div_l2 = diagnostics::div_l2(mass_s_, div_, state.u);
  return rec;
}

DiagnosticsRecord MidpointStepper::diagnose(const FlowState& prev, const FlowState& curr) const {
  DiagnosticsRecord rec = diagnose(curr);
  auto bal = diagnostics::balance_residuals(prev.u, prev.omega, curr.u, curr.omega, cfg_.dt,
                                            cfg_.inv_reynolds(), mass_d_, mass_c_, curl_);
  rec.energy_residual = bal.energy;
  rec.enstrophy_residual = bal.enstrophy;
  rec.vorticity_residual = bal.vorticity;
  return rec;
}

TransientResult MidpointStepper::run_transient(const VectorFn& u0, double t0, double t_end,
                                               const TimeVectorFn& force,
                                               const StepHook& hook) const {
  return run_transient(initial_state(u0, t0), t_end, force, hook);
}

TransientResult MidpointStepper::run_transient(const FlowState& initial, double t_end,
                                               const TimeVectorFn& force,
                                               const StepHook& hook) const {
  if (!(t_end > initial.t)) throw std::invalid_argument("run_transient: t_end must exceed t0");
  TransientResult res;
  FlowState state = initial;
  DiagnosticsRecord rec = diagnose(state);
  res.records.push_back(rec);
  if (hook) hook(state, rec);

  const int nsteps = static_cast<int>(std::llround((t_end - initial.t) / cfg_.dt));
  for (int k = 0; k < nsteps; ++k) {
    try {
      auto [next, report] = step(state, force);
      res.newton_iterations.push_back(report.iterations);
      rec = diagnose(state, next);
      state = std::move(next);
    } catch (const NewtonFailure& nf) {
      res.final_state = state;
      res.completed = false;
      res.error = nf.what();
      return res;
    } catch (const SingularSystem& ss) {
      res.final_state = state;
      res.completed = false;
      res.error = ss.what();
      return res;
    }
    res.records.push_back(rec);
    if (hook) hook(state, rec);
  }
  res.final_state = std::move(state);
  res.completed = true;
  return res;
}

}  // namespace meevc
