#pragma once

#include <Eigen/Dense>

#include "meevc/derham.hpp"

namespace meevc {

/// Integral quantities and per-step balance residuals of one time level.
/// Balance residuals are defined from k >= 1 and zero at the initial level.
struct DiagnosticsRecord {
  int k = 0;
  double t = 0.0;
  double kinetic_energy = 0.0;
  double enstrophy = 0.0;
  double palinstrophy = 0.0;
  double total_vorticity = 0.0;
  double div_l2 = 0.0;
  double energy_residual = 0.0;
  double enstrophy_residual = 0.0;
  double vorticity_residual = 0.0;
};

namespace diagnostics {

/// K = 1/2 <u,u>.
double kinetic_energy(const SparseMat& mass_d, const Eigen::VectorXd& u);
/// E = 1/2 <w,w>.
double enstrophy(const SparseMat& mass_c, const Eigen::VectorXd& omega);
/// P = 1/2 <curl w, curl w> with the exact incidence curl.
double palinstrophy(const SparseMat& mass_d, const SparseMat& curl, const Eigen::VectorXd& omega);
/// W = <w, 1> against the all-ones interpolant.
double total_vorticity(const SparseMat& mass_c, const Eigen::VectorXd& omega);
/// ||div u||_{L^2} through the incidence divergence and the S mass.
double div_l2(const SparseMat& mass_s, const SparseMat& div, const Eigen::VectorXd& u);

struct BalanceResiduals {
  double energy = 0.0;
  double enstrophy = 0.0;
  double vorticity = 0.0;
};

/// Fully discrete balances of the midpoint step. The half-level enstrophy
/// and palinstrophy are quadratic forms of the midpoint FIELDS, not
/// averages of the endpoint scalars. inv_re = 0 is the inviscid limit.
BalanceResiduals balance_residuals(const Eigen::VectorXd& u_prev, const Eigen::VectorXd& w_prev,
                                   const Eigen::VectorXd& u_curr, const Eigen::VectorXd& w_curr,
                                   double dt, double inv_re, const SparseMat& mass_d,
                                   const SparseMat& mass_c, const SparseMat& curl);

}  // namespace diagnostics

}  // namespace meevc
