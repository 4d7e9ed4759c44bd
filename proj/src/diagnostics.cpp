#include "meevc/diagnostics.hpp"

#include <cmath>

namespace meevc::diagnostics {

double kinetic_energy(const SparseMat& mass_d, const Eigen::VectorXd& u) {
  return 0.5 * u.dot(mass_d * u);
}

double enstrophy(const SparseMat& mass_c, const Eigen::VectorXd& omega) {
  return 0.5 * omega.dot(mass_c * omega);
}

double palinstrophy(const SparseMat& mass_d, const SparseMat& curl, const Eigen::VectorXd& omega) {
  Eigen::VectorXd cw = curl * omega;
  return 0.5 * cw.dot(mass_d * cw);
}

double total_vorticity(const SparseMat& mass_c, const Eigen::VectorXd& omega) {
  return (mass_c * omega).sum();
}

double div_l2(const SparseMat& mass_s, const SparseMat& div, const Eigen::VectorXd& u) {
  Eigen::VectorXd d = div * u;
  return std::sqrt(std::max(0.0, d.dot(mass_s * d)));
}

BalanceResiduals balance_residuals(const Eigen::VectorXd& u_prev, const Eigen::VectorXd& w_prev,
                                   const Eigen::VectorXd& u_curr, const Eigen::VectorXd& w_curr,
                                   double dt, double inv_re, const SparseMat& mass_d,
                                   const SparseMat& mass_c, const SparseMat& curl) {
  BalanceResiduals r;
  Eigen::VectorXd w_mid = 0.5 * (w_prev + w_curr);
  const double k_prev = kinetic_energy(mass_d, u_prev);
  const double k_curr = kinetic_energy(mass_d, u_curr);
  const double e_prev = enstrophy(mass_c, w_prev);
  const double e_curr = enstrophy(mass_c, w_curr);
  const double e_mid = enstrophy(mass_c, w_mid);
  const double p_mid = palinstrophy(mass_d, curl, w_mid);
  r.energy = (k_curr - k_prev) / dt + 2.0 * inv_re * e_mid;
  r.enstrophy = (e_curr - e_prev) / dt + 2.0 * inv_re * p_mid;
  r.vorticity = total_vorticity(mass_c, w_curr) - total_vorticity(mass_c, w_prev);
  return r;
}

}  // namespace meevc::diagnostics
