#pragma once

#include <algorithm>
#include <functional>
#include <utility>
#include <vector>

#include "meevc/derham.hpp"

namespace meevc {

using ScalarFn = std::function<double(double, double)>;
using VectorFn = std::function<Eigen::Vector2d(double, double)>;

namespace assembly {

/// Gauss quadrature degree per direction used for all metric-dependent
/// integrals. Incidence operators never see it.
struct QuadConfig {
  int gauss_degree = 1;
};

inline QuadConfig default_quad(int degree) { return {degree + 3}; }
/// Generous rule for one-off projection functionals. The floor keeps the
/// sub-edge flux integrals of steep initial data (shear layers on coarse
/// curvilinear meshes) closed to machine precision, which the per-step
/// balance identities inherit through u^0.
inline QuadConfig projection_quad(int degree) { return {std::max(24, degree + 10)}; }

/// L^2 mass matrix of a space, SPD, metric from the mesh Jacobians.
SparseMat mass_matrix(const FunctionSpace& space, QuadConfig quad);

/// A(w)[i,j] = a(w_h, d_j, d_i) = integral of (w_h x d_j) . d_i.
/// Skew-symmetric for any quadrature degree.
SparseMat convection_matrix(const Field& omega, const FunctionSpace& d_space, QuadConfig quad);

/// B(u)[i,k] = a(c_k, u_h, d_i); satisfies A(w) u = B(u) w.
SparseMat convection_jacobian_wrt_omega(const Field& u, const FunctionSpace& c_space,
                                        const FunctionSpace& d_space, QuadConfig quad);

/// a(w_h, u_h, curl w_h) with the exact incidence image of w_h in D.
double curl_trilinear_probe(const Field& omega, const Field& u, const SparseMat& curl,
                            QuadConfig quad);

/// Momentum-equation boundary port: g[i] = integral over the section of
/// Phat (d_i . n).
Eigen::VectorXd natural_bc_pressure(const ScalarFn& phat, const WallSet& section,
                                    const FunctionSpace& d_space, QuadConfig quad);

/// Kinematic-equation boundary port: g[i] = integral over the section of
/// u_par (trace of c_i), arc-length weighted. No-slip enters here.
Eigen::VectorXd natural_bc_tangential(const ScalarFn& upar, const WallSet& section,
                                      const FunctionSpace& c_space, QuadConfig quad);

/// L^2 load of an external force against the D basis.
Eigen::VectorXd force_load(const VectorFn& f, const FunctionSpace& d_space, QuadConfig quad);

/// Canonical projections: C interpolates at mapped GLL nodes, D takes
/// normal-flux integrals over mapped sub-edges, S takes cell integrals.
Field project(const FunctionSpace& space, const ScalarFn& f, QuadConfig quad);
Field project(const FunctionSpace& space, const VectorFn& f, QuadConfig quad);

/// Prescribed essential data as (dof, value) pairs: normal-flux integrals
/// of u.n data on D walls, nodal traces of vorticity data on C walls.
std::vector<std::pair<int, double>> essential_flux_values(const FunctionSpace& d_space,
                                                          const WallSet& walls,
                                                          const ScalarFn& u_normal,
                                                          QuadConfig quad);
std::vector<std::pair<int, double>> essential_node_values(const FunctionSpace& c_space,
                                                          const WallSet& walls,
                                                          const ScalarFn& omega_hat);

/// Straight-line serial reference assemblies, kept for validating the
/// OpenMP kernels. Identical contracts, independent code path.
namespace ref {
SparseMat mass_matrix(const FunctionSpace& space, QuadConfig quad);
SparseMat convection_matrix(const Field& omega, const FunctionSpace& d_space, QuadConfig quad);
}  // namespace ref

}  // namespace assembly

}  // namespace meevc
