#include <doctest.h>

#include <cmath>
#include <random>

#include "meevc/assembly.hpp"
#include "meevc/bench.hpp"
#include "meevc/diagnostics.hpp"

using namespace meevc;

namespace {

struct Setup {
  Mesh mesh;
  FunctionSpace c, d, s;
  SparseMat mass_c, mass_d, mass_s, curl, div;

  Setup(int k, int n, double scale)
      : mesh([&] {
          MeshConfig mc;
          mc.elements_per_side = k;
          mc.scale = scale;
          mc.periodic = {true, true};
          return Mesh(mc);
        }()),
        c(mesh, n, SpaceKind::C),
        d(mesh, n, SpaceKind::D),
        s(mesh, n, SpaceKind::S),
        mass_c(assembly::mass_matrix(c, assembly::default_quad(n))),
        mass_d(assembly::mass_matrix(d, assembly::default_quad(n))),
        mass_s(assembly::mass_matrix(s, assembly::default_quad(n))),
        curl(incidence_curl(c, d)),
        div(incidence_div(d, s)) {}
};

Eigen::VectorXd random_vec(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = unif(rng);
  return v;
}

}  // namespace

TEST_CASE("TGV integral quantities at t=0 on [0,2]^2") {
  Setup su(12, 4, 2.0);
  bench::TGVExact exact{100.0};
  auto pq = assembly::projection_quad(4);
  Field u = assembly::project(su.d, VectorFn([&](double x, double y) {
                                return exact.velocity(x, y, 0.0);
                              }),
                              pq);
  Field w = assembly::project(su.c, ScalarFn([&](double x, double y) {
                                return exact.vorticity(x, y, 0.0);
                              }),
                              pq);
  CHECK(diagnostics::kinetic_energy(su.mass_d, u.coeffs) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(diagnostics::enstrophy(su.mass_c, w.coeffs) ==
        doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-5));
  CHECK(diagnostics::palinstrophy(su.mass_d, su.curl, w.coeffs) ==
        doctest::Approx(4.0 * std::pow(M_PI, 4)).epsilon(1e-3));
  // Sines integrate to zero over the torus.
  CHECK(std::abs(diagnostics::total_vorticity(su.mass_c, w.coeffs)) <= 1e-12);
  CHECK(diagnostics::div_l2(su.mass_s, su.div, u.coeffs) <= 1e-11);
}

TEST_CASE("zero fields, quadratic scaling, constant vorticity") {
  Setup su(3, 2, 1.0);
  Eigen::VectorXd zu = Eigen::VectorXd::Zero(su.d.dim());
  Eigen::VectorXd zw = Eigen::VectorXd::Zero(su.c.dim());
  CHECK(diagnostics::kinetic_energy(su.mass_d, zu) == 0.0);
  CHECK(diagnostics::enstrophy(su.mass_c, zw) == 0.0);
  CHECK(diagnostics::div_l2(su.mass_s, su.div, zu) == 0.0);

  Eigen::VectorXd u = random_vec(su.d.dim(), 3);
  CHECK(diagnostics::kinetic_energy(su.mass_d, (2.0 * u).eval()) ==
        doctest::Approx(4.0 * diagnostics::kinetic_energy(su.mass_d, u)).epsilon(1e-14));
  Eigen::VectorXd w = random_vec(su.c.dim(), 4);
  CHECK(diagnostics::enstrophy(su.mass_c, (2.0 * w).eval()) ==
        doctest::Approx(4.0 * diagnostics::enstrophy(su.mass_c, w)).epsilon(1e-14));

  // Constant vorticity 1 on the unit torus: W = area = 1, palinstrophy 0.
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(su.c.dim());
  CHECK(diagnostics::total_vorticity(su.mass_c, ones) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(diagnostics::palinstrophy(su.mass_d, su.curl, ones) == 0.0);
}

TEST_CASE("quadratic quantities are non-negative on random coefficients") {
  Setup su(2, 3, 1.0);
  for (unsigned s = 0; s < 20; ++s) {
    CHECK(diagnostics::kinetic_energy(su.mass_d, random_vec(su.d.dim(), s)) >= 0.0);
    CHECK(diagnostics::enstrophy(su.mass_c, random_vec(su.c.dim(), 100 + s)) >= 0.0);
    CHECK(diagnostics::palinstrophy(su.mass_d, su.curl, random_vec(su.c.dim(), 200 + s)) >= 0.0);
  }
}

TEST_CASE("div_l2 against a dense oracle on a single element") {
  Setup su(1, 2, 1.0);
  Eigen::VectorXd u = random_vec(su.d.dim(), 77);
  Eigen::MatrixXd div_dense(su.div);
  Eigen::MatrixXd ms_dense(su.mass_s);
  Eigen::VectorXd d = div_dense * u;
  const double oracle = std::sqrt(d.dot(ms_dense * d));
  CHECK(diagnostics::div_l2(su.mass_s, su.div, u) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("balance residuals: identical states, inviscid reduction, midpoint field") {
  Setup su(3, 2, 1.0);
  Eigen::VectorXd u = random_vec(su.d.dim(), 5);
  Eigen::VectorXd w = random_vec(su.c.dim(), 6);
  auto same = diagnostics::balance_residuals(u, w, u, w, 0.1, 0.0, su.mass_d, su.mass_c, su.curl);
  CHECK(same.energy == 0.0);
  CHECK(same.enstrophy == 0.0);
  CHECK(same.vorticity == 0.0);

  Eigen::VectorXd u2 = random_vec(su.d.dim(), 7);
  Eigen::VectorXd w2 = random_vec(su.c.dim(), 8);
  const double dt = 0.02;
  auto inviscid =
      diagnostics::balance_residuals(u, w, u2, w2, dt, 0.0, su.mass_d, su.mass_c, su.curl);
  const double dk = (diagnostics::kinetic_energy(su.mass_d, u2) -
                     diagnostics::kinetic_energy(su.mass_d, u)) /
                    dt;
  const double de =
      (diagnostics::enstrophy(su.mass_c, w2) - diagnostics::enstrophy(su.mass_c, w)) / dt;
  CHECK(inviscid.energy == doctest::Approx(dk).epsilon(1e-13));
  CHECK(inviscid.enstrophy == doctest::Approx(de).epsilon(1e-13));

  // The half-level enstrophy is the quadratic form of the midpoint field,
  // not the average of the endpoint enstrophies; the cross term separates
  // the two on random fields.
  const double inv_re = 1.0 / 500.0;
  auto viscous =
      diagnostics::balance_residuals(u, w, u2, w2, dt, inv_re, su.mass_d, su.mass_c, su.curl);
  Eigen::VectorXd wmid = 0.5 * (w + w2);
  const double e_mid = diagnostics::enstrophy(su.mass_c, wmid);
  const double e_avg = 0.5 * (diagnostics::enstrophy(su.mass_c, w) +
                              diagnostics::enstrophy(su.mass_c, w2));
  CHECK(viscous.energy == doctest::Approx(dk + 2.0 * inv_re * e_mid).epsilon(1e-12));
  CHECK(std::abs(e_mid - e_avg) > 1e-6);  // the distinction is real
}
