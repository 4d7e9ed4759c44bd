#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "meevc/assembly.hpp"
#include "meevc/derham.hpp"

using namespace meevc;

namespace {

Mesh make_mesh(int k, double c, bool periodic, double scale = 1.0) {
  MeshConfig mc;
  mc.elements_per_side = k;
  mc.deformation = c;
  mc.scale = scale;
  mc.periodic = {periodic, periodic};
  return Mesh(mc);
}

Eigen::VectorXd random_vec(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = unif(rng);
  return v;
}

}  // namespace

TEST_CASE("space dimensions match the closed forms") {
  for (int k : {1, 2, 3}) {
    for (int n : {1, 2, 3}) {
      for (bool periodic : {false, true}) {
        if (periodic && k * n < 2) continue;  // a 1-dof periodic grid is degenerate
        Mesh mesh = make_mesh(k, 0.0, periodic);
        FunctionSpace c(mesh, n, SpaceKind::C);
        FunctionSpace d(mesh, n, SpaceKind::D);
        FunctionSpace s(mesh, n, SpaceKind::S);
        const int kn = k * n;
        CHECK(c.dim() == (periodic ? kn * kn : (kn + 1) * (kn + 1)));
        CHECK(d.dim() == (periodic ? 2 * kn * kn : 2 * kn * (kn + 1)));
        CHECK(s.dim() == kn * kn);
      }
    }
  }
  // Single bilinear cell: 4 nodes, 4 edges, 1 cell.
  Mesh single = make_mesh(1, 0.0, false);
  CHECK(FunctionSpace(single, 1, SpaceKind::C).dim() == 4);
  CHECK(FunctionSpace(single, 1, SpaceKind::D).dim() == 4);
  CHECK(FunctionSpace(single, 1, SpaceKind::S).dim() == 1);
  // Fully periodic 2x2 at N=1.
  Mesh torus = make_mesh(2, 0.0, true);
  CHECK(FunctionSpace(torus, 1, SpaceKind::C).dim() == 4);
  CHECK(FunctionSpace(torus, 1, SpaceKind::D).dim() == 8);
  CHECK(FunctionSpace(torus, 1, SpaceKind::S).dim() == 4);
}

TEST_CASE("local-to-global maps are surjective onto the index range") {
  Mesh mesh = make_mesh(3, 0.2, false);
  for (auto kind : {SpaceKind::C, SpaceKind::D, SpaceKind::S}) {
    FunctionSpace sp(mesh, 2, kind);
    std::vector<char> seen(sp.dim(), 0);
    for (int e = 0; e < mesh.element_count(); ++e) {
      const int* dofs = sp.element_dofs(e);
      for (int i = 0; i < sp.local_dim(); ++i) {
        REQUIRE(dofs[i] >= 0);
        REQUIRE(dofs[i] < sp.dim());
        seen[dofs[i]] = 1;
      }
    }
    for (char c : seen) CHECK(c == 1);
  }
}

TEST_CASE("incidence matrices: entries and the complex property") {
  for (int k : {1, 2, 3}) {
    for (int n : {1, 2, 3}) {
      for (bool periodic : {false, true}) {
        if (periodic && k * n < 2) continue;
        for (double c : {0.0, 0.25}) {
          Mesh mesh = make_mesh(k, c, periodic);
          FunctionSpace cs(mesh, n, SpaceKind::C);
          FunctionSpace ds(mesh, n, SpaceKind::D);
          FunctionSpace ss(mesh, n, SpaceKind::S);
          SparseMat curl = incidence_curl(cs, ds);
          SparseMat div = incidence_div(ds, ss);
          for (int col = 0; col < curl.outerSize(); ++col)
            for (SparseMat::InnerIterator it(curl, col); it; ++it)
              CHECK((it.value() == 1.0 || it.value() == -1.0));
          for (int col = 0; col < div.outerSize(); ++col)
            for (SparseMat::InnerIterator it(div, col); it; ++it)
              CHECK((it.value() == 1.0 || it.value() == -1.0));
          SparseMat zero = div * curl;
          zero.prune(0.0, 0.0);
          CHECK(zero.nonZeros() == 0);  // exact integer identity
        }
      }
    }
  }
}

TEST_CASE("curl of a constant vanishes; divergence of a uniform flux vanishes") {
  Mesh mesh = make_mesh(3, 0.25, true);
  FunctionSpace cs(mesh, 2, SpaceKind::C);
  FunctionSpace ds(mesh, 2, SpaceKind::D);
  Field fc(cs, Eigen::VectorXd::Constant(cs.dim(), 3.7));
  Eigen::VectorXd cc = incidence_curl(cs, ds) * fc.coeffs;
  CHECK(cc.cwiseAbs().maxCoeff() == 0.0);

  Mesh ortho = make_mesh(4, 0.0, true);
  FunctionSpace du(ortho, 1, SpaceKind::D);
  FunctionSpace su(ortho, 1, SpaceKind::S);
  auto constant = [](double, double) { return Eigen::Vector2d{1.0, 0.0}; };
  Field uf = assembly::project(du, VectorFn(constant), assembly::QuadConfig{6});
  Eigen::VectorXd dv = incidence_div(du, su) * uf.coeffs;
  CHECK(dv.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("incidence curl is the analytic curl of the reconstruction") {
  Mesh mesh = make_mesh(2, 0.25, false);
  FunctionSpace cs(mesh, 3, SpaceKind::C);
  FunctionSpace ds(mesh, 3, SpaceKind::D);
  Field psi(cs, random_vec(cs.dim(), 42));
  Field cpsi(ds, incidence_curl(cs, ds) * psi.coeffs);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unif(-0.95, 0.95);
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    int elem = trial % mesh.element_count();
    double xi = unif(rng), eta = unif(rng);
    auto js = mesh.jacobian_local(elem, xi, eta);
    // Reference-space central differences of the scalar, chain rule to
    // physical gradient, then rotate.
    double pxp = reconstruct_scalar(psi, elem, xi + h, eta);
    double pxm = reconstruct_scalar(psi, elem, xi - h, eta);
    double pyp = reconstruct_scalar(psi, elem, xi, eta + h);
    double pym = reconstruct_scalar(psi, elem, xi, eta - h);
    Eigen::Vector2d grad_ref{(pxp - pxm) / (2 * h), (pyp - pym) / (2 * h)};
    Eigen::Vector2d grad_phys = js.j.transpose().inverse() * grad_ref;
    Eigen::Vector2d curl_exact{grad_phys[1], -grad_phys[0]};
    Eigen::Vector2d curl_rec = reconstruct_vector(cpsi, elem, xi, eta);
    CHECK((curl_rec - curl_exact).cwiseAbs().maxCoeff() <= 2e-5);
  }
}

TEST_CASE("divergence reconstruction matches finite differences of the vector field") {
  Mesh mesh = make_mesh(2, 0.2, false);
  FunctionSpace ds(mesh, 3, SpaceKind::D);
  FunctionSpace ss(mesh, 3, SpaceKind::S);
  Field u(ds, random_vec(ds.dim(), 9));
  Field du(ss, incidence_div(ds, ss) * u.coeffs);

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(-0.9, 0.9);
  const double h = 1e-5;
  for (int trial = 0; trial < 25; ++trial) {
    int elem = trial % mesh.element_count();
    double xi = unif(rng), eta = unif(rng);
    auto js = mesh.jacobian_local(elem, xi, eta);
    Eigen::Matrix2d jinv = js.j.inverse();
    Eigen::Vector2d uxp = reconstruct_vector(u, elem, xi + h, eta);
    Eigen::Vector2d uxm = reconstruct_vector(u, elem, xi - h, eta);
    Eigen::Vector2d uyp = reconstruct_vector(u, elem, xi, eta + h);
    Eigen::Vector2d uym = reconstruct_vector(u, elem, xi, eta - h);
    Eigen::Matrix2d dref;
    dref.col(0) = (uxp - uxm) / (2 * h);
    dref.col(1) = (uyp - uym) / (2 * h);
    Eigen::Matrix2d dphys = dref * jinv;
    const double div_fd = dphys(0, 0) + dphys(1, 1);
    const double div_rec = reconstruct_scalar(du, elem, xi, eta);
    CHECK(std::abs(div_rec - div_fd) <= 1e-5 * std::max(1.0, std::abs(div_fd)));
  }
}

TEST_CASE("reconstruction: constants reproduced, Piola consistency") {
  Mesh mesh = make_mesh(3, 0.25, false);
  FunctionSpace cs(mesh, 2, SpaceKind::C);
  Field five = assembly::project(cs, ScalarFn([](double, double) { return 5.0; }),
                                 assembly::QuadConfig{4});
  for (int elem : {0, 4, 8})
    CHECK(reconstruct_scalar(five, elem, 0.3, -0.7) == doctest::Approx(5.0).epsilon(1e-14));

  // Constant vector fields are exactly representable on affine meshes.
  Mesh ortho = make_mesh(3, 0.0, false);
  FunctionSpace d0(ortho, 2, SpaceKind::D);
  auto cfield = [](double, double) { return Eigen::Vector2d{1.0, 0.0}; };
  Field uc = assembly::project(d0, VectorFn(cfield), assembly::QuadConfig{8});
  for (int elem : {0, 4, 8}) {
    auto v = reconstruct_vector(uc, elem, 0.21, 0.53);
    CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(v[1]) <= 1e-12);
  }

  // On the curvilinear mesh the same field is only approximated; the
  // sampled error drops at close to rate N under h-refinement.
  auto sample_error = [&](int k) {
    Mesh crazy = make_mesh(k, 0.25, false);
    FunctionSpace dd(crazy, 3, SpaceKind::D);
    Field uh = assembly::project(dd, VectorFn(cfield), assembly::QuadConfig{12});
    double err = 0.0;
    for (int elem = 0; elem < crazy.element_count(); ++elem)
      for (double xi : {-0.6, 0.1, 0.8})
        for (double eta : {-0.4, 0.7}) {
          auto v = reconstruct_vector(uh, elem, xi, eta);
          err = std::max(err, (v - Eigen::Vector2d{1.0, 0.0}).cwiseAbs().maxCoeff());
        }
    return err;
  };
  const double e8 = sample_error(8), e16 = sample_error(16);
  CHECK(e16 <= 1e-3);
  CHECK(std::log2(e8 / e16) >= 3.0 - 0.4);
}

TEST_CASE("C reconstruction is continuous across interior interfaces") {
  Mesh mesh = make_mesh(3, 0.25, false);
  FunctionSpace cs(mesh, 3, SpaceKind::C);
  Field f(cs, random_vec(cs.dim(), 12));
  for (double eta : {-0.8, -0.2, 0.4, 0.9}) {
    double left = reconstruct_scalar(f, mesh.element_id(0, 0), 1.0, eta);
    double right = reconstruct_scalar(f, mesh.element_id(1, 0), -1.0, eta);
    CHECK(left == doctest::Approx(right).epsilon(1e-12));
  }
}

TEST_CASE("D normal components are continuous across interior interfaces") {
  Mesh mesh = make_mesh(3, 0.25, false);
  FunctionSpace ds(mesh, 3, SpaceKind::D);
  Field f(ds, random_vec(ds.dim(), 21));
  // Vertical interface: the flux density u . (T_y, -T_x) must agree.
  for (double eta : {-0.7, 0.0, 0.55}) {
    const int el = mesh.element_id(0, 1), er = mesh.element_id(1, 1);
    auto tl = mesh.jacobian_local(el, 1.0, eta).j.col(1);
    auto tr = mesh.jacobian_local(er, -1.0, eta).j.col(1);
    auto ul = reconstruct_vector(f, el, 1.0, eta);
    auto ur = reconstruct_vector(f, er, -1.0, eta);
    const double fl = ul[0] * tl[1] - ul[1] * tl[0];
    const double fr = ur[0] * tr[1] - ur[1] * tr[0];
    CHECK(fl == doctest::Approx(fr).epsilon(1e-12));
  }
  // Horizontal interface.
  for (double xi : {-0.5, 0.3}) {
    const int eb = mesh.element_id(1, 0), et = mesh.element_id(1, 1);
    auto tb = mesh.jacobian_local(eb, xi, 1.0).j.col(0);
    auto tt = mesh.jacobian_local(et, xi, -1.0).j.col(0);
    auto ub = reconstruct_vector(f, eb, xi, 1.0);
    auto ut = reconstruct_vector(f, et, xi, -1.0);
    const double fb = ub[1] * tb[0] - ub[0] * tb[1];
    const double ft = ut[1] * tt[0] - ut[0] * tt[1];
    CHECK(fb == doctest::Approx(ft).epsilon(1e-12));
  }
}

TEST_CASE("boundary dof sets") {
  Mesh torus = make_mesh(3, 0.0, true);
  FunctionSpace cp(torus, 2, SpaceKind::C);
  CHECK_THROWS_AS(cp.boundary_dofs(Wall::Left), std::invalid_argument);

  Mesh mesh = make_mesh(2, 0.0, false);
  FunctionSpace cs(mesh, 2, SpaceKind::C);
  FunctionSpace ds(mesh, 2, SpaceKind::D);
  CHECK(cs.boundary_dofs(Wall::Left).size() == 5);    // KN+1 nodes
  CHECK(ds.boundary_dofs(Wall::Bottom).size() == 4);  // KN edges

  Mesh single = make_mesh(1, 0.0, false);
  FunctionSpace c1(single, 1, SpaceKind::C);
  CHECK(c1.boundary_dofs(WallSet::all()).size() == 4);

  // Mixed periodicity: only the non-periodic walls exist.
  MeshConfig mixed;
  mixed.elements_per_side = 2;
  mixed.periodic = {true, false};
  Mesh mmesh(mixed);
  FunctionSpace dm(mmesh, 2, SpaceKind::D);
  CHECK_THROWS_AS(dm.boundary_dofs(Wall::Left), std::invalid_argument);
  CHECK(dm.boundary_dofs(Wall::Top).size() == 4);
}
