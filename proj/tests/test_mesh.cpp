#include <doctest.h>

#include <cmath>
#include <random>

#include "meevc/mesh.hpp"

using namespace meevc;

TEST_CASE("mapping closed forms") {
  MeshConfig c0;
  c0.elements_per_side = 25;
  Mesh identity(c0);
  for (double r : {0.0, 0.3, 0.77, 1.0})
    for (double s : {0.0, 0.41, 1.0}) {
      auto p = identity.map_point(r, s);
      CHECK(p[0] == doctest::Approx(r).epsilon(1e-15));
      CHECK(p[1] == doctest::Approx(s).epsilon(1e-15));
    }

  MeshConfig c1;
  c1.elements_per_side = 12;
  c1.deformation = 0.25;
  Mesh crazy(c1);
  auto mid = crazy.map_point(0.5, 0.5);
  CHECK(mid[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mid[1] == doctest::Approx(0.5).epsilon(1e-15));
  auto q = crazy.map_point(0.25, 0.25);
  CHECK(q[0] == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(q[1] == doctest::Approx(0.375).epsilon(1e-14));
}

TEST_CASE("config validation") {
  MeshConfig bad;
  bad.elements_per_side = 4;
  bad.deformation = 0.31;
  CHECK_THROWS_AS(Mesh{bad}, std::invalid_argument);
  bad.deformation = -0.01;
  CHECK_THROWS_AS(Mesh{bad}, std::invalid_argument);
  bad.deformation = 0.0;
  bad.scale = 0.0;
  CHECK_THROWS_AS(Mesh{bad}, std::invalid_argument);
  bad.scale = 1.0;
  bad.elements_per_side = 0;
  CHECK_THROWS_AS(Mesh{bad}, std::invalid_argument);

  MeshConfig sp;
  sp.elements_per_side = 3;
  sp.spacing_x = {0.0, 0.5, 0.4, 1.0};  // not monotone
  CHECK_THROWS_AS(Mesh{sp}, std::invalid_argument);
  sp.spacing_x = {0.0, 0.5, 1.0};  // wrong length
  CHECK_THROWS_AS(Mesh{sp}, std::invalid_argument);
}

TEST_CASE("element tiling covers the reference square") {
  MeshConfig mc;
  mc.elements_per_side = 5;
  mc.spacing_x = tanh_spacing(5, 1.8);
  Mesh mesh(mc);
  CHECK(mesh.element_count() == 25);
  double left = 0.0;
  for (int ex = 0; ex < 5; ++ex) {
    auto cx = mesh.cell_x(ex);
    CHECK(cx[0] == doctest::Approx(left).epsilon(1e-15));
    CHECK(cx[1] > cx[0]);
    left = cx[1];
  }
  CHECK(left == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("jacobian: scaling, analytic entry, finite differences") {
  MeshConfig c2;
  c2.elements_per_side = 4;
  c2.scale = 2.0;
  Mesh scaled(c2);
  auto js = scaled.jacobian_global(0.3, 0.6);
  CHECK(js.j(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(js.j(1, 1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(js.j(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(js.det == doctest::Approx(4.0).epsilon(1e-15));

  MeshConfig c3;
  c3.elements_per_side = 12;
  c3.deformation = 0.25;
  Mesh crazy(c3);
  // J11 = 1 + pi c cos(pi) sin(pi) = 1 at the center point.
  CHECK(crazy.jacobian_global(0.5, 0.5).j(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

  // Finite-difference oracle on the mapping at 100 random points.
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(0.01, 0.99);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    double r = unif(rng), s = unif(rng);
    auto j = crazy.jacobian_global(r, s);
    auto xp = crazy.map_point(r + h, s), xm = crazy.map_point(r - h, s);
    auto yp = crazy.map_point(r, s + h), ym = crazy.map_point(r, s - h);
    CHECK(std::abs(j.j(0, 0) - (xp[0] - xm[0]) / (2 * h)) <= 1e-8);
    CHECK(std::abs(j.j(1, 0) - (xp[1] - xm[1]) / (2 * h)) <= 1e-8);
    CHECK(std::abs(j.j(0, 1) - (yp[0] - ym[0]) / (2 * h)) <= 1e-8);
    CHECK(std::abs(j.j(1, 1) - (yp[1] - ym[1]) / (2 * h)) <= 1e-8);
    double fd_det = (xp[0] - xm[0]) * (yp[1] - ym[1]) - (yp[0] - ym[0]) * (xp[1] - xm[1]);
    CHECK(std::abs(j.det - fd_det / (4 * h * h)) <= 1e-8);
  }
}

TEST_CASE("det positive over the admissible deformation range") {
  for (double c : {0.0, 0.1, 0.25, 0.3}) {
    MeshConfig mc;
    mc.elements_per_side = 4;
    mc.deformation = c;
    Mesh mesh(mc);
    for (int elem = 0; elem < mesh.element_count(); ++elem)
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
          double xi = -1.0 + 0.5 * i, eta = -1.0 + 0.5 * j;
          CHECK(mesh.jacobian_local(elem, xi, eta).det > 0.0);
        }
  }
}

TEST_CASE("periodic continuation of the deformation") {
  MeshConfig mc;
  mc.elements_per_side = 6;
  mc.deformation = 0.2;
  mc.scale = 1.5;
  mc.periodic = {true, true};
  Mesh mesh(mc);
  for (double s : {0.1, 0.5, 0.9}) {
    auto a = mesh.map_point(0.0, s);
    auto b = mesh.map_point(1.0, s);
    CHECK(b[0] - a[0] == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(b[1] - a[1] == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("physical quadrature reproduces the domain area") {
  auto rule = gauss_nodes(6);
  auto total = [&](const Mesh& mesh) {
    double acc = 0.0;
    for (int e = 0; e < mesh.element_count(); ++e)
      for (const auto& qp : mesh.physical_quadrature(e, rule)) acc += qp.weight * qp.jac.det;
    return acc;
  };

  MeshConfig unit;
  unit.elements_per_side = 3;
  CHECK(total(Mesh(unit)) == doctest::Approx(1.0).epsilon(1e-13));

  MeshConfig crazy;
  crazy.elements_per_side = 6;
  crazy.deformation = 0.25;
  CHECK(total(Mesh(crazy)) == doctest::Approx(1.0).epsilon(1e-10));

  MeshConfig torus;
  torus.elements_per_side = 48;
  torus.scale = 2.0 * M_PI;
  torus.periodic = {true, true};
  CHECK(total(Mesh(torus)) == doctest::Approx(4.0 * M_PI * M_PI).epsilon(1e-10));

  Mesh graded(MeshConfig{.elements_per_side = 8,
                         .spacing_x = tanh_spacing(8, 2.0),
                         .spacing_y = tanh_spacing(8, 2.0)});
  CHECK(total(graded) == doctest::Approx(1.0).epsilon(1e-13));

  CHECK_THROWS_AS(Mesh(unit).physical_quadrature(0, QuadRule{}), std::invalid_argument);
}

TEST_CASE("tanh spacing is symmetric and wall-refined") {
  auto b = tanh_spacing(10, 1.8);
  REQUIRE(b.size() == 11);
  for (int i = 0; i <= 10; ++i) CHECK(b[i] == doctest::Approx(1.0 - b[10 - i]).epsilon(1e-14));
  CHECK(b[1] - b[0] < b[6] - b[5]);
}

TEST_CASE("summary json and grid csv") {
  MeshConfig mc;
  mc.elements_per_side = 4;
  mc.deformation = 0.25;
  Mesh mesh(mc);
  auto js = mesh.summary_json();
  CHECK(js.find("\"element_count\":16") != std::string::npos);
  CHECK(js.find("\"deformation\":0.25") != std::string::npos);
  auto csv = mesh.grid_csv(3);
  CHECK(csv.rfind("r,s,x,y\n", 0) == 0);
  int lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 1 + 9);
}
