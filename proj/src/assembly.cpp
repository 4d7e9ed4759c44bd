#include "meevc/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace meevc::assembly {

namespace {

struct Rule2d {
  QuadRule rule;
  int nq;
  std::vector<double> wq;  // tensor weights, q = qy*nq+qx
  BasisTable tab;          // 1D nodal/edge values at the rule points

  Rule2d(const NodeSet& ns, QuadConfig quad) : rule(gauss_nodes(quad.gauss_degree)) {
    nq = quad.gauss_degree;
    wq.resize(static_cast<size_t>(nq) * nq);
    for (int qy = 0; qy < nq; ++qy)
      for (int qx = 0; qx < nq; ++qx) wq[static_cast<size_t>(qy) * nq + qx] = rule.weights[qx] * rule.weights[qy];
    tab = tabulate_basis(ns, rule.points);
  }
};

struct ElemGeom {
  std::vector<double> det;
  std::vector<Eigen::Matrix2d> jac;
};

ElemGeom elem_geom(const Mesh& mesh, int elem, const Rule2d& r) {
  ElemGeom g;
  const int nq = r.nq;
  g.det.resize(static_cast<size_t>(nq) * nq);
  g.jac.resize(static_cast<size_t>(nq) * nq);
  for (int qy = 0; qy < nq; ++qy) {
    for (int qx = 0; qx < nq; ++qx) {
      auto js = mesh.jacobian_local(elem, r.rule.points[qx], r.rule.points[qy]);
      g.det[static_cast<size_t>(qy) * nq + qx] = js.det;
      g.jac[static_cast<size_t>(qy) * nq + qx] = js.j;
    }
  }
  return g;
}

// Reference-proxy values of all local D functions at one tensor point:
// x-family carries component 0, y-family component 1.
struct DProxy {
  std::vector<double> x;  // n*(n+1) values, index (kk-1)*(n+1)+a
  std::vector<double> y;  // (n+1)*n values, index b*n+(l-1)
};

void d_proxy_at(const FunctionSpace& d, const Rule2d& r, int qx, int qy, DProxy& p) {
  const int n = d.degree();
  p.x.resize(static_cast<size_t>(n) * (n + 1));
  p.y.resize(static_cast<size_t>(n) * (n + 1));
  for (int kk = 1; kk <= n; ++kk)
    for (int a = 0; a <= n; ++a)
      p.x[static_cast<size_t>(kk - 1) * (n + 1) + a] = r.tab.node(a, qx) * r.tab.edge(kk, qy);
  for (int b = 0; b <= n; ++b)
    for (int l = 1; l <= n; ++l)
      p.y[static_cast<size_t>(b) * n + (l - 1)] = r.tab.edge(l, qx) * r.tab.node(b, qy);
}

void scatter_dense(const FunctionSpace& rows, const FunctionSpace& cols, int elem,
                   const Eigen::MatrixXd& block, std::vector<Eigen::Triplet<double>>& trips) {
  const int* rd = rows.element_dofs(elem);
  const int* cd = cols.element_dofs(elem);
  for (int j = 0; j < block.cols(); ++j)
    for (int i = 0; i < block.rows(); ++i)
      if (block(i, j) != 0.0) trips.emplace_back(rd[i], cd[j], block(i, j));
}

template <typename ElementKernel>
SparseMat assemble_matrix(const FunctionSpace& rows, const FunctionSpace& cols,
                          ElementKernel&& kernel) {
  const int nel = rows.mesh().element_count();
  std::vector<Eigen::MatrixXd> blocks(nel);
#pragma omp parallel for schedule(static)
  for (int elem = 0; elem < nel; ++elem) blocks[elem] = kernel(elem);
  // Serial scatter in element order keeps results independent of the
  // thread count.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(nel) * rows.local_dim() * cols.local_dim());
  for (int elem = 0; elem < nel; ++elem) scatter_dense(rows, cols, elem, blocks[elem], trips);
  SparseMat m(rows.dim(), cols.dim());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

Eigen::MatrixXd mass_block_c(const FunctionSpace& sp, const Rule2d& r, int elem) {
  const int n = sp.degree(), nq = r.nq, nl = sp.local_dim();
  ElemGeom g = elem_geom(sp.mesh(), elem, r);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nl, nl);
  std::vector<double> phi(nl);
  for (int qy = 0; qy < nq; ++qy) {
    for (int qx = 0; qx < nq; ++qx) {
      const size_t q = static_cast<size_t>(qy) * nq + qx;
      for (int b = 0; b <= n; ++b)
        for (int a = 0; a <= n; ++a) phi[sp.local_node(a, b)] = r.tab.node(a, qx) * r.tab.node(b, qy);
      const double wdet = r.wq[q] * g.det[q];
      for (int j = 0; j < nl; ++j) {
        const double pj = wdet * phi[j];
        for (int i = 0; i < nl; ++i) m(i, j) += phi[i] * pj;
      }
    }
  }
  return m;
}

Eigen::MatrixXd mass_block_d(const FunctionSpace& sp, const Rule2d& r, int elem) {
  const int n = sp.degree(), nq = r.nq, nl = sp.local_dim();
  const int nx = n * (n + 1);
  ElemGeom g = elem_geom(sp.mesh(), elem, r);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nl, nl);
  DProxy p;
  for (int qy = 0; qy < nq; ++qy) {
    for (int qx = 0; qx < nq; ++qx) {
      const size_t q = static_cast<size_t>(qy) * nq + qx;
      d_proxy_at(sp, r, qx, qy, p);
      const Eigen::Matrix2d& J = g.jac[q];
      const double s = r.wq[q] / g.det[q];
      const double g00 = s * (J(0, 0) * J(0, 0) + J(1, 0) * J(1, 0));
      const double g01 = s * (J(0, 0) * J(0, 1) + J(1, 0) * J(1, 1));
      const double g11 = s * (J(0, 1) * J(0, 1) + J(1, 1) * J(1, 1));
      for (int j = 0; j < nx; ++j) {
        const double v = p.x[j];
        for (int i = 0; i < nx; ++i) m(i, j) += g00 * p.x[i] * v;
        for (int i = 0; i < nx; ++i) m(nx + i, j) += g01 * p.y[i] * v;
      }
      for (int j = 0; j < nx; ++j) {
        const double v = p.y[j];
        for (int i = 0; i < nx; ++i) m(i, nx + j) += g01 * p.x[i] * v;
        for (int i = 0; i < nx; ++i) m(nx + i, nx + j) += g11 * p.y[i] * v;
      }
    }
  }
  return m;
}

Eigen::MatrixXd mass_block_s(const FunctionSpace& sp, const Rule2d& r, int elem) {
  const int n = sp.degree(), nq = r.nq, nl = sp.local_dim();
  ElemGeom g = elem_geom(sp.mesh(), elem, r);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nl, nl);
  std::vector<double> phi(nl);
  for (int qy = 0; qy < nq; ++qy) {
    for (int qx = 0; qx < nq; ++qx) {
      const size_t q = static_cast<size_t>(qy) * nq + qx;
      for (int mm = 1; mm <= n; ++mm)
        for (int l = 1; l <= n; ++l) phi[sp.local_cell(l, mm)] = r.tab.edge(l, qx) * r.tab.edge(mm, qy);
      const double w = r.wq[q] / g.det[q];
      for (int j = 0; j < nl; ++j) {
        const double pj = w * phi[j];
        for (int i = 0; i < nl; ++i) m(i, j) += phi[i] * pj;
      }
    }
  }
  return m;
}

}  // namespace

SparseMat mass_matrix(const FunctionSpace& space, QuadConfig quad) {
  Rule2d r(space.nodes1d(), quad);
  switch (space.kind()) {
    case SpaceKind::C:
      return assemble_matrix(space, space, [&](int e) { return mass_block_c(space, r, e); });
    case SpaceKind::D:
      return assemble_matrix(space, space, [&](int e) { return mass_block_d(space, r, e); });
    case SpaceKind::S:
      return assemble_matrix(space, space, [&](int e) { return mass_block_s(space, r, e); });
  }
  throw std::logic_error("mass_matrix: unknown space kind");
}

SparseMat convection_matrix(const Field& omega, const FunctionSpace& d_space, QuadConfig quad) {
  const FunctionSpace& c_space = *omega.space;
  if (c_space.kind() != SpaceKind::C || &c_space.mesh() != &d_space.mesh())
    throw std::invalid_argument("convection_matrix: omega must live in C on the same mesh");
  Rule2d r(d_space.nodes1d(), quad);
  const int n = d_space.degree(), nq = r.nq;
  const int nx = n * (n + 1);
  const int nl = d_space.local_dim();

  auto kernel = [&](int elem) {
    const int* cd = c_space.element_dofs(elem);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nl, nl);
    DProxy p;
    // The metric cancels in (w_h x d_j).d_i: the Piola factors of the two
    // D functions contribute det(J)/det(J)^2, the measure contributes det(J).
    for (int qy = 0; qy < nq; ++qy) {
      for (int qx = 0; qx < nq; ++qx) {
        const size_t q = static_cast<size_t>(qy) * nq + qx;
        double w = 0.0;
        for (int b = 0; b <= n; ++b) {
          const double hb = r.tab.node(b, qy);
          for (int a = 0; a <= n; ++a)
            w += omega.coeffs[cd[c_space.local_node(a, b)]] * r.tab.node(a, qx) * hb;
        }
        d_proxy_at(d_space, r, qx, qy, p);
        const double ww = r.wq[q] * w;
        // A[i,j] += w * (u_j x u_i): only x-y family pairs survive.
        for (int j = 0; j < nx; ++j) {
          const double xj = ww * p.x[j];
          for (int i = 0; i < nx; ++i) m(nx + i, j) += xj * p.y[i];
        }
      }
    }
    m.block(0, nx, nx, nx) = -m.block(nx, 0, nx, nx).transpose();
    return m;
  };
  return assemble_matrix(d_space, d_space, kernel);
}

SparseMat convection_jacobian_wrt_omega(const Field& u, const FunctionSpace& c_space,
                                        const FunctionSpace& d_space, QuadConfig quad) {
  if (u.space->kind() != SpaceKind::D || &c_space.mesh() != &u.space->mesh())
    throw std::invalid_argument("convection_jacobian_wrt_omega: u must live in D on the same mesh");
  Rule2d r(d_space.nodes1d(), quad);
  const int n = d_space.degree(), nq = r.nq;
  const int nx = n * (n + 1);
  const int nl = d_space.local_dim();
  const int nc = c_space.local_dim();

  auto kernel = [&](int elem) {
    const int* dd = d_space.element_dofs(elem);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nl, nc);
    DProxy p;
    for (int qy = 0; qy < nq; ++qy) {
      for (int qx = 0; qx < nq; ++qx) {
        const size_t q = static_cast<size_t>(qy) * nq + qx;
        d_proxy_at(d_space, r, qx, qy, p);
        double ux = 0.0, uy = 0.0;
        for (int i = 0; i < nx; ++i) {
          ux += u.coeffs[dd[i]] * p.x[i];
          uy += u.coeffs[dd[nx + i]] * p.y[i];
        }
        const double w = r.wq[q];
        // B[i,c] += w * phi_c * (u x d_i); x-family rows pick -uy, y-family +ux.
        for (int b = 0; b <= n; ++b) {
          const double hb = r.tab.node(b, qy);
          for (int a = 0; a <= n; ++a) {
            const double pc = w * r.tab.node(a, qx) * hb;
            const int c = c_space.local_node(a, b);
            for (int i = 0; i < nx; ++i) m(i, c) -= pc * uy * p.x[i];
            for (int i = 0; i < nx; ++i) m(nx + i, c) += pc * ux * p.y[i];
          }
        }
      }
    }
    return m;
  };
  return assemble_matrix(d_space, c_space, kernel);
}

double curl_trilinear_probe(const Field& omega, const Field& u, const SparseMat& curl,
                            QuadConfig quad) {
  const FunctionSpace& c_space = *omega.space;
  const FunctionSpace& d_space = *u.space;
  if (&c_space.mesh() != &d_space.mesh())
    throw std::invalid_argument("curl_trilinear_probe: fields on different meshes");
  Eigen::VectorXd curl_w = curl * omega.coeffs;
  Rule2d r(d_space.nodes1d(), quad);
  const int n = d_space.degree(), nq = r.nq;
  const int nx = n * (n + 1);
  const int nel = d_space.mesh().element_count();

  std::vector<double> partial(nel, 0.0);
#pragma omp parallel
  {
    DProxy p;
#pragma omp for schedule(static)
    for (int elem = 0; elem < nel; ++elem) {
      const int* cd = c_space.element_dofs(elem);
      const int* dd = d_space.element_dofs(elem);
      double acc = 0.0;
      for (int qy = 0; qy < nq; ++qy) {
        for (int qx = 0; qx < nq; ++qx) {
          d_proxy_at(d_space, r, qx, qy, p);
          double w = 0.0;
          for (int b = 0; b <= n; ++b) {
            const double hb = r.tab.node(b, qy);
            for (int a = 0; a <= n; ++a)
              w += omega.coeffs[cd[c_space.local_node(a, b)]] * r.tab.node(a, qx) * hb;
          }
          double ux = 0.0, uy = 0.0, ex = 0.0, ey = 0.0;
          for (int i = 0; i < nx; ++i) {
            ux += u.coeffs[dd[i]] * p.x[i];
            uy += u.coeffs[dd[nx + i]] * p.y[i];
            ex += curl_w[dd[i]] * p.x[i];
            ey += curl_w[dd[nx + i]] * p.y[i];
          }
          acc += r.wq[static_cast<size_t>(qy) * nq + qx] * w * (ux * ey - uy * ex);
        }
      }
      partial[elem] = acc;
    }
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

namespace {

struct WallGeom {
  int sign;       // our +x/+y flux orientation vs outward normal
  bool vertical;  // edge runs along eta (left/right walls)
  double fixed;   // the fixed local coordinate, +-1
  std::vector<int> elems;
};

WallGeom wall_geom(const Mesh& mesh, Wall w) {
  WallGeom g;
  const int k = mesh.side_count();
  switch (w) {
    case Wall::Left:
      g = {-1, true, -1.0, {}};
      for (int ey = 0; ey < k; ++ey) g.elems.push_back(mesh.element_id(0, ey));
      break;
    case Wall::Right:
      g = {+1, true, +1.0, {}};
      for (int ey = 0; ey < k; ++ey) g.elems.push_back(mesh.element_id(k - 1, ey));
      break;
    case Wall::Bottom:
      g = {-1, false, -1.0, {}};
      for (int ex = 0; ex < k; ++ex) g.elems.push_back(mesh.element_id(ex, 0));
      break;
    case Wall::Top:
      g = {+1, false, +1.0, {}};
      for (int ex = 0; ex < k; ++ex) g.elems.push_back(mesh.element_id(ex, k - 1));
      break;
  }
  return g;
}

void check_section_walls(const Mesh& mesh, const WallSet& section, const char* what) {
  for (int w = 0; w < 4; ++w) {
    if (!section.walls[w]) continue;
    const bool xdir = (w <= 1);
    if ((xdir && mesh.periodic_x()) || (!xdir && mesh.periodic_y()))
      throw std::invalid_argument(std::string(what) + ": section on a periodic boundary");
  }
}

Eigen::Vector2d edge_point(const Mesh& mesh, const WallGeom& g, int elem, double tau) {
  return g.vertical ? mesh.map_local(elem, g.fixed, tau) : mesh.map_local(elem, tau, g.fixed);
}

Eigen::Vector2d edge_tangent(const Mesh& mesh, const WallGeom& g, int elem, double tau) {
  auto js = g.vertical ? mesh.jacobian_local(elem, g.fixed, tau)
                       : mesh.jacobian_local(elem, tau, g.fixed);
  return g.vertical ? Eigen::Vector2d(js.j.col(1)) : Eigen::Vector2d(js.j.col(0));
}

}  // namespace

Eigen::VectorXd natural_bc_pressure(const ScalarFn& phat, const WallSet& section,
                                    const FunctionSpace& d_space, QuadConfig quad) {
  check_section_walls(d_space.mesh(), section, "natural_bc_pressure");
  const Mesh& mesh = d_space.mesh();
  const int n = d_space.degree();
  Rule2d r(d_space.nodes1d(), quad);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d_space.dim());
  for (int w = 0; w < 4; ++w) {
    if (!section.walls[w]) continue;
    WallGeom wg = wall_geom(mesh, static_cast<Wall>(w));
    const int a_fixed = (wg.fixed > 0) ? n : 0;
    for (int elem : wg.elems) {
      const int* dd = d_space.element_dofs(elem);
      for (int qi = 0; qi < r.nq; ++qi) {
        const double tau = r.rule.points[qi];
        const double val = wg.sign * r.rule.weights[qi] * phat(edge_point(mesh, wg, elem, tau)[0],
                                                              edge_point(mesh, wg, elem, tau)[1]);
        // v.n dGamma reduces to the reference edge density of the wall family.
        for (int kk = 1; kk <= n; ++kk) {
          const int ld = wg.vertical ? d_space.local_flux_x(a_fixed, kk)
                                     : d_space.local_flux_y(kk, a_fixed);
          g[dd[ld]] += val * r.tab.edge(kk, qi);
        }
      }
    }
  }
  return g;
}

Eigen::VectorXd natural_bc_tangential(const ScalarFn& upar, const WallSet& section,
                                      const FunctionSpace& c_space, QuadConfig quad) {
  check_section_walls(c_space.mesh(), section, "natural_bc_tangential");
  const Mesh& mesh = c_space.mesh();
  const int n = c_space.degree();
  Rule2d r(c_space.nodes1d(), quad);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(c_space.dim());
  for (int w = 0; w < 4; ++w) {
    if (!section.walls[w]) continue;
    WallGeom wg = wall_geom(mesh, static_cast<Wall>(w));
    const int a_fixed = (wg.fixed > 0) ? n : 0;
    for (int elem : wg.elems) {
      const int* cd = c_space.element_dofs(elem);
      for (int qi = 0; qi < r.nq; ++qi) {
        const double tau = r.rule.points[qi];
        auto x = edge_point(mesh, wg, elem, tau);
        const double arc = edge_tangent(mesh, wg, elem, tau).norm();
        const double val = r.rule.weights[qi] * upar(x[0], x[1]) * arc;
        for (int b = 0; b <= n; ++b) {
          const int ld = wg.vertical ? c_space.local_node(a_fixed, b) : c_space.local_node(b, a_fixed);
          g[cd[ld]] += val * r.tab.node(b, qi);
        }
      }
    }
  }
  return g;
}

Eigen::VectorXd force_load(const VectorFn& f, const FunctionSpace& d_space, QuadConfig quad) {
  Rule2d r(d_space.nodes1d(), quad);
  const int n = d_space.degree(), nq = r.nq;
  const int nx = n * (n + 1);
  const Mesh& mesh = d_space.mesh();
  const int nel = mesh.element_count();
  std::vector<Eigen::VectorXd> blocks(nel);
#pragma omp parallel
  {
    DProxy p;
#pragma omp for schedule(static)
    for (int elem = 0; elem < nel; ++elem) {
      Eigen::VectorXd b = Eigen::VectorXd::Zero(d_space.local_dim());
      for (int qy = 0; qy < nq; ++qy) {
        for (int qx = 0; qx < nq; ++qx) {
          d_proxy_at(d_space, r, qx, qy, p);
          auto xq = mesh.map_local(elem, r.rule.points[qx], r.rule.points[qy]);
          auto js = mesh.jacobian_local(elem, r.rule.points[qx], r.rule.points[qy]);
          // <f, v>: f^T J u_ref, the 1/det of the Piola map cancels the measure.
          Eigen::Vector2d ft = js.j.transpose() * f(xq[0], xq[1]);
          const double w = r.wq[static_cast<size_t>(qy) * nq + qx];
          for (int i = 0; i < nx; ++i) {
            b[i] += w * ft[0] * p.x[i];
            b[nx + i] += w * ft[1] * p.y[i];
          }
        }
      }
      blocks[elem] = b;
    }
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d_space.dim());
  for (int elem = 0; elem < nel; ++elem) {
    const int* dd = d_space.element_dofs(elem);
    for (int i = 0; i < d_space.local_dim(); ++i) g[dd[i]] += blocks[elem][i];
  }
  return g;
}

Field project(const FunctionSpace& space, const ScalarFn& f, QuadConfig quad) {
  const Mesh& mesh = space.mesh();
  const int n = space.degree();
  Field out(space);
  if (space.kind() == SpaceKind::C) {
    const NodeSet& ns = space.nodes1d();
    for (int elem = 0; elem < mesh.element_count(); ++elem) {
      const int* cd = space.element_dofs(elem);
      for (int b = 0; b <= n; ++b)
        for (int a = 0; a <= n; ++a) {
          auto x = mesh.map_local(elem, ns.nodes[a], ns.nodes[b]);
          out.coeffs[cd[space.local_node(a, b)]] = f(x[0], x[1]);
        }
    }
    return out;
  }
  if (space.kind() == SpaceKind::S) {
    const NodeSet& ns = space.nodes1d();
    QuadRule r = gauss_nodes(quad.gauss_degree);
    for (int elem = 0; elem < mesh.element_count(); ++elem) {
      const int* sd = space.element_dofs(elem);
      for (int mm = 1; mm <= n; ++mm) {
        for (int l = 1; l <= n; ++l) {
          const double x0 = ns.nodes[l - 1], x1 = ns.nodes[l];
          const double y0 = ns.nodes[mm - 1], y1 = ns.nodes[mm];
          double acc = 0.0;
          for (size_t qy = 0; qy < r.points.size(); ++qy) {
            for (size_t qx = 0; qx < r.points.size(); ++qx) {
              const double xi = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * r.points[qx];
              const double eta = 0.5 * (y0 + y1) + 0.5 * (y1 - y0) * r.points[qy];
              auto x = mesh.map_local(elem, xi, eta);
              acc += r.weights[qx] * r.weights[qy] * f(x[0], x[1]) *
                     mesh.jacobian_local(elem, xi, eta).det;
            }
          }
          out.coeffs[sd[space.local_cell(l, mm)]] = 0.25 * (x1 - x0) * (y1 - y0) * acc;
        }
      }
    }
    return out;
  }
  throw std::invalid_argument("project: scalar field needs a C or S space");
}

Field project(const FunctionSpace& space, const VectorFn& f, QuadConfig quad) {
  if (space.kind() != SpaceKind::D)
    throw std::invalid_argument("project: vector field needs a D space");
  const Mesh& mesh = space.mesh();
  const int n = space.degree();
  const NodeSet& ns = space.nodes1d();
  QuadRule r = gauss_nodes(quad.gauss_degree);
  Field out(space);
  for (int elem = 0; elem < mesh.element_count(); ++elem) {
    const int* dd = space.element_dofs(elem);
    // x-normal fluxes through the sub-edge {xi = xi_a, eta in [eta_{k-1}, eta_k]}.
    for (int kk = 1; kk <= n; ++kk) {
      for (int a = 0; a <= n; ++a) {
        const int g = dd[space.local_flux_x(a, kk)];
        if (space.owner_element(g) != elem) continue;
        const double t0 = ns.nodes[kk - 1], t1 = ns.nodes[kk];
        double acc = 0.0;
        for (size_t q = 0; q < r.points.size(); ++q) {
          const double eta = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * r.points[q];
          auto x = mesh.map_local(elem, ns.nodes[a], eta);
          Eigen::Vector2d tan = mesh.jacobian_local(elem, ns.nodes[a], eta).j.col(1);
          Eigen::Vector2d v = f(x[0], x[1]);
          acc += r.weights[q] * (v[0] * tan[1] - v[1] * tan[0]);
        }
        out.coeffs[g] = 0.5 * (t1 - t0) * acc;
      }
    }
    // y-normal fluxes through {eta = eta_b, xi in [xi_{l-1}, xi_l]}.
    for (int b = 0; b <= n; ++b) {
      for (int l = 1; l <= n; ++l) {
        const int g = dd[space.local_flux_y(l, b)];
        if (space.owner_element(g) != elem) continue;
        const double t0 = ns.nodes[l - 1], t1 = ns.nodes[l];
        double acc = 0.0;
        for (size_t q = 0; q < r.points.size(); ++q) {
          const double xi = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * r.points[q];
          auto x = mesh.map_local(elem, xi, ns.nodes[b]);
          Eigen::Vector2d tan = mesh.jacobian_local(elem, xi, ns.nodes[b]).j.col(0);
          Eigen::Vector2d v = f(x[0], x[1]);
          acc += r.weights[q] * (v[1] * tan[0] - v[0] * tan[1]);
        }
        out.coeffs[g] = 0.5 * (t1 - t0) * acc;
      }
    }
  }
  return out;
}

std::vector<std::pair<int, double>> essential_flux_values(const FunctionSpace& d_space,
                                                          const WallSet& walls,
                                                          const ScalarFn& u_normal,
                                                          QuadConfig quad) {
  check_section_walls(d_space.mesh(), walls, "essential_flux_values");
  const Mesh& mesh = d_space.mesh();
  const int n = d_space.degree();
  const NodeSet& ns = d_space.nodes1d();
  QuadRule r = gauss_nodes(quad.gauss_degree);
  std::vector<std::pair<int, double>> out;
  for (int w = 0; w < 4; ++w) {
    if (!walls.walls[w]) continue;
    WallGeom wg = wall_geom(mesh, static_cast<Wall>(w));
    const int a_fixed = (wg.fixed > 0) ? n : 0;
    for (int elem : wg.elems) {
      const int* dd = d_space.element_dofs(elem);
      for (int kk = 1; kk <= n; ++kk) {
        const double t0 = ns.nodes[kk - 1], t1 = ns.nodes[kk];
        double acc = 0.0;
        for (size_t q = 0; q < r.points.size(); ++q) {
          const double tau = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * r.points[q];
          auto x = edge_point(mesh, wg, elem, tau);
          acc += r.weights[q] * u_normal(x[0], x[1]) * edge_tangent(mesh, wg, elem, tau).norm();
        }
        const int ld = wg.vertical ? d_space.local_flux_x(a_fixed, kk)
                                   : d_space.local_flux_y(kk, a_fixed);
        out.emplace_back(dd[ld], wg.sign * 0.5 * (t1 - t0) * acc);
      }
    }
  }
  return out;
}

std::vector<std::pair<int, double>> essential_node_values(const FunctionSpace& c_space,
                                                          const WallSet& walls,
                                                          const ScalarFn& omega_hat) {
  check_section_walls(c_space.mesh(), walls, "essential_node_values");
  const Mesh& mesh = c_space.mesh();
  const int n = c_space.degree();
  const NodeSet& ns = c_space.nodes1d();
  std::vector<std::pair<int, double>> out;
  for (int w = 0; w < 4; ++w) {
    if (!walls.walls[w]) continue;
    WallGeom wg = wall_geom(mesh, static_cast<Wall>(w));
    const int a_fixed = (wg.fixed > 0) ? n : 0;
    for (int elem : wg.elems) {
      const int* cd = c_space.element_dofs(elem);
      for (int b = 0; b <= n; ++b) {
        const double tau = ns.nodes[b];
        auto x = edge_point(mesh, wg, elem, tau);
        const int ld = wg.vertical ? c_space.local_node(a_fixed, b) : c_space.local_node(b, a_fixed);
        out.emplace_back(cd[ld], omega_hat(x[0], x[1]));
      }
    }
  }
  return out;
}

namespace ref {

SparseMat mass_matrix(const FunctionSpace& space, QuadConfig quad) {
  const Mesh& mesh = space.mesh();
  QuadRule r = gauss_nodes(quad.gauss_degree);
  const NodeSet& ns = space.nodes1d();
  const int n = space.degree();
  const int nl = space.local_dim();
  std::vector<Eigen::Triplet<double>> trips;

  auto basis_values = [&](int elem, double xi, double eta, std::vector<Eigen::Vector2d>& vals,
                          double& det) {
    auto js = mesh.jacobian_local(elem, xi, eta);
    det = js.det;
    vals.assign(nl, Eigen::Vector2d::Zero());
    switch (space.kind()) {
      case SpaceKind::C:
        for (int b = 0; b <= n; ++b)
          for (int a = 0; a <= n; ++a)
            vals[space.local_node(a, b)][0] = lagrange_eval(ns, a, xi) * lagrange_eval(ns, b, eta);
        break;
      case SpaceKind::S:
        for (int mm = 1; mm <= n; ++mm)
          for (int l = 1; l <= n; ++l)
            vals[space.local_cell(l, mm)][0] =
                edge_eval(ns, l, xi) * edge_eval(ns, mm, eta) / det;
        break;
      case SpaceKind::D:
        for (int kk = 1; kk <= n; ++kk)
          for (int a = 0; a <= n; ++a)
            vals[space.local_flux_x(a, kk)] =
                js.j * Eigen::Vector2d(lagrange_eval(ns, a, xi) * edge_eval(ns, kk, eta), 0.0) / det;
        for (int b = 0; b <= n; ++b)
          for (int l = 1; l <= n; ++l)
            vals[space.local_flux_y(l, b)] =
                js.j * Eigen::Vector2d(0.0, edge_eval(ns, l, xi) * lagrange_eval(ns, b, eta)) / det;
        break;
    }
  };

  std::vector<Eigen::Vector2d> vals;
  for (int elem = 0; elem < mesh.element_count(); ++elem) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nl, nl);
    for (size_t qy = 0; qy < r.points.size(); ++qy) {
      for (size_t qx = 0; qx < r.points.size(); ++qx) {
        double det = 0.0;
        basis_values(elem, r.points[qx], r.points[qy], vals, det);
        const double w = r.weights[qx] * r.weights[qy] * det;
        for (int j = 0; j < nl; ++j)
          for (int i = 0; i < nl; ++i) m(i, j) += w * vals[i].dot(vals[j]);
      }
    }
    const int* dofs = space.element_dofs(elem);
    for (int j = 0; j < nl; ++j)
      for (int i = 0; i < nl; ++i)
        if (m(i, j) != 0.0) trips.emplace_back(dofs[i], dofs[j], m(i, j));
  }
  SparseMat out(space.dim(), space.dim());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

SparseMat convection_matrix(const Field& omega, const FunctionSpace& d_space, QuadConfig quad) {
  const Mesh& mesh = d_space.mesh();
  QuadRule r = gauss_nodes(quad.gauss_degree);
  const NodeSet& ns = d_space.nodes1d();
  const int n = d_space.degree();
  const int nl = d_space.local_dim();
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<Eigen::Vector2d> vals(nl);
  for (int elem = 0; elem < mesh.element_count(); ++elem) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nl, nl);
    for (size_t qy = 0; qy < r.points.size(); ++qy) {
      for (size_t qx = 0; qx < r.points.size(); ++qx) {
        const double xi = r.points[qx], eta = r.points[qy];
        auto js = mesh.jacobian_local(elem, xi, eta);
        for (int kk = 1; kk <= n; ++kk)
          for (int a = 0; a <= n; ++a)
            vals[d_space.local_flux_x(a, kk)] =
                js.j * Eigen::Vector2d(lagrange_eval(ns, a, xi) * edge_eval(ns, kk, eta), 0.0) /
                js.det;
        for (int b = 0; b <= n; ++b)
          for (int l = 1; l <= n; ++l)
            vals[d_space.local_flux_y(l, b)] =
                js.j * Eigen::Vector2d(0.0, edge_eval(ns, l, xi) * lagrange_eval(ns, b, eta)) /
                js.det;
        const double w = reconstruct_scalar(omega, elem, xi, eta);
        const double wdet = r.weights[qx] * r.weights[qy] * js.det * w;
        for (int j = 0; j < nl; ++j)
          for (int i = 0; i < nl; ++i)
            m(i, j) += wdet * (vals[j][0] * vals[i][1] - vals[j][1] * vals[i][0]);
      }
    }
    const int* dofs = d_space.element_dofs(elem);
    for (int j = 0; j < nl; ++j)
      for (int i = 0; i < nl; ++i)
        if (m(i, j) != 0.0) trips.emplace_back(dofs[i], dofs[j], m(i, j));
  }
  SparseMat out(d_space.dim(), d_space.dim());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

}  // namespace ref

}  // namespace meevc::assembly
