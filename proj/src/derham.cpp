#include "meevc/derham.hpp"

#include <stdexcept>
#include <unordered_map>

namespace meevc {

namespace {

// Identification key for a shared geometric entity: family tag + lattice
// coordinates on the global (K*N) grid.
int64_t entity_key(int family, int64_t gx, int64_t gy) {
  return (static_cast<int64_t>(family) << 56) | (gx << 28) | gy;
}

}  // namespace

FunctionSpace::FunctionSpace(const Mesh& mesh, int degree, SpaceKind kind)
    : mesh_(&mesh), degree_(degree), kind_(kind), nodes_(gll_nodes(degree)) {
  if (degree < 1) throw std::invalid_argument("build_space: degree must be >= 1");
  switch (kind) {
    case SpaceKind::C: build_c(); break;
    case SpaceKind::D: build_d(); break;
    case SpaceKind::S: build_s(); break;
  }
}

FunctionSpace build_space(const Mesh& mesh, int degree, SpaceKind kind) {
  return FunctionSpace(mesh, degree, kind);
}

void FunctionSpace::build_c() {
  const int k = mesh_->side_count(), n = degree_;
  const int grid = k * n;
  local_dim_ = (n + 1) * (n + 1);
  ldof_.assign(static_cast<size_t>(mesh_->element_count()) * local_dim_, -1);
  std::unordered_map<int64_t, int> ids;
  ids.reserve(static_cast<size_t>(grid + 1) * (grid + 1));
  for (int elem = 0; elem < mesh_->element_count(); ++elem) {
    auto [ex, ey] = mesh_->element_xy(elem);
    for (int b = 0; b <= n; ++b) {
      for (int a = 0; a <= n; ++a) {
        int gx = ex * n + a, gy = ey * n + b;
        if (mesh_->periodic_x() && gx == grid) gx = 0;
        if (mesh_->periodic_y() && gy == grid) gy = 0;
        auto [it, fresh] = ids.try_emplace(entity_key(0, gx, gy), dim_);
        if (fresh) {
          owner_.push_back(elem);
          uint8_t mask = 0;
          if (!mesh_->periodic_x() && gx == 0) mask |= 1u << static_cast<int>(Wall::Left);
          if (!mesh_->periodic_x() && gx == grid) mask |= 1u << static_cast<int>(Wall::Right);
          if (!mesh_->periodic_y() && gy == 0) mask |= 1u << static_cast<int>(Wall::Bottom);
          if (!mesh_->periodic_y() && gy == grid) mask |= 1u << static_cast<int>(Wall::Top);
          wall_mask_.push_back(mask);
          ++dim_;
        }
        ldof_[static_cast<size_t>(elem) * local_dim_ + local_node(a, b)] = it->second;
      }
    }
  }
}

void FunctionSpace::build_d() {
  const int k = mesh_->side_count(), n = degree_;
  const int grid = k * n;
  local_dim_ = 2 * n * (n + 1);
  ldof_.assign(static_cast<size_t>(mesh_->element_count()) * local_dim_, -1);
  std::unordered_map<int64_t, int> ids;
  ids.reserve(static_cast<size_t>(2 * grid) * (grid + 1));
  for (int elem = 0; elem < mesh_->element_count(); ++elem) {
    auto [ex, ey] = mesh_->element_xy(elem);
    // x-normal fluxes: node index a along xi, cell index kk along eta.
    for (int kk = 1; kk <= n; ++kk) {
      for (int a = 0; a <= n; ++a) {
        int gx = ex * n + a, gcy = ey * n + (kk - 1);
        if (mesh_->periodic_x() && gx == grid) gx = 0;
        auto [it, fresh] = ids.try_emplace(entity_key(1, gx, gcy), dim_);
        if (fresh) {
          owner_.push_back(elem);
          uint8_t mask = 0;
          if (!mesh_->periodic_x() && gx == 0) mask |= 1u << static_cast<int>(Wall::Left);
          if (!mesh_->periodic_x() && gx == grid) mask |= 1u << static_cast<int>(Wall::Right);
          wall_mask_.push_back(mask);
          ++dim_;
        }
        ldof_[static_cast<size_t>(elem) * local_dim_ + local_flux_x(a, kk)] = it->second;
      }
    }
    // y-normal fluxes: cell index l along xi, node index b along eta.
    for (int b = 0; b <= n; ++b) {
      for (int l = 1; l <= n; ++l) {
        int gcx = ex * n + (l - 1), gy = ey * n + b;
        if (mesh_->periodic_y() && gy == grid) gy = 0;
        auto [it, fresh] = ids.try_emplace(entity_key(2, gcx, gy), dim_);
        if (fresh) {
          owner_.push_back(elem);
          uint8_t mask = 0;
          if (!mesh_->periodic_y() && gy == 0) mask |= 1u << static_cast<int>(Wall::Bottom);
          if (!mesh_->periodic_y() && gy == grid) mask |= 1u << static_cast<int>(Wall::Top);
          wall_mask_.push_back(mask);
          ++dim_;
        }
        ldof_[static_cast<size_t>(elem) * local_dim_ + local_flux_y(l, b)] = it->second;
      }
    }
  }
}

void FunctionSpace::build_s() {
  const int n = degree_;
  local_dim_ = n * n;
  const int nel = mesh_->element_count();
  ldof_.resize(static_cast<size_t>(nel) * local_dim_);
  dim_ = nel * local_dim_;
  owner_.resize(dim_);
  wall_mask_.assign(dim_, 0);
  for (int elem = 0; elem < nel; ++elem) {
    for (int i = 0; i < local_dim_; ++i) {
      int g = elem * local_dim_ + i;
      ldof_[static_cast<size_t>(elem) * local_dim_ + i] = g;
      owner_[g] = elem;
    }
  }
}

std::vector<int> FunctionSpace::boundary_dofs(const WallSet& section) const {
  for (int w = 0; w < 4; ++w) {
    if (!section.walls[w]) continue;
    const bool xdir = (w == 0 || w == 1);
    if ((xdir && mesh_->periodic_x()) || (!xdir && mesh_->periodic_y()))
      throw std::invalid_argument("boundary_dofs: wall lies in a periodic direction");
  }
  uint8_t want = 0;
  for (int w = 0; w < 4; ++w)
    if (section.walls[w]) want |= 1u << w;
  std::vector<int> out;
  for (int g = 0; g < dim_; ++g)
    if (wall_mask_[g] & want) out.push_back(g);
  return out;
}

SparseMat incidence_curl(const FunctionSpace& c_space, const FunctionSpace& d_space) {
  if (c_space.kind() != SpaceKind::C || d_space.kind() != SpaceKind::D ||
      &c_space.mesh() != &d_space.mesh() || c_space.degree() != d_space.degree())
    throw std::invalid_argument("incidence_curl: space mismatch");
  const int n = c_space.degree();
  std::vector<Eigen::Triplet<double>> trips;
  // Each flux row is written exactly once. Ownership alone is not enough:
  // on single-element periodic meshes an element is its own neighbor and
  // sees a shared dof at two local positions (the wrapped node columns
  // coincide, so either view produces the same row).
  std::vector<char> done(d_space.dim(), 0);
  for (int elem = 0; elem < c_space.mesh().element_count(); ++elem) {
    const int* cd = c_space.element_dofs(elem);
    const int* dd = d_space.element_dofs(elem);
    // curl w = (dw/dy, -dw/dx); per family, the 1D incidence pattern.
    for (int kk = 1; kk <= n; ++kk) {
      for (int a = 0; a <= n; ++a) {
        int row = dd[d_space.local_flux_x(a, kk)];
        if (done[row]) continue;
        done[row] = 1;
        trips.emplace_back(row, cd[c_space.local_node(a, kk)], 1.0);
        trips.emplace_back(row, cd[c_space.local_node(a, kk - 1)], -1.0);
      }
    }
    for (int b = 0; b <= n; ++b) {
      for (int l = 1; l <= n; ++l) {
        int row = dd[d_space.local_flux_y(l, b)];
        if (done[row]) continue;
        done[row] = 1;
        trips.emplace_back(row, cd[c_space.local_node(l, b)], -1.0);
        trips.emplace_back(row, cd[c_space.local_node(l - 1, b)], 1.0);
      }
    }
  }
  SparseMat e(d_space.dim(), c_space.dim());
  e.setFromTriplets(trips.begin(), trips.end());
  e.prune(0.0, 0.0);  // wrapped columns may cancel exactly
  e.makeCompressed();
  return e;
}

SparseMat incidence_div(const FunctionSpace& d_space, const FunctionSpace& s_space) {
  if (d_space.kind() != SpaceKind::D || s_space.kind() != SpaceKind::S ||
      &d_space.mesh() != &s_space.mesh() || d_space.degree() != s_space.degree())
    throw std::invalid_argument("incidence_div: space mismatch");
  const int n = d_space.degree();
  std::vector<Eigen::Triplet<double>> trips;
  for (int elem = 0; elem < d_space.mesh().element_count(); ++elem) {
    const int* dd = d_space.element_dofs(elem);
    const int* sd = s_space.element_dofs(elem);
    for (int m = 1; m <= n; ++m) {
      for (int l = 1; l <= n; ++l) {
        int row = sd[s_space.local_cell(l, m)];
        trips.emplace_back(row, dd[d_space.local_flux_x(l, m)], 1.0);
        trips.emplace_back(row, dd[d_space.local_flux_x(l - 1, m)], -1.0);
        trips.emplace_back(row, dd[d_space.local_flux_y(l, m)], 1.0);
        trips.emplace_back(row, dd[d_space.local_flux_y(l, m - 1)], -1.0);
      }
    }
  }
  SparseMat e(s_space.dim(), d_space.dim());
  e.setFromTriplets(trips.begin(), trips.end());
  e.prune(0.0, 0.0);  // wrapped columns may cancel exactly
  e.makeCompressed();
  return e;
}

double reconstruct_scalar(const Field& f, int elem, double xi, double eta) {
  const FunctionSpace& sp = *f.space;
  const int n = sp.degree();
  const int* dofs = sp.element_dofs(elem);
  const NodeSet& ns = sp.nodes1d();
  if (sp.kind() == SpaceKind::C) {
    double acc = 0.0;
    for (int b = 0; b <= n; ++b) {
      double hb = lagrange_eval(ns, b, eta);
      if (hb == 0.0) continue;
      for (int a = 0; a <= n; ++a)
        acc += f.coeffs[dofs[sp.local_node(a, b)]] * lagrange_eval(ns, a, xi) * hb;
    }
    return acc;
  }
  if (sp.kind() == SpaceKind::S) {
    double acc = 0.0;
    for (int m = 1; m <= n; ++m) {
      double em = edge_eval(ns, m, eta);
      for (int l = 1; l <= n; ++l)
        acc += f.coeffs[dofs[sp.local_cell(l, m)]] * edge_eval(ns, l, xi) * em;
    }
    return acc / sp.mesh().jacobian_local(elem, xi, eta).det;
  }
  throw std::invalid_argument("reconstruct_scalar: field is vector-valued");
}

Eigen::Vector2d reconstruct_vector(const Field& f, int elem, double xi, double eta) {
  const FunctionSpace& sp = *f.space;
  if (sp.kind() != SpaceKind::D)
    throw std::invalid_argument("reconstruct_vector: field is scalar-valued");
  const int n = sp.degree();
  const int* dofs = sp.element_dofs(elem);
  const NodeSet& ns = sp.nodes1d();
  Eigen::Vector2d uref{0.0, 0.0};
  for (int kk = 1; kk <= n; ++kk) {
    double ek = edge_eval(ns, kk, eta);
    for (int a = 0; a <= n; ++a)
      uref[0] += f.coeffs[dofs[sp.local_flux_x(a, kk)]] * lagrange_eval(ns, a, xi) * ek;
  }
  for (int b = 0; b <= n; ++b) {
    double hb = lagrange_eval(ns, b, eta);
    for (int l = 1; l <= n; ++l)
      uref[1] += f.coeffs[dofs[sp.local_flux_y(l, b)]] * edge_eval(ns, l, xi) * hb;
  }
  auto jac = sp.mesh().jacobian_local(elem, xi, eta);
  return jac.j * uref / jac.det;
}

}  // namespace meevc
