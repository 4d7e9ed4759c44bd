#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstdint>
#include <vector>

#include "meevc/mesh.hpp"
#include "meevc/polybasis.hpp"

namespace meevc {

using SparseMat = Eigen::SparseMatrix<double>;

/// The three conforming spaces of the discrete complex
///   C (H(curl), continuous nodal scalars)
///     --curl--> D (H(div), normal-flux vectors)
///     --div---> S (L^2, cell volumes).
enum class SpaceKind { C, D, S };

enum class Wall : int { Left = 0, Right = 1, Bottom = 2, Top = 3 };

/// Subset of the four walls; boundary sections are unions of walls.
struct WallSet {
  std::array<bool, 4> walls{false, false, false, false};

  static WallSet none() { return {}; }
  static WallSet all() { return {{true, true, true, true}}; }
  static WallSet of(std::initializer_list<Wall> ws) {
    WallSet s;
    for (Wall w : ws) s.walls[static_cast<int>(w)] = true;
    return s;
  }
  bool contains(Wall w) const { return walls[static_cast<int>(w)]; }
  bool empty() const { return !walls[0] && !walls[1] && !walls[2] && !walls[3]; }
  bool intersects(const WallSet& o) const {
    for (int i = 0; i < 4; ++i)
      if (walls[i] && o.walls[i]) return true;
    return false;
  }
  WallSet united(const WallSet& o) const {
    WallSet s;
    for (int i = 0; i < 4; ++i) s.walls[i] = walls[i] || o.walls[i];
    return s;
  }
};

/// Families of D-space degrees of freedom: fluxes through constant-xi
/// (x-normal) and constant-eta (y-normal) sub-edges.
enum class FluxFamily : uint8_t { X, Y };

class FunctionSpace {
 public:
  FunctionSpace(const Mesh& mesh, int degree, SpaceKind kind);

  SpaceKind kind() const { return kind_; }
  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int dim() const { return dim_; }
  int local_dim() const { return local_dim_; }
  const NodeSet& nodes1d() const { return nodes_; }

  /// Global ids of an element's local DOFs, in the documented local order.
  const int* element_dofs(int elem) const { return ldof_.data() + static_cast<size_t>(elem) * local_dim_; }
  /// Element that owns a global DOF (first visitor in element order).
  int owner_element(int gdof) const { return owner_[gdof]; }

  /// DOFs whose support touches the given wall (trace DOFs). Throws if a
  /// requested wall lies in a periodic direction.
  std::vector<int> boundary_dofs(const WallSet& section) const;
  std::vector<int> boundary_dofs(Wall w) const { return boundary_dofs(WallSet::of({w})); }

  /// Local DOF index helpers (fixed local ordering).
  int local_node(int a, int b) const { return b * (degree_ + 1) + a; }                    // C
  int local_flux_x(int a, int k) const { return (k - 1) * (degree_ + 1) + a; }           // D
  int local_flux_y(int l, int b) const { return degree_ * (degree_ + 1) + b * degree_ + (l - 1); }
  int local_cell(int l, int m) const { return (m - 1) * degree_ + (l - 1); }              // S

 private:
  const Mesh* mesh_;
  int degree_;
  SpaceKind kind_;
  int dim_ = 0;
  int local_dim_ = 0;
  NodeSet nodes_;
  std::vector<int> ldof_;   // element-major local->global map
  std::vector<int> owner_;  // per global dof
  // wall membership bitmask per global dof (bit i = Wall i)
  std::vector<uint8_t> wall_mask_;

  void build_c();
  void build_d();
  void build_s();
};

FunctionSpace build_space(const Mesh& mesh, int degree, SpaceKind kind);

struct Field {
  const FunctionSpace* space = nullptr;
  Eigen::VectorXd coeffs;

  explicit Field(const FunctionSpace& s) : space(&s), coeffs(Eigen::VectorXd::Zero(s.dim())) {}
  Field(const FunctionSpace& s, Eigen::VectorXd c) : space(&s), coeffs(std::move(c)) {}
};

/// Topological curl: C -> D, entries in {-1,0,+1}. The reconstruction of
/// (curl w) is pointwise the analytic curl of the reconstruction of w.
SparseMat incidence_curl(const FunctionSpace& c_space, const FunctionSpace& d_space);
/// Topological divergence: D -> S, entries in {-1,0,+1}.
SparseMat incidence_div(const FunctionSpace& d_space, const FunctionSpace& s_space);

/// Pointwise reconstruction at a local point (xi,eta) in [-1,1]^2 of an
/// element. C fields are plain scalars, D fields map through the
/// contravariant Piola transform J/detJ, S fields scale by 1/detJ.
double reconstruct_scalar(const Field& f, int elem, double xi, double eta);
Eigen::Vector2d reconstruct_vector(const Field& f, int elem, double xi, double eta);

}  // namespace meevc
