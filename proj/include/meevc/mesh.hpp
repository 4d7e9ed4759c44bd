#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "meevc/polybasis.hpp"

namespace meevc {

/// Mapped K x K quadrilateral mesh on the reference square [0,1]^2.
/// The physical map is
///   x = offset_x + alpha * (r + c/2 sin(2 pi r) sin(2 pi s))
///   y = offset_y + alpha * (s + c/2 sin(2 pi r) sin(2 pi s))
/// optionally preceded by per-direction monotone element spacing.
struct MeshConfig {
  int elements_per_side = 1;                  // K
  double deformation = 0.0;                   // c, 0 <= c <= 0.3
  double scale = 1.0;                         // alpha > 0
  std::array<bool, 2> periodic{false, false};
  std::array<double, 2> offset{0.0, 0.0};
  // Optional K+1 strictly increasing breakpoints in [0,1] per direction;
  // empty means uniform spacing i/K.
  std::vector<double> spacing_x;
  std::vector<double> spacing_y;
};

struct JacobianSample {
  Eigen::Matrix2d j;  // dx/d(r,s)
  double det = 0.0;
};

struct PhysicalQuadPoint {
  Eigen::Vector2d physical;
  Eigen::Vector2d reference;  // global (r,s)
  JacobianSample jac;
  double weight;  // reference-measure weight (sum over cell = cell area in (r,s))
};

class Mesh {
 public:
  explicit Mesh(MeshConfig cfg);

  const MeshConfig& config() const { return cfg_; }
  int side_count() const { return cfg_.elements_per_side; }
  int element_count() const { return cfg_.elements_per_side * cfg_.elements_per_side; }
  bool periodic_x() const { return cfg_.periodic[0]; }
  bool periodic_y() const { return cfg_.periodic[1]; }

  int element_id(int ex, int ey) const { return ey * side_count() + ex; }
  std::array<int, 2> element_xy(int elem) const {
    return {elem % side_count(), elem / side_count()};
  }

  /// Reference-cell bounds of an element in the global [0,1]^2 square.
  std::array<double, 2> cell_x(int ex) const { return {breaks_x_[ex], breaks_x_[ex + 1]}; }
  std::array<double, 2> cell_y(int ey) const { return {breaks_y_[ey], breaks_y_[ey + 1]}; }

  Eigen::Vector2d map_point(double r, double s) const;
  JacobianSample jacobian_global(double r, double s) const;

  /// Global (r,s) of a local point (xi,eta) in [-1,1]^2 of an element.
  Eigen::Vector2d local_to_global(int elem, double xi, double eta) const;
  Eigen::Vector2d map_local(int elem, double xi, double eta) const;
  /// Full derivative dx/d(xi,eta), chaining the cell scaling.
  JacobianSample jacobian_local(int elem, double xi, double eta) const;

  std::vector<PhysicalQuadPoint> physical_quadrature(int elem, const QuadRule& rule) const;

  /// Mesh summary (config echo + element count) as a JSON string.
  std::string summary_json() const;
  /// Sampled mapping grid (r,s,x,y rows) as CSV text.
  std::string grid_csv(int samples_per_side) const;

 private:
  MeshConfig cfg_;
  std::vector<double> breaks_x_;
  std::vector<double> breaks_y_;
};

Mesh build_mesh(const MeshConfig& cfg);

/// Symmetric tanh-graded breakpoints clustering elements toward both
/// ends of [0,1]; beta controls the strength (beta -> 0 is uniform).
std::vector<double> tanh_spacing(int elements, double beta);

}  // namespace meevc
