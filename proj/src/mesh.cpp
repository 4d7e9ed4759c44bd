#include "meevc/mesh.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "meevc/io_format.hpp"

namespace meevc {

namespace {

std::vector<double> validate_spacing(const std::vector<double>& s, int k, const char* name) {
  if (s.empty()) {
    std::vector<double> u(k + 1);
    for (int i = 0; i <= k; ++i) u[i] = static_cast<double>(i) / k;
    return u;
  }
  if (static_cast<int>(s.size()) != k + 1)
    throw std::invalid_argument(std::string(name) + ": expected K+1 breakpoints");
  if (std::abs(s.front()) > 1e-14 || std::abs(s.back() - 1.0) > 1e-14)
    throw std::invalid_argument(std::string(name) + ": breakpoints must span [0,1]");
  for (size_t i = 1; i < s.size(); ++i)
    if (s[i] <= s[i - 1])
      throw std::invalid_argument(std::string(name) + ": breakpoints must be strictly increasing");
  auto out = s;
  out.front() = 0.0;
  out.back() = 1.0;
  return out;
}

}  // namespace

Mesh::Mesh(MeshConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.elements_per_side < 1) throw std::invalid_argument("mesh: K must be >= 1");
  if (cfg_.deformation < 0.0 || cfg_.deformation > 0.3)
    throw std::invalid_argument("mesh: deformation factor must be in [0, 0.3]");
  if (!(cfg_.scale > 0.0)) throw std::invalid_argument("mesh: scale must be positive");
  breaks_x_ = validate_spacing(cfg_.spacing_x, cfg_.elements_per_side, "spacing_x");
  breaks_y_ = validate_spacing(cfg_.spacing_y, cfg_.elements_per_side, "spacing_y");
}

Mesh build_mesh(const MeshConfig& cfg) { return Mesh(cfg); }

Eigen::Vector2d Mesh::map_point(double r, double s) const {
  const double c = cfg_.deformation, a = cfg_.scale;
  const double bump = 0.5 * c * std::sin(2.0 * M_PI * r) * std::sin(2.0 * M_PI * s);
  return {cfg_.offset[0] + a * (r + bump), cfg_.offset[1] + a * (s + bump)};
}

JacobianSample Mesh::jacobian_global(double r, double s) const {
  const double c = cfg_.deformation, a = cfg_.scale;
  const double pc = M_PI * c;
  const double dr = pc * std::cos(2.0 * M_PI * r) * std::sin(2.0 * M_PI * s);
  const double ds = pc * std::sin(2.0 * M_PI * r) * std::cos(2.0 * M_PI * s);
  JacobianSample out;
  out.j << a * (1.0 + dr), a * ds, a * dr, a * (1.0 + ds);
  out.det = out.j(0, 0) * out.j(1, 1) - out.j(0, 1) * out.j(1, 0);
  return out;
}

Eigen::Vector2d Mesh::local_to_global(int elem, double xi, double eta) const {
  auto [ex, ey] = element_xy(elem);
  auto cx = cell_x(ex);
  auto cy = cell_y(ey);
  return {cx[0] + 0.5 * (xi + 1.0) * (cx[1] - cx[0]), cy[0] + 0.5 * (eta + 1.0) * (cy[1] - cy[0])};
}

Eigen::Vector2d Mesh::map_local(int elem, double xi, double eta) const {
  auto rs = local_to_global(elem, xi, eta);
  return map_point(rs[0], rs[1]);
}

JacobianSample Mesh::jacobian_local(int elem, double xi, double eta) const {
  auto [ex, ey] = element_xy(elem);
  auto cx = cell_x(ex);
  auto cy = cell_y(ey);
  auto rs = local_to_global(elem, xi, eta);
  JacobianSample out = jacobian_global(rs[0], rs[1]);
  const double hx = 0.5 * (cx[1] - cx[0]);
  const double hy = 0.5 * (cy[1] - cy[0]);
  out.j.col(0) *= hx;
  out.j.col(1) *= hy;
  out.det *= hx * hy;
  return out;
}

std::vector<PhysicalQuadPoint> Mesh::physical_quadrature(int elem, const QuadRule& rule) const {
  if (rule.points.empty()) throw std::invalid_argument("physical_quadrature: empty rule");
  auto [ex, ey] = element_xy(elem);
  auto cx = cell_x(ex);
  auto cy = cell_y(ey);
  const double hx = 0.5 * (cx[1] - cx[0]);
  const double hy = 0.5 * (cy[1] - cy[0]);
  std::vector<PhysicalQuadPoint> pts;
  pts.reserve(rule.points.size() * rule.points.size());
  for (size_t qy = 0; qy < rule.points.size(); ++qy) {
    for (size_t qx = 0; qx < rule.points.size(); ++qx) {
      PhysicalQuadPoint p;
      const double r = cx[0] + hx * (rule.points[qx] + 1.0);
      const double s = cy[0] + hy * (rule.points[qy] + 1.0);
      p.reference = {r, s};
      p.physical = map_point(r, s);
      p.jac = jacobian_global(r, s);
      p.weight = rule.weights[qx] * rule.weights[qy] * hx * hy;
      pts.push_back(p);
    }
  }
  return pts;
}

std::string Mesh::summary_json() const {
  std::ostringstream os;
  os << "{\"elements_per_side\":" << cfg_.elements_per_side
     << ",\"element_count\":" << element_count()
     << ",\"deformation\":" << format_double(cfg_.deformation)
     << ",\"scale\":" << format_double(cfg_.scale)
     << ",\"periodic\":[" << (cfg_.periodic[0] ? "true" : "false") << ","
     << (cfg_.periodic[1] ? "true" : "false") << "]"
     << ",\"offset\":[" << format_double(cfg_.offset[0]) << "," << format_double(cfg_.offset[1])
     << "]"
     << ",\"uniform_spacing\":" << (cfg_.spacing_x.empty() && cfg_.spacing_y.empty() ? "true" : "false")
     << "}";
  return os.str();
}

std::string Mesh::grid_csv(int samples_per_side) const {
  std::ostringstream os;
  os << "r,s,x,y\n";
  const int n = samples_per_side;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double r = static_cast<double>(i) / (n - 1);
      const double s = static_cast<double>(j) / (n - 1);
      auto p = map_point(r, s);
      os << format_double(r) << ',' << format_double(s) << ',' << format_double(p[0]) << ','
         << format_double(p[1]) << '\n';
    }
  }
  return os.str();
}

std::vector<double> tanh_spacing(int elements, double beta) {
  if (elements < 1) throw std::invalid_argument("tanh_spacing: elements must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("tanh_spacing: beta must be positive");
  std::vector<double> b(elements + 1);
  const double t = std::tanh(beta);
  for (int i = 0; i <= elements; ++i) {
    double u = static_cast<double>(i) / elements;
    b[i] = 0.5 * (1.0 + std::tanh(beta * (2.0 * u - 1.0)) / t);
  }
  b.front() = 0.0;
  b.back() = 1.0;
  return b;
}

}  // namespace meevc
