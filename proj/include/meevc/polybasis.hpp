#pragma once

#include <span>
#include <vector>

namespace meevc {

/// Legendre polynomial L_n and its derivative at a point.
struct LegendrePair {
  double value;
  double deriv;
};

LegendrePair legendre(int n, double x);

/// Gauss-Lobatto-Legendre point set of degree N: the N+1 roots of
/// (1-x^2) L'_N(x) on [-1,1] with the matching quadrature weights and
/// precomputed barycentric weights for stable interpolation.
struct NodeSet {
  int degree = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> bary;
};

NodeSet gll_nodes(int degree);

/// Gauss-Legendre rule of NQ points, exact for polynomials of degree
/// 2*NQ - 1.
struct QuadRule {
  int degree = 0;
  std::vector<double> points;
  std::vector<double> weights;
};

QuadRule gauss_nodes(int degree);

/// Nodal (Lagrange) basis h_i, i = 0..N, with h_i(x_j) = delta_ij.
double lagrange_eval(const NodeSet& ns, int i, double x);
double lagrange_deriv(const NodeSet& ns, int i, double x);

/// Edge (histopolation) basis e_i, i = 1..N, defined as
/// e_i = -sum_{k<i} h'_k, with unit integral over the i-th GLL
/// sub-interval and zero over the others.
double edge_eval(const NodeSet& ns, int i, double x);

/// Values of every nodal and edge function at a list of points.
/// Row-major: h[i * npts + q] = h_i(pts[q]), e[(i-1) * npts + q] = e_i(pts[q]).
struct BasisTable {
  int degree = 0;
  int npts = 0;
  std::vector<double> h;
  std::vector<double> e;

  double node(int i, int q) const { return h[static_cast<size_t>(i) * npts + q]; }
  double edge(int i, int q) const { return e[static_cast<size_t>(i - 1) * npts + q]; }
};

BasisTable tabulate_basis(const NodeSet& ns, std::span<const double> pts);

}  // namespace meevc
