#include "meevc/polybasis.hpp"

#include <cmath>
#include <stdexcept>

namespace meevc {

LegendrePair legendre(int n, double x) {
  // Three-term recurrence for the value, companion recurrence for the
  // derivative: L'_{k+1} = L'_{k-1} + (2k+1) L_k. Stable on [-1,1].
  if (n == 0) return {1.0, 0.0};
  double pm1 = 1.0, p = x;
  double dm1 = 0.0, d = 1.0;
  for (int k = 1; k < n; ++k) {
    double pp1 = ((2 * k + 1) * x * p - k * pm1) / (k + 1);
    double dp1 = dm1 + (2 * k + 1) * p;
    pm1 = p;
    p = pp1;
    dm1 = d;
    d = dp1;
  }
  return {p, d};
}

NodeSet gll_nodes(int degree) {
  if (degree < 1) throw std::invalid_argument("gll_nodes: degree must be >= 1");
  const int n = degree;
  NodeSet ns;
  ns.degree = n;
  ns.nodes.assign(n + 1, 0.0);
  ns.weights.assign(n + 1, 0.0);
  ns.nodes[0] = -1.0;
  ns.nodes[n] = 1.0;

  // Interior nodes are the roots of L'_N. Newton iteration from
  // Chebyshev-Lobatto guesses; L''_N from the Legendre ODE.
  for (int i = 1; i < n; ++i) {
    double x = -std::cos(M_PI * i / n);
    for (int it = 0; it < 100; ++it) {
      auto lp = legendre(n, x);
      double d2 = (2.0 * x * lp.deriv - n * (n + 1.0) * lp.value) / (1.0 - x * x);
      double dx = lp.deriv / d2;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
      if (it == 99) throw std::runtime_error("gll_nodes: Newton did not converge");
    }
    ns.nodes[i] = x;
  }
  // Symmetrize so paired nodes are exact negatives.
  for (int i = 0; 2 * i < n; ++i) {
    double a = 0.5 * (ns.nodes[i] - ns.nodes[n - i]);
    ns.nodes[i] = a;
    ns.nodes[n - i] = -a;
  }
  if (n % 2 == 0) ns.nodes[n / 2] = 0.0;

  for (int i = 0; i <= n; ++i) {
    double ln = legendre(n, ns.nodes[i]).value;
    ns.weights[i] = 2.0 / (n * (n + 1.0) * ln * ln);
  }

  // Barycentric weights, normalized to unit max magnitude.
  ns.bary.assign(n + 1, 1.0);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j)
      if (j != i) ns.bary[i] /= (ns.nodes[i] - ns.nodes[j]);
  }
  double bmax = 0.0;
  for (double b : ns.bary) bmax = std::max(bmax, std::abs(b));
  for (double& b : ns.bary) b /= bmax;
  return ns;
}

QuadRule gauss_nodes(int degree) {
  if (degree < 1) throw std::invalid_argument("gauss_nodes: degree must be >= 1");
  const int n = degree;
  QuadRule q;
  q.degree = n;
  q.points.assign(n, 0.0);
  q.weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // Roots of L_n; classic asymptotic initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto lp = legendre(n, x);
      double dx = lp.value / lp.deriv;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
      if (it == 99) throw std::runtime_error("gauss_nodes: Newton did not converge");
    }
    auto lp = legendre(n, x);
    q.points[n - 1 - i] = x;
    q.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * lp.deriv * lp.deriv);
  }
  for (int i = 0; 2 * i < n; ++i) {
    double a = 0.5 * (q.points[i] - q.points[n - 1 - i]);
    q.points[i] = a;
    q.points[n - 1 - i] = -a;
    double w = 0.5 * (q.weights[i] + q.weights[n - 1 - i]);
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) q.points[n / 2] = 0.0;
  return q;
}

namespace {

// Index of a node within snapping distance of x, or -1.
int near_node(const NodeSet& ns, double x) {
  for (int j = 0; j <= ns.degree; ++j)
    if (std::abs(x - ns.nodes[j]) < 1e-14) return j;
  return -1;
}

}  // namespace

double lagrange_eval(const NodeSet& ns, int i, double x) {
  int m = near_node(ns, x);
  if (m >= 0) return m == i ? 1.0 : 0.0;
  double num = ns.bary[i] / (x - ns.nodes[i]);
  double den = 0.0;
  for (int j = 0; j <= ns.degree; ++j) den += ns.bary[j] / (x - ns.nodes[j]);
  return num / den;
}

double lagrange_deriv(const NodeSet& ns, int i, double x) {
  int m = near_node(ns, x);
  if (m >= 0) {
    // Differentiation-matrix entries at the nodes.
    if (i != m) return (ns.bary[i] / ns.bary[m]) / (ns.nodes[m] - ns.nodes[i]);
    double sum = 0.0;
    for (int j = 0; j <= ns.degree; ++j)
      if (j != m) sum += (ns.bary[j] / ns.bary[m]) / (ns.nodes[m] - ns.nodes[j]);
    return -sum;
  }
  // h_i = (b_i/(x-x_i)) / s with s = sum b_j/(x-x_j);
  // h'_i = h_i * (t/s - 1/(x-x_i)) with t = sum b_j/(x-x_j)^2.
  double s = 0.0, t = 0.0;
  for (int j = 0; j <= ns.degree; ++j) {
    double r = ns.bary[j] / (x - ns.nodes[j]);
    s += r;
    t += r / (x - ns.nodes[j]);
  }
  double hi = (ns.bary[i] / (x - ns.nodes[i])) / s;
  return hi * (t / s - 1.0 / (x - ns.nodes[i]));
}

double edge_eval(const NodeSet& ns, int i, double x) {
  if (i < 1 || i > ns.degree) throw std::invalid_argument("edge_eval: index out of range");
  double sum = 0.0;
  for (int k = 0; k < i; ++k) sum += lagrange_deriv(ns, k, x);
  return -sum;
}

BasisTable tabulate_basis(const NodeSet& ns, std::span<const double> pts) {
  BasisTable t;
  t.degree = ns.degree;
  t.npts = static_cast<int>(pts.size());
  t.h.assign(static_cast<size_t>(ns.degree + 1) * t.npts, 0.0);
  t.e.assign(static_cast<size_t>(ns.degree) * t.npts, 0.0);
  for (int q = 0; q < t.npts; ++q) {
    for (int i = 0; i <= ns.degree; ++i)
      t.h[static_cast<size_t>(i) * t.npts + q] = lagrange_eval(ns, i, pts[q]);
    // e_i = -sum_{k<i} h'_k accumulated once per point.
    double acc = 0.0;
    for (int i = 1; i <= ns.degree; ++i) {
      acc -= lagrange_deriv(ns, i - 1, pts[q]);
      t.e[static_cast<size_t>(i - 1) * t.npts + q] = acc;
    }
  }
  return t;
}

}  // namespace meevc
