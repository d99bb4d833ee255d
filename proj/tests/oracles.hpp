#pragma once

// Reference implementations used only by tests. They share no code with the
// library's solvers.

#include "transop/graph.hpp"
#include "transop/linalg.hpp"
#include "transop/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

namespace oracle {

using transop::Index;
using transop::Matrix;
using transop::Vector;

struct SymEig {
  Vector values;   // descending
  Matrix vectors;  // columns
};

// Cyclic Jacobi rotations on a symmetric matrix.
inline SymEig jacobi(Matrix a, int sweeps = 100) {
  const Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  for (int s = 0; s < sweeps; ++s) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Index x, Index y) { return a(x, x) > a(y, y); });
  SymEig out{Vector(n), Matrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    out.values[i] = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

// Eigenvalues of A self-adjoint under weight w, via the Jacobi oracle.
inline SymEig weighted_jacobi(const Matrix& a, const Vector& w) {
  const Vector s = w.cwiseSqrt();
  Matrix sym = s.asDiagonal() * a * s.cwiseInverse().asDiagonal();
  sym = 0.5 * (sym + sym.transpose());
  SymEig e = jacobi(sym);
  e.vectors = s.cwiseInverse().asDiagonal() * e.vectors;
  return e;
}

// Closed-form exp(tau L) for L = [[-a, a], [b, -b]].
inline Matrix two_state_exp(double a, double b, double tau) {
  const double r = a + b;
  const double e = std::exp(-r * tau);
  Matrix m(2, 2);
  m << (b + a * e) / r, (a - a * e) / r, (b - b * e) / r, (a + b * e) / r;
  return m;
}

// Multiset distance by greedy nearest matching.
inline double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return 1e300;
  double worst = 0.0;
  for (const auto& x : a) {
    auto best = b.begin();
    for (auto it = b.begin(); it != b.end(); ++it)
      if (std::abs(*it - x) < std::abs(*best - x)) best = it;
    worst = std::max(worst, std::abs(*best - x));
    b.erase(best);
  }
  return worst;
}

inline transop::Graph triangle() {
  return transop::Graph::from_edges(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}, false);
}

inline transop::Graph path3() {
  return transop::Graph::from_edges(3, {{0, 1, 1}, {1, 2, 1}}, false);
}

inline transop::Graph cycle3() {
  return transop::Graph::from_edges(3, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}}, true);
}

// Two triangles {0,1,2} and {3,4,5} joined by the edge 2-3.
inline transop::Graph barbell(double bridge) {
  return transop::Graph::from_edges(
      6, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}, {2, 3, bridge}}, false);
}

// Two K_m cliques joined by a path of `path` vertices (networkx barbell_graph).
inline transop::Graph barbell_graph(int m, int path) {
  std::vector<transop::Edge> e;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) e.push_back({i, j, 1.0});
  const int off = m + path;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) e.push_back({off + i, off + j, 1.0});
  int prev = m - 1;
  for (int p = 0; p < path; ++p) {
    e.push_back({prev, m + p, 1.0});
    prev = m + p;
  }
  e.push_back({prev, off, 1.0});
  return transop::Graph::from_edges(2 * m + path, e, false);
}

// Random graph with every vertex having an in- and an out-edge.
inline transop::Graph random_graph(transop::Rng& rng, Index n, bool directed, double density = 0.3) {
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (rng.uniform() < density) w(i, j) = rng.uniform(0.1, 2.0);
  // A random cycle guarantees connectivity and positive in/out degrees.
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (Index i = n - 1; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)], perm[rng.below(static_cast<std::uint64_t>(i + 1))]);
  for (Index i = 0; i < n; ++i) {
    const Index a = perm[static_cast<std::size_t>(i)];
    const Index b = perm[static_cast<std::size_t>((i + 1) % n)];
    if (w(a, b) == 0.0) w(a, b) = rng.uniform(0.1, 2.0);
  }
  if (!directed) {
    Matrix s = w + w.transpose();
    return transop::Graph::from_dense(s, false);
  }
  return transop::Graph::from_dense(w, true);
}

inline Vector random_density(transop::Rng& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.uniform(0.05, 1.0);
  return v / v.sum();
}

}  // namespace oracle
