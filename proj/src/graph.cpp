#include "transop/graph.hpp"

#include "transop/error.hpp"
#include "transop/operators.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace transop {

namespace {

std::string edge_name(Index s, Index d) {
  return "(" + std::to_string(s) + ", " + std::to_string(d) + ")";
}

void sort_and_check(std::vector<std::vector<Edge>>& adj) {
  for (auto& list : adj) {
    std::sort(list.begin(), list.end(), [](const Edge& a, const Edge& b) { return a.dst < b.dst; });
    for (std::size_t k = 1; k < list.size(); ++k) {
      require(list[k].dst != list[k - 1].dst, Errc::precondition,
              "duplicate edge " + edge_name(list[k].src, list[k].dst));
    }
  }
}

std::vector<char> reachable(const Graph& g, Index start, bool reverse) {
  const Index n = g.size();
  std::vector<std::vector<Index>> rev;
  if (reverse) {
    rev.resize(static_cast<std::size_t>(n));
    for (Index v = 0; v < n; ++v) {
      for (const Edge& e : g.out_edges(v)) rev[static_cast<std::size_t>(e.dst)].push_back(v);
    }
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<Index> stack{start};
  seen[static_cast<std::size_t>(start)] = 1;
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    auto visit = [&](Index w) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    };
    if (reverse) {
      for (Index w : rev[static_cast<std::size_t>(v)]) visit(w);
    } else {
      for (const Edge& e : g.out_edges(v)) visit(e.dst);
    }
  }
  return seen;
}

}  // namespace

Graph Graph::from_edges(Index n, const std::vector<Edge>& edges, bool directed) {
  require(n >= 0, Errc::precondition, "vertex count must be nonnegative");
  Graph g;
  g.n_ = n;
  g.directed_ = directed;
  g.adj_.resize(static_cast<std::size_t>(n));
  for (const Edge& e : edges) {
    require(e.src >= 0 && e.src < n && e.dst >= 0 && e.dst < n, Errc::precondition,
            "edge " + edge_name(e.src, e.dst) + " references a vertex outside [0, " +
                std::to_string(n) + ")");
    require(e.weight > 0.0 && std::isfinite(e.weight), Errc::precondition,
            "edge " + edge_name(e.src, e.dst) + " has non-positive weight");
    g.adj_[static_cast<std::size_t>(e.src)].push_back(e);
    if (!directed && e.src != e.dst) {
      g.adj_[static_cast<std::size_t>(e.dst)].push_back({e.dst, e.src, e.weight});
    }
  }
  sort_and_check(g.adj_);
  return g;
}

Graph Graph::from_dense(const Matrix& w, bool directed) {
  require(w.rows() == w.cols(), Errc::shape_mismatch, "adjacency matrix must be square");
  const Index n = w.rows();
  if (!directed) {
    require(max_abs(w - w.transpose()) == 0.0, Errc::precondition,
            "undirected adjacency must be exactly symmetric");
  }
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = directed ? 0 : i; j < n; ++j) {
      require(w(i, j) >= 0.0, Errc::precondition, "adjacency has a negative weight");
      if (w(i, j) > 0.0) edges.push_back({i, j, w(i, j)});
    }
  }
  return from_edges(n, edges, directed);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (const auto& list : adj_) out.insert(out.end(), list.begin(), list.end());
  return out;
}

std::vector<Edge> Graph::canonical_edges() const {
  if (directed_) return edges();
  std::vector<Edge> out;
  for (const auto& list : adj_) {
    for (const Edge& e : list) {
      if (e.src <= e.dst) out.push_back(e);
    }
  }
  return out;
}

std::size_t Graph::edge_count() const {
  std::size_t total = 0;
  for (const auto& list : adj_) total += list.size();
  return total;
}

Matrix Graph::dense() const {
  require(n_ <= dense_limit, Errc::too_large,
          "graph with " + std::to_string(n_) + " vertices exceeds the dense limit " +
              std::to_string(dense_limit));
  Matrix w = Matrix::Zero(n_, n_);
  for (const auto& list : adj_) {
    for (const Edge& e : list) w(e.src, e.dst) = e.weight;
  }
  return w;
}

double out_degree(const Graph& g, Index x) {
  require(x >= 0 && x < g.size(), Errc::precondition, "vertex out of range");
  double d = 0.0;
  for (const Edge& e : g.out_edges(x)) d += e.weight;
  return d;
}

Vector out_degrees(const Graph& g) {
  Vector d(g.size());
  for (Index v = 0; v < g.size(); ++v) d[v] = out_degree(g, v);
  return d;
}

Matrix transition_matrix(const Graph& g) {
  Matrix s = g.dense();
  for (Index i = 0; i < g.size(); ++i) {
    const double d = s.row(i).sum();
    require(d > 0.0, Errc::dangling_vertex,
            "vertex " + std::to_string(i) + " has zero out-degree");
    s.row(i) /= d;
  }
  return s;
}

bool is_strongly_connected(const Graph& g) {
  if (g.size() == 0) return false;
  const auto fwd = reachable(g, 0, false);
  const auto bwd = reachable(g, 0, true);
  return std::all_of(fwd.begin(), fwd.end(), [](char c) { return c != 0; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](char c) { return c != 0; });
}

Index graph_period(const Graph& g) {
  require(is_strongly_connected(g), Errc::no_unique_invariant, "graph is not strongly connected");
  const Index n = g.size();
  std::vector<Index> level(static_cast<std::size_t>(n), -1);
  std::queue<Index> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const Index v = q.front();
    q.pop();
    for (const Edge& e : g.out_edges(v)) {
      if (level[static_cast<std::size_t>(e.dst)] < 0) {
        level[static_cast<std::size_t>(e.dst)] = level[static_cast<std::size_t>(v)] + 1;
        q.push(e.dst);
      }
    }
  }
  Index period = 0;
  for (Index v = 0; v < n; ++v) {
    for (const Edge& e : g.out_edges(v)) {
      const Index diff = level[static_cast<std::size_t>(v)] + 1 - level[static_cast<std::size_t>(e.dst)];
      period = std::gcd(period, diff < 0 ? -diff : diff);
    }
  }
  return period;
}

Vector invariant_density(const Graph& g, DensityMethod method) {
  const Index n = g.size();
  require(n >= 1, Errc::precondition, "graph has no vertices");
  if (method == DensityMethod::degree_formula) {
    require(!g.directed(), Errc::unsupported_configuration,
            "degree formula requires an undirected graph");
    const Vector d = out_degrees(g);
    for (Index v = 0; v < n; ++v) {
      require(d[v] > 0.0, Errc::dangling_vertex, "vertex " + std::to_string(v) + " is isolated");
    }
    require(is_strongly_connected(g), Errc::no_unique_invariant, "graph is not connected");
    return d / d.sum();
  }
  require(is_strongly_connected(g), Errc::no_unique_invariant,
          "graph is reducible, so the invariant density is not unique");
  const Matrix s = transition_matrix(g);
  // (S^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  Matrix a = s.transpose() - Matrix::Identity(n, n);
  a.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::PartialPivLU<Matrix> lu(a);
  Vector pi = lu.solve(rhs);
  pi += lu.solve(rhs - a * pi);
  for (Index v = 0; v < n; ++v) {
    if (pi[v] < 0.0 && pi[v] > -1e-14) pi[v] = 0.0;
  }
  pi /= pi.sum();
  const double residual = (s.transpose() * pi - pi).cwiseAbs().maxCoeff();
  require(pi.allFinite() && pi.minCoeff() >= 0.0 && residual < 1e-10, Errc::convergence,
          "invariant density solve left residual " + std::to_string(residual));
  return pi;
}

ReversibilityCheck is_reversible(const Graph& g, const Vector& pi, double tol) {
  require(pi.size() == g.size(), Errc::shape_mismatch, "density length does not match graph");
  require(pi.minCoeff() > 0.0, Errc::degenerate_density, "density must be strictly positive");
  const Matrix s = transition_matrix(g);
  const Matrix flux = pi.asDiagonal() * s;
  const double worst = max_abs(flux - flux.transpose());
  return {worst <= tol, worst};
}

Graph nonreversible_perturbation(const Graph& g, const Matrix& m) {
  require(!g.directed(), Errc::precondition, "perturbation requires an undirected graph");
  const Index n = g.size();
  require(m.rows() == n && m.cols() == n, Errc::shape_mismatch, "circulation must be n x n");
  for (Index i = 0; i < n; ++i) {
    require(std::abs(m.row(i).sum()) <= 1e-12, Errc::infeasible_circulation,
            "circulation row " + std::to_string(i) + " does not sum to zero");
    require(std::abs(m.col(i).sum()) <= 1e-12, Errc::infeasible_circulation,
            "circulation column " + std::to_string(i) + " does not sum to zero");
  }
  const Matrix w = g.dense() + m;
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (w(i, j) < -1e-12) {
        std::ostringstream os;
        os << "perturbed weight of edge " << edge_name(i, j) << " is negative (" << w(i, j) << ")";
        fail(Errc::infeasible_circulation, os.str());
      }
      if (w(i, j) > 1e-12) edges.push_back({i, j, w(i, j)});
    }
  }
  return Graph::from_edges(n, edges, true);
}

void LayeredGraph::validate() const {
  require(!layers.empty(), Errc::precondition, "layered graph needs at least one layer");
  require(times.empty() || times.size() == layers.size(), Errc::shape_mismatch,
          "need one time label per layer");
  for (const Graph& g : layers) {
    require(g.size() == layers.front().size(), Errc::shape_mismatch,
            "all layers must share the vertex set");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    require(times[k] > times[k - 1], Errc::precondition, "layer times must be strictly increasing");
  }
}

OperatorBundle layered_forward_backward(const LayeredGraph& lg, const Vector& mu0) {
  lg.validate();
  const Index n = lg.size();
  require(mu0.size() == n, Errc::shape_mismatch, "initial density does not match the layers");
  require(mu0.minCoeff() > 0.0, Errc::degenerate_density, "initial density must be positive");
  Matrix k_total = Matrix::Identity(n, n);
  Vector mu = mu0;
  for (std::size_t l = 0; l < lg.layers.size(); ++l) {
    const Matrix s = transition_matrix(lg.layers[l]);
    k_total = k_total * s;
    mu = s.transpose() * mu;
    for (Index v = 0; v < n; ++v) {
      require(mu[v] > 0.0, Errc::degenerate_density,
              "propagated density vanishes at vertex " + std::to_string(v) + " after layer " +
                  std::to_string(l));
    }
  }
  OperatorBundle b;
  b.K = k_total;
  b.P = k_total.transpose();
  b.mu = mu0;
  b.nu = mu;
  b.T = mu.cwiseInverse().asDiagonal() * b.P * mu0.asDiagonal();
  b.F = b.K * b.T;
  b.B = b.T * b.K;
  b.provenance = {Provenance::Kind::exact, "layered"};
  return b;
}

Matrix supra_laplacian(const LayeredGraph& lg, double omega, LaplacianKind kind,
                       const std::optional<Vector>& mu0) {
  lg.validate();
  require(omega >= 0.0 && std::isfinite(omega), Errc::precondition, "omega must be nonnegative");
  const Index n = lg.size();
  const auto layers = static_cast<Index>(lg.layers.size());
  require(n * layers <= Graph::dense_limit, Errc::too_large, "supra-Laplacian exceeds the dense limit");
  Matrix supra = Matrix::Zero(n * layers, n * layers);
  Vector mu = mu0 ? *mu0 : Vector::Constant(n, 1.0 / static_cast<double>(n));
  for (Index l = 0; l < layers; ++l) {
    const Matrix s = transition_matrix(lg.layers[static_cast<std::size_t>(l)]);
    Matrix q = s;
    if (kind == LaplacianKind::forward_backward) {
      q = operator_bundle(s, Density::normalized(mu)).F;
      if (mu0) mu = s.transpose() * mu;
    }
    const double neighbours = (l > 0 ? 1.0 : 0.0) + (l + 1 < layers ? 1.0 : 0.0);
    const double norm = 1.0 + omega * neighbours;
    supra.block(l * n, l * n, n, n) = q / norm;
    if (l > 0) supra.block(l * n, (l - 1) * n, n, n).diagonal().setConstant(omega / norm);
    if (l + 1 < layers) supra.block(l * n, (l + 1) * n, n, n).diagonal().setConstant(omega / norm);
  }
  return Matrix::Identity(n * layers, n * layers) - supra;
}

}  // namespace transop
