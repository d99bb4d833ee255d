#pragma once

#include "transop/bundle.hpp"
#include "transop/linalg.hpp"

#include <optional>
#include <vector>

namespace transop {

struct Edge {
  Index src = 0;
  Index dst = 0;
  double weight = 0.0;
};

/// Weighted graph stored as sorted out-adjacency lists. Undirected graphs keep
/// both orientations of every edge (self-loops once).
class Graph {
 public:
  /// Largest n for which dense conversions are allowed.
  static constexpr Index dense_limit = 4096;

  Graph() = default;
  /// For undirected graphs each edge is listed once and mirrored here;
  /// listing both orientations is a duplicate.
  static Graph from_edges(Index n, const std::vector<Edge>& edges, bool directed);
  /// Nonzero entries of W become edges; undirected requires W symmetric.
  static Graph from_dense(const Matrix& w, bool directed);

  Index size() const { return n_; }
  bool directed() const { return directed_; }
  const std::vector<Edge>& out_edges(Index v) const { return adj_[static_cast<std::size_t>(v)]; }
  /// All stored (directed) edges sorted by (src, dst).
  std::vector<Edge> edges() const;
  /// Each undirected edge once (src <= dst); all edges when directed.
  std::vector<Edge> canonical_edges() const;
  std::size_t edge_count() const;

  Matrix dense() const;

 private:
  Index n_ = 0;
  bool directed_ = true;
  std::vector<std::vector<Edge>> adj_;
};

double out_degree(const Graph& g, Index x);
Vector out_degrees(const Graph& g);

/// S[i][j] = w(i,j) / d(i).
Matrix transition_matrix(const Graph& g);

bool is_strongly_connected(const Graph& g);
/// gcd of cycle lengths of a strongly connected graph (1 = aperiodic).
Index graph_period(const Graph& g);

enum class DensityMethod { degree_formula, eigensolve };

Vector invariant_density(const Graph& g, DensityMethod method);

struct ReversibilityCheck {
  bool reversible = false;
  double max_violation = 0.0;
};

ReversibilityCheck is_reversible(const Graph& g, const Vector& pi, double tol = 1e-10);

/// Directed graph with weights w + m for an undirected g and a circulation m
/// (zero row and column sums).
Graph nonreversible_perturbation(const Graph& g, const Matrix& m);

struct LayeredGraph {
  std::vector<Graph> layers;
  std::vector<double> times;

  Index size() const { return layers.empty() ? 0 : layers.front().size(); }
  void validate() const;
};

/// K_total = K_1 ... K_L, T_total = D_nu^-1 K_total^T D_mu0 with nu = mu0
/// pushed through every layer; F = K_total T_total. Returns the full bundle.
OperatorBundle layered_forward_backward(const LayeredGraph& lg, const Vector& mu0);

enum class LaplacianKind { random_walk, forward_backward };

/// Block matrix I - S_supra. Diagonal blocks hold each layer's S_k (or F_k,
/// built against mu0 propagated to that layer, uniform when absent), layers
/// k and k+1 are coupled by omega I in both directions, and rows are
/// renormalized by 1 + omega * (number of neighbouring layers).
Matrix supra_laplacian(const LayeredGraph& lg, double omega, LaplacianKind kind,
                       const std::optional<Vector>& mu0 = std::nullopt);

}  // namespace transop
