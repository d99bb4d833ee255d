#pragma once

#include "transop/bundle.hpp"
#include "transop/linalg.hpp"

namespace transop {

/// Strictly positive probability vector.
struct Density {
  enum class Label { uniform, invariant, custom };

  Vector values;
  Label label = Label::custom;

  static Density uniform(Index n);
  /// Validates positivity and unit mass (1e-12).
  static Density make(Vector values, Label label = Label::custom);
  /// Rescales to unit mass before validating.
  static Density normalized(Vector values, Label label = Label::custom);

  Index size() const { return values.size(); }
};

/// P = S^T, K = S, T = D_nu^-1 S^T D_mu, F = K T, B = T K with nu = S^T mu.
OperatorBundle operator_bundle(const Matrix& s, const Density& mu);

Matrix random_walk_laplacian(const Matrix& s);
Matrix forward_backward_laplacian(const OperatorBundle& bundle);

/// exp(tau L) for a rate matrix L (nonnegative off-diagonal, zero row sums).
Matrix rate_matrix_exponential(const Matrix& l, double tau);

/// Central-difference -grad V . grad f + beta^-1 Laplacian f on the interior
/// nodes of a uniform 2D grid. v(i, j) and f(i, j) sample node
/// (x0 + i h, y0 + j h); the result is (nx - 2) x (ny - 2).
Matrix apply_langevin_generator(const Matrix& v, double beta, const Matrix& f, double spacing);

}  // namespace transop
