#pragma once

#include "transop/basis.hpp"
#include "transop/bundle.hpp"
#include "transop/dynamics.hpp"

#include <cstddef>
#include <vector>

namespace transop {

struct CovarianceSet {
  Matrix xx;
  Matrix xy;
  Matrix yx;
  Matrix yy;
  Index m = 0;
};

/// (1/m)-scaled empirical covariances of the n x m feature matrices.
CovarianceSet covariances(const Matrix& phi_x, const Matrix& phi_y, Exec exec = Exec::parallel);

inline constexpr double default_ridge = 1e-10;

/// K = (C_xx + eps I)^-1 C_xy, T = (C_yy + eps I)^-1 C_yx. With
/// indicator_basis set, mu and nu are the diagonals of C_xx and C_yy.
OperatorBundle edmd(const CovarianceSet& cov, double ridge = default_ridge,
                    bool indicator_basis = false);

struct UlamResult {
  OperatorBundle bundle;
  /// Raw transition counts between retained cells.
  Matrix counts;
  /// cells[r] is the partition index of retained cell r.
  std::vector<Index> cells;
  /// Pairs removed because an endpoint fell in a dropped cell.
  std::size_t dropped_pairs = 0;

  /// Retained position of partition cell i, or -1.
  Index retained_index(Index i) const;
};

/// Ulam's method. A cell is retained iff it starts at least min_count pairs
/// and ends at least one; pairs touching dropped cells are removed and the
/// selection is repeated until it no longer changes.
UlamResult ulam(const PairDataset& data, const BoxPartition& part, Index min_count = 1,
                Exec exec = Exec::parallel);

/// xi^T phi(x).
double galerkin_eigenfunction(const Vector& xi, const BasisSet& basis, const Vector& x);

}  // namespace transop
