#pragma once

#include "transop/dynamics.hpp"
#include "transop/linalg.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace transop {

struct Partition {
  static constexpr int unassigned = -1;

  std::vector<int> labels;
  int m = 0;

  Index size() const { return static_cast<Index>(labels.size()); }
  bool hard() const;
  std::vector<Index> block_sizes() const;
};

struct KmeansOptions {
  int k = 2;
  std::uint64_t seed = 0;
  int restarts = 10;
  int max_iter = 300;
  double tol = 1e-9;
  bool row_normalize = false;
  Exec exec = Exec::parallel;
};

struct KmeansResult {
  Partition partition;
  Matrix centers;
  double distortion = 0.0;
  int restart = 0;
  int iterations = 0;
  /// Distortion after every assignment step of the winning restart.
  std::vector<double> history;
};

/// Lloyd iterations from k-means++ seeds; best of `restarts`, chosen by
/// (distortion, restart index). Restart r draws from Rng(seed, kmeans + r).
KmeansResult kmeans(const Matrix& points, const KmeansOptions& opts);

struct SebaOptions {
  double tol = 1e-12;
  int max_iter = 5000;
  double min_membership = 0.5;
  double margin = 1e-6;
  double orthonormality_tol = 1e-6;
};

struct SebaResult {
  /// n x r nonnegative memberships, each column scaled to maximum 1.
  Matrix memberships;
  Partition partition;
  int iterations = 0;
};

/// Sparse eigenbasis approximation of the columns of V, which must be
/// orthonormal under `weight`.
SebaResult seba(const Matrix& v, const Vector& weight, const SebaOptions& opts = {});

/// Hard partition from memberships: argmax when it reaches
/// max(min_membership, second largest + margin), else unassigned.
Partition threshold_memberships(const Matrix& memberships, double min_membership = 0.5,
                                double margin = 1e-6);

/// Sum over blocks of the mu-weighted probability of staying in the block.
double metastability_score(const Matrix& s, const Vector& mu, const Partition& part);

/// mu-mass of the blockwise mu-average of u.
double projection_mass(const Vector& u, const Partition& part, const Vector& mu);

struct MetastabilityBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool holds = false;
  /// 1 + sum delta_j l_j + l_min * sum (1 - delta_j); only with a spectrum floor.
  std::optional<double> lower_valid;
  std::optional<bool> holds_valid;
};

/// eigs = (l_1, ..., l_{m+1}) descending with l_1 = 1, deltas = (delta_2..delta_m).
MetastabilityBounds metastability_bounds(const std::vector<double>& eigs,
                                         const std::vector<double>& deltas, double d,
                                         std::optional<double> spectrum_floor = std::nullopt);

}  // namespace transop
