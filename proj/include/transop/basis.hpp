#pragma once

#include "transop/linalg.hpp"

#include <json.hpp>

#include <variant>
#include <vector>

namespace transop {

/// Uniform grid of half-open boxes covering a domain. Cell index is
/// row-major with axis 0 fastest: i = i0 + n0 * (i1 + n1 * (i2 + ...)).
class BoxPartition {
 public:
  BoxPartition(Box domain, std::vector<Index> counts);

  const Box& domain() const { return domain_; }
  const std::vector<Index>& counts() const { return counts_; }
  Index size() const { return n_; }
  Index dimension() const { return domain_.dimension(); }

  /// Cell containing x; the top face of the domain closes the last cell.
  Index box_index(const double* x) const;
  Index box_index(const Vector& x) const { return box_index(x.data()); }
  /// Same, or -1 when x lies outside the domain.
  Index try_box_index(const double* x) const;

  std::vector<Index> multi_index(Index i) const;
  Index flat_index(const std::vector<Index>& multi) const;
  Vector cell_center(Index i) const;
  Vector cell_width() const;

 private:
  Box domain_;
  std::vector<Index> counts_;
  Index n_ = 0;
};

nlohmann::json partition_to_json(const BoxPartition& part);
BoxPartition partition_from_json(const nlohmann::json& j);

struct GaussianDictionary {
  Matrix centers;  // n x d
  double bandwidth = 1.0;
};

/// Galerkin dictionary: indicator functions of a box partition, or Gaussians
/// exp(-|x - c|^2 / (2 bandwidth^2)).
class BasisSet {
 public:
  explicit BasisSet(BoxPartition part);
  explicit BasisSet(GaussianDictionary dict);

  bool is_indicator() const { return std::holds_alternative<BoxPartition>(kind_); }
  const BoxPartition& partition() const;
  const GaussianDictionary& gaussian() const;
  Index size() const;
  Index dimension() const;

 private:
  std::variant<BoxPartition, GaussianDictionary> kind_;
};

/// n x m matrix whose column k is phi(X.row(k)).
Matrix evaluate_basis(const BasisSet& basis, const Samples& X);

}  // namespace transop
