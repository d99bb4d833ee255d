#include "transop/basis.hpp"

#include "transop/error.hpp"

#include <cmath>
#include <sstream>

namespace transop {

BoxPartition::BoxPartition(Box domain, std::vector<Index> counts)
    : domain_(std::move(domain)), counts_(std::move(counts)) {
  require(static_cast<Index>(counts_.size()) == domain_.dimension() && !counts_.empty(),
          Errc::shape_mismatch, "need one cell count per axis");
  n_ = 1;
  for (Index c : counts_) {
    require(c >= 1, Errc::precondition, "cell counts must be positive");
    n_ *= c;
  }
}

Index BoxPartition::try_box_index(const double* x) const {
  Index idx = 0;
  Index stride = 1;
  for (std::size_t a = 0; a < counts_.size(); ++a) {
    const auto k = static_cast<Index>(a);
    const double lo = domain_.lower[k];
    const double hi = domain_.upper[k];
    if (!(x[a] >= lo && x[a] <= hi)) return -1;
    auto cell = static_cast<Index>(std::floor((x[a] - lo) / (hi - lo) * static_cast<double>(counts_[a])));
    if (cell >= counts_[a]) cell = counts_[a] - 1;
    if (cell < 0) cell = 0;
    idx += stride * cell;
    stride *= counts_[a];
  }
  return idx;
}

Index BoxPartition::box_index(const double* x) const {
  const Index idx = try_box_index(x);
  if (idx < 0) {
    std::ostringstream os;
    os << "point (";
    for (Index a = 0; a < dimension(); ++a) os << (a ? ", " : "") << x[a];
    os << ") lies outside the partition domain";
    fail(Errc::out_of_domain, os.str());
  }
  return idx;
}

std::vector<Index> BoxPartition::multi_index(Index i) const {
  require(i >= 0 && i < n_, Errc::precondition, "cell index out of range");
  std::vector<Index> multi(counts_.size());
  for (std::size_t a = 0; a < counts_.size(); ++a) {
    multi[a] = i % counts_[a];
    i /= counts_[a];
  }
  return multi;
}

Index BoxPartition::flat_index(const std::vector<Index>& multi) const {
  require(multi.size() == counts_.size(), Errc::shape_mismatch, "multi-index has wrong length");
  Index idx = 0;
  for (std::size_t a = counts_.size(); a-- > 0;) {
    require(multi[a] >= 0 && multi[a] < counts_[a], Errc::precondition, "multi-index out of range");
    idx = idx * counts_[a] + multi[a];
  }
  return idx;
}

Vector BoxPartition::cell_width() const {
  Vector w(dimension());
  for (Index a = 0; a < dimension(); ++a) {
    w[a] = (domain_.upper[a] - domain_.lower[a]) / static_cast<double>(counts_[static_cast<std::size_t>(a)]);
  }
  return w;
}

Vector BoxPartition::cell_center(Index i) const {
  const auto multi = multi_index(i);
  const Vector w = cell_width();
  Vector c(dimension());
  for (Index a = 0; a < dimension(); ++a) {
    c[a] = domain_.lower[a] + (static_cast<double>(multi[static_cast<std::size_t>(a)]) + 0.5) * w[a];
  }
  return c;
}

nlohmann::json partition_to_json(const BoxPartition& part) {
  const Box& b = part.domain();
  return {{"domain",
           {{"lower", std::vector<double>(b.lower.data(), b.lower.data() + b.lower.size())},
            {"upper", std::vector<double>(b.upper.data(), b.upper.data() + b.upper.size())}}},
          {"counts", part.counts()}};
}

BoxPartition partition_from_json(const nlohmann::json& j) {
  try {
    return BoxPartition(make_box(j.at("domain").at("lower").get<std::vector<double>>(),
                                 j.at("domain").at("upper").get<std::vector<double>>()),
                        j.at("counts").get<std::vector<Index>>());
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::io, std::string("malformed partition description: ") + e.what());
  }
}

BasisSet::BasisSet(BoxPartition part) : kind_(std::move(part)) {}

BasisSet::BasisSet(GaussianDictionary dict) : kind_(std::move(dict)) {
  const auto& g = std::get<GaussianDictionary>(kind_);
  require(g.centers.rows() >= 1, Errc::precondition, "dictionary needs at least one center");
  require(g.bandwidth > 0.0, Errc::precondition, "gaussian bandwidth must be positive");
}

const BoxPartition& BasisSet::partition() const {
  require(is_indicator(), Errc::unsupported_configuration, "basis is not an indicator basis");
  return std::get<BoxPartition>(kind_);
}

const GaussianDictionary& BasisSet::gaussian() const {
  require(!is_indicator(), Errc::unsupported_configuration, "basis is not a gaussian dictionary");
  return std::get<GaussianDictionary>(kind_);
}

Index BasisSet::size() const {
  return is_indicator() ? partition().size() : gaussian().centers.rows();
}

Index BasisSet::dimension() const {
  return is_indicator() ? partition().dimension() : gaussian().centers.cols();
}

Matrix evaluate_basis(const BasisSet& basis, const Samples& X) {
  require(X.cols() == basis.dimension(), Errc::shape_mismatch,
          "points do not match the basis dimension");
  const Index m = X.rows();
  Matrix phi = Matrix::Zero(basis.size(), m);
  if (basis.is_indicator()) {
    const auto& part = basis.partition();
    for (Index k = 0; k < m; ++k) {
      const Index i = part.try_box_index(X.row(k).data());
      if (i < 0) fail(Errc::out_of_domain, "row " + std::to_string(k) + " lies outside the domain");
      phi(i, k) = 1.0;
    }
    return phi;
  }
  const auto& g = basis.gaussian();
  const double scale = -0.5 / (g.bandwidth * g.bandwidth);
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < m; ++k) {
    for (Index i = 0; i < g.centers.rows(); ++i) {
      phi(i, k) = std::exp(scale * (X.row(k) - g.centers.row(i)).squaredNorm());
    }
  }
  return phi;
}

}  // namespace transop
