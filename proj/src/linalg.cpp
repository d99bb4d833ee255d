#include "transop/linalg.hpp"

#include "transop/error.hpp"

namespace transop {

bool Box::contains(const double* x) const {
  for (Index i = 0; i < lower.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

Box make_box(std::vector<double> lower, std::vector<double> upper) {
  require(!lower.empty() && lower.size() == upper.size(), Errc::shape_mismatch,
          "box bounds must be nonempty and of equal length");
  Box b;
  b.lower = Eigen::Map<Vector>(lower.data(), static_cast<Index>(lower.size()));
  b.upper = Eigen::Map<Vector>(upper.data(), static_cast<Index>(upper.size()));
  for (Index i = 0; i < b.lower.size(); ++i) {
    require(b.lower[i] < b.upper[i], Errc::precondition, "box needs lower < upper on every axis");
  }
  return b;
}

Box square(double lo, double hi, int dimension) {
  return make_box(std::vector<double>(static_cast<std::size_t>(dimension), lo),
                  std::vector<double>(static_cast<std::size_t>(dimension), hi));
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace transop
