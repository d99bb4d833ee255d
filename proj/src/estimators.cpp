#include "transop/estimators.hpp"

#include "transop/error.hpp"
#include "transop/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace transop {

namespace {

// (G + eps I)^-1 R, failing with the near-null directions of G + eps I.
Matrix regularized_solve(const Matrix& g, const Matrix& r, double ridge, const char* name) {
  const Index n = g.rows();
  Matrix reg = g;
  reg.diagonal().array() += ridge;
  Eigen::SelfAdjointEigenSolver<Matrix> es(reg);
  const Vector& ev = es.eigenvalues();
  const double top = std::max(std::abs(ev[n - 1]), 1e-300);
  const double cutoff = top * 1e-13;
  if (!(ev[0] > cutoff) || !std::isfinite(ev[0])) {
    std::ostringstream os;
    os << name << " + ridge is singular (ridge " << ridge << "); null directions:";
    for (Index k = 0; k < n && !(ev[k] > cutoff); ++k) {
      const Vector v = es.eigenvectors().col(k);
      os << " [eigenvalue " << ev[k] << ", support";
      int shown = 0;
      for (Index i = 0; i < n && shown < 8; ++i) {
        if (std::abs(v[i]) > 1e-6) {
          os << ' ' << i;
          ++shown;
        }
      }
      os << ']';
      if (k >= 4) {
        os << " ...";
        break;
      }
    }
    fail(Errc::ill_conditioned_basis, os.str());
  }
  return es.eigenvectors() *
         (es.eigenvalues().cwiseInverse().asDiagonal() * (es.eigenvectors().transpose() * r));
}

}  // namespace

CovarianceSet covariances(const Matrix& phi_x, const Matrix& phi_y, Exec exec) {
  require(phi_x.rows() == phi_y.rows() && phi_x.cols() == phi_y.cols(), Errc::shape_mismatch,
          "feature matrices must have identical shape");
  require(phi_x.cols() >= 1, Errc::empty_dataset, "covariances need at least one sample");
  auto sums = exec == Exec::parallel ? kernels::covariance_sums_omp(phi_x, phi_y)
                                     : kernels::covariance_sums_serial(phi_x, phi_y);
  const double inv = 1.0 / static_cast<double>(phi_x.cols());
  CovarianceSet c;
  c.m = phi_x.cols();
  c.xx = sums.xx * inv;
  c.xy = sums.xy * inv;
  c.yy = sums.yy * inv;
  c.yx = c.xy.transpose();
  return c;
}

OperatorBundle edmd(const CovarianceSet& cov, double ridge, bool indicator_basis) {
  const Index n = cov.xx.rows();
  require(cov.xx.cols() == n && cov.xy.rows() == n && cov.xy.cols() == n && cov.yy.rows() == n &&
              cov.yx.rows() == n,
          Errc::shape_mismatch, "covariance matrices must all be n x n");
  require(ridge >= 0.0, Errc::precondition, "ridge must be nonnegative");
  OperatorBundle b;
  b.K = regularized_solve(cov.xx, cov.xy, ridge, "C_xx");
  b.T = regularized_solve(cov.yy, cov.yx, ridge, "C_yy");
  b.F = b.K * b.T;
  b.B = b.T * b.K;
  b.P = b.K.transpose();
  if (indicator_basis) {
    b.mu = cov.xx.diagonal();
    b.nu = cov.yy.diagonal();
  }
  b.provenance = {Provenance::Kind::estimated, "edmd"};
  return b;
}

Index UlamResult::retained_index(Index i) const {
  const auto it = std::lower_bound(cells.begin(), cells.end(), i);
  return it != cells.end() && *it == i ? static_cast<Index>(it - cells.begin()) : -1;
}

UlamResult ulam(const PairDataset& data, const BoxPartition& part, Index min_count, Exec exec) {
  require(data.xs.rows() == data.ys.rows() && data.xs.cols() == data.ys.cols(),
          Errc::shape_mismatch, "xs and ys must have identical shape");
  require(data.dimension() == part.dimension() || data.size() == 0, Errc::shape_mismatch,
          "dataset dimension does not match the partition");
  require(min_count >= 1, Errc::precondition, "min_count must be at least 1");
  const Index n = part.size();
  const Index m = data.size();

  std::vector<Index> from(static_cast<std::size_t>(m));
  std::vector<Index> to(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) {
    from[static_cast<std::size_t>(k)] = part.box_index(data.xs.row(k).data());
    to[static_cast<std::size_t>(k)] = part.box_index(data.ys.row(k).data());
  }

  std::vector<char> keep(static_cast<std::size_t>(n), 1);
  std::vector<char> live(static_cast<std::size_t>(m), 1);
  for (;;) {
    std::vector<Index> starts(static_cast<std::size_t>(n), 0);
    std::vector<Index> ends(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < from.size(); ++k) {
      if (!live[k]) continue;
      if (!keep[static_cast<std::size_t>(from[k])] || !keep[static_cast<std::size_t>(to[k])]) {
        live[k] = 0;
        continue;
      }
      ++starts[static_cast<std::size_t>(from[k])];
      ++ends[static_cast<std::size_t>(to[k])];
    }
    bool changed = false;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (keep[i] && (starts[i] < min_count || ends[i] == 0)) {
        keep[i] = 0;
        changed = true;
      }
    }
    if (!changed) break;
  }

  UlamResult out;
  std::vector<Index> position(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    if (keep[static_cast<std::size_t>(i)]) {
      position[static_cast<std::size_t>(i)] = static_cast<Index>(out.cells.size());
      out.cells.push_back(i);
    }
  }
  require(!out.cells.empty(), Errc::empty_dataset, "no partition cell retains any transition");

  std::vector<Index> rf;
  std::vector<Index> rt;
  for (std::size_t k = 0; k < from.size(); ++k) {
    if (live[k]) {
      rf.push_back(position[static_cast<std::size_t>(from[k])]);
      rt.push_back(position[static_cast<std::size_t>(to[k])]);
    } else {
      ++out.dropped_pairs;
    }
  }
  const auto r = static_cast<Index>(out.cells.size());
  out.counts = exec == Exec::parallel ? kernels::count_transitions_omp(rf, rt, r)
                                      : kernels::count_transitions_serial(rf, rt, r);

  const Vector starts = out.counts.rowwise().sum();
  const Vector ends = out.counts.colwise().sum().transpose();
  const double total = starts.sum();
  OperatorBundle& b = out.bundle;
  b.K = starts.cwiseInverse().asDiagonal() * out.counts;
  b.T = ends.cwiseInverse().asDiagonal() * out.counts.transpose();
  b.F = b.K * b.T;
  b.B = b.T * b.K;
  b.P = b.K.transpose();
  b.mu = starts / total;
  b.nu = ends / total;
  b.provenance = {Provenance::Kind::estimated, "ulam"};
  return out;
}

double galerkin_eigenfunction(const Vector& xi, const BasisSet& basis, const Vector& x) {
  require(xi.size() == basis.size(), Errc::shape_mismatch,
          "coefficient vector does not match the basis size");
  Samples pt(1, x.size());
  pt.row(0) = x.transpose();
  return xi.dot(evaluate_basis(basis, pt).col(0));
}

}  // namespace transop
