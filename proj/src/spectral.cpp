#include "transop/spectral.hpp"

#include "transop/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace transop {

namespace {

constexpr double kSymmetryTol = 1e-8;
constexpr double kResidualTol = 1e-8;
constexpr double kTieTol = 1e-12;

void canonical_sign(Eigen::Ref<Vector> v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-10 * scale) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

bool lex_greater(const Vector& a, const Vector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-10) return a[i] > b[i];
  }
  return false;
}

}  // namespace

SpectralResult selfadjoint_eigs(const Matrix& a, const Vector& weight, Index k) {
  const Index n = a.rows();
  require(a.cols() == n && n >= 1, Errc::shape_mismatch, "operator must be square");
  require(weight.size() == n, Errc::shape_mismatch, "weight length does not match the operator");
  require(weight.allFinite() && weight.minCoeff() > 0.0, Errc::degenerate_density,
          "weight must be strictly positive");
  require(k >= 1 && k <= n, Errc::precondition, "k must lie in [1, n]");
  require(a.allFinite(), Errc::non_finite, "operator has non-finite entries");

  const Vector sq = weight.cwiseSqrt();
  const Vector isq = sq.cwiseInverse();
  const Matrix sym = sq.asDiagonal() * a * isq.asDiagonal();
  const double defect = max_abs(sym - sym.transpose());
  if (defect > kSymmetryTol) {
    std::ostringstream os;
    os << "operator is not self-adjoint in the weighted inner product (defect " << defect << ")";
    fail(Errc::not_self_adjoint, os.str());
  }
  const Matrix s = 0.5 * (sym + sym.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  require(es.info() == Eigen::Success, Errc::convergence, "symmetric eigensolver did not converge");

  SpectralResult out;
  out.weight = weight;
  out.symmetry_defect = defect;
  out.eigenvalues.resize(k);
  out.eigenvectors.resize(n, k);
  std::vector<Vector> vecs;
  std::vector<double> vals;
  for (Index j = 0; j < n; ++j) {
    vals.push_back(es.eigenvalues()[n - 1 - j]);
    Vector v = isq.asDiagonal() * es.eigenvectors().col(n - 1 - j);
    v /= std::sqrt(v.dot(weight.asDiagonal() * v));
    canonical_sign(v);
    vecs.push_back(std::move(v));
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    const double lx = vals[static_cast<std::size_t>(x)];
    const double ly = vals[static_cast<std::size_t>(y)];
    if (std::abs(lx - ly) > kTieTol * std::max(1.0, std::abs(lx))) return lx > ly;
    return lex_greater(vecs[static_cast<std::size_t>(x)], vecs[static_cast<std::size_t>(y)]);
  });
  for (Index j = 0; j < k; ++j) {
    const auto src = static_cast<std::size_t>(order[static_cast<std::size_t>(j)]);
    out.eigenvalues[j] = vals[src];
    out.eigenvectors.col(j) = vecs[src];
    const double res = (a * vecs[src] - vals[src] * vecs[src]).cwiseAbs().maxCoeff();
    out.max_residual = std::max(out.max_residual, res);
  }
  const double tol = kResidualTol * std::max(1.0, max_abs(a));
  if (out.max_residual > tol) {
    std::ostringstream os;
    os << "eigenpair residual " << out.max_residual << " exceeds " << tol;
    fail(Errc::convergence, os.str());
  }
  return out;
}

ComplexSpectrum general_eigs(const Matrix& a) {
  const Index n = a.rows();
  require(a.cols() == n && n >= 1, Errc::shape_mismatch, "operator must be square");
  require(n <= 4096, Errc::too_large, "general eigensolve limited to n <= 4096");
  require(a.allFinite(), Errc::non_finite, "operator has non-finite entries");
  Eigen::EigenSolver<Matrix> es(a, true);
  if (es.info() != Eigen::Success) {
    fail(Errc::convergence, "Hessenberg QR iteration failed to converge within " +
                                std::to_string(40 * n) + " iterations");
  }
  const ComplexVector vals = es.eigenvalues();
  const ComplexMatrix vecs = es.eigenvectors();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    const double mx = std::abs(vals[x]);
    const double my = std::abs(vals[y]);
    if (std::abs(mx - my) > 1e-12 * std::max(1.0, mx)) return mx > my;
    const double ax = std::arg(vals[x]);
    const double ay = std::arg(vals[y]);
    if (std::abs(ax) != std::abs(ay)) return std::abs(ax) < std::abs(ay);
    return ax > ay;
  });
  ComplexSpectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  const ComplexMatrix ac = a.cast<std::complex<double>>();
  for (Index j = 0; j < n; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    out.eigenvalues[j] = vals[src];
    ComplexVector v = vecs.col(src);
    v.normalize();
    out.eigenvectors.col(j) = v;
    out.max_residual =
        std::max(out.max_residual, (ac * v - vals[src] * v).cwiseAbs().maxCoeff());
  }
  if (out.max_residual > 1e-6 * std::max(1.0, max_abs(a))) {
    fail(Errc::convergence, "general eigenpair residual " + std::to_string(out.max_residual));
  }
  return out;
}

Index spectral_gap(const std::vector<double>& eigenvalues) {
  require(eigenvalues.size() >= 2, Errc::precondition, "spectral gap needs two eigenvalues");
  Index best = 1;
  double best_gap = -1.0;
  for (std::size_t k = 0; k + 1 < eigenvalues.size(); ++k) {
    const double gap = eigenvalues[k] - eigenvalues[k + 1];
    if (gap > best_gap + 1e-12) {
      best_gap = gap;
      best = static_cast<Index>(k + 1);
    }
  }
  return best;
}

Index spectral_gap(const Vector& eigenvalues) {
  return spectral_gap(std::vector<double>(eigenvalues.data(), eigenvalues.data() + eigenvalues.size()));
}

Vector singular_pair(const OperatorBundle& bundle, const Vector& phi, double lambda) {
  require(phi.size() == bundle.size(), Errc::shape_mismatch, "vector length does not match bundle");
  if (!(lambda > 1e-12)) {
    fail(Errc::near_null_singular,
         "eigenvalue " + std::to_string(lambda) + " is too small for a singular pair");
  }
  const double root = std::sqrt(lambda);
  const Vector psi = bundle.T * phi / root;
  const double scale = std::max(1.0, phi.cwiseAbs().maxCoeff());
  const double k_err = (bundle.K * psi - root * phi).cwiseAbs().maxCoeff();
  const double b_err = (bundle.B * psi - lambda * psi).cwiseAbs().maxCoeff();
  if (k_err > 1e-8 * scale || b_err > 1e-8 * scale) {
    std::ostringstream os;
    os << "singular pair check failed: |K psi - sqrt(l) phi| = " << k_err
       << ", |B psi - l psi| = " << b_err;
    fail(Errc::convergence, os.str());
  }
  return psi;
}

}  // namespace transop
