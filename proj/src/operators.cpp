#include "transop/operators.hpp"

#include "transop/error.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

namespace transop {

namespace {

void require_square(const Matrix& a, const char* what) {
  require(a.rows() == a.cols() && a.rows() >= 1, Errc::shape_mismatch,
          std::string(what) + " must be a nonempty square matrix");
}

void require_stochastic(const Matrix& s) {
  require_square(s, "transition matrix");
  for (Index i = 0; i < s.rows(); ++i) {
    const double sum = s.row(i).sum();
    require(std::abs(sum - 1.0) <= 1e-10, Errc::precondition,
            "row " + std::to_string(i) + " of the transition matrix sums to " + std::to_string(sum));
    require(s.row(i).minCoeff() >= 0.0, Errc::precondition,
            "row " + std::to_string(i) + " of the transition matrix has a negative entry");
  }
}

}  // namespace

Density Density::uniform(Index n) {
  require(n >= 1, Errc::precondition, "density needs at least one entry");
  return {Vector::Constant(n, 1.0 / static_cast<double>(n)), Label::uniform};
}

Density Density::make(Vector values, Label label) {
  require(values.size() >= 1, Errc::precondition, "density needs at least one entry");
  require(values.allFinite() && values.minCoeff() > 0.0, Errc::degenerate_density,
          "density must be strictly positive");
  require(std::abs(values.sum() - 1.0) <= 1e-12, Errc::precondition,
          "density must sum to 1 (sum " + std::to_string(values.sum()) + ")");
  return {std::move(values), label};
}

Density Density::normalized(Vector values, Label label) {
  const double total = values.sum();
  require(total > 0.0 && std::isfinite(total), Errc::degenerate_density,
          "density has no positive mass");
  values /= total;
  return make(std::move(values), label);
}

OperatorBundle operator_bundle(const Matrix& s, const Density& mu) {
  require_stochastic(s);
  require(mu.size() == s.rows(), Errc::shape_mismatch, "density length does not match S");
  OperatorBundle b;
  b.mu = mu.values;
  b.nu = s.transpose() * mu.values;
  for (Index i = 0; i < b.nu.size(); ++i) {
    require(b.nu[i] > 0.0, Errc::image_density_degenerate,
            "image density vanishes at vertex " + std::to_string(i));
  }
  b.K = s;
  b.P = s.transpose();
  b.T = b.nu.cwiseInverse().asDiagonal() * b.P * mu.values.asDiagonal();
  b.F = b.K * b.T;
  b.B = b.T * b.K;
  b.provenance = {Provenance::Kind::exact, "transition-matrix"};
  return b;
}

Matrix random_walk_laplacian(const Matrix& s) {
  require_stochastic(s);
  return Matrix::Identity(s.rows(), s.cols()) - s;
}

Matrix forward_backward_laplacian(const OperatorBundle& bundle) {
  require_square(bundle.F, "F");
  return Matrix::Identity(bundle.F.rows(), bundle.F.cols()) - bundle.F;
}

Matrix rate_matrix_exponential(const Matrix& l, double tau) {
  require_square(l, "rate matrix");
  require(tau >= 0.0 && std::isfinite(tau), Errc::precondition, "tau must be nonnegative");
  const Index n = l.rows();
  const double scale = std::max(1.0, max_abs(l));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j && l(i, j) < 0.0) {
        std::ostringstream os;
        os << "rate matrix has negative off-diagonal entry L(" << i << ", " << j << ") = " << l(i, j);
        fail(Errc::precondition, os.str());
      }
    }
    const double sum = l.row(i).sum();
    if (std::abs(sum) > 1e-12 * scale * static_cast<double>(n)) {
      std::ostringstream os;
      os << "rate matrix row " << i << " sums to " << sum << " instead of 0";
      fail(Errc::precondition, os.str());
    }
  }
  if (tau == 0.0) return Matrix::Identity(n, n);
  Matrix out = (tau * l).exp();
  require(out.allFinite(), Errc::non_finite, "matrix exponential produced non-finite entries");
  // Round-off can leave entries of order -1e-17 where the exact value is 0.
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (out(i, j) < 0.0) {
        require(out(i, j) > -1e-12, Errc::convergence, "matrix exponential lost nonnegativity");
        out(i, j) = 0.0;
      }
    }
    const double sum = out.row(i).sum();
    require(std::abs(sum - 1.0) <= 1e-10, Errc::convergence,
            "exp(tau L) row " + std::to_string(i) + " sums to " + std::to_string(sum));
  }
  return out;
}

Matrix apply_langevin_generator(const Matrix& v, double beta, const Matrix& f, double spacing) {
  require(v.rows() == f.rows() && v.cols() == f.cols(), Errc::shape_mismatch,
          "potential and observable must share the grid");
  require(v.rows() >= 3 && v.cols() >= 3, Errc::precondition,
          "grid needs at least 3 nodes per axis");
  require(beta > 0.0 && spacing > 0.0, Errc::precondition, "beta and spacing must be positive");
  const Index nx = v.rows() - 2;
  const Index ny = v.cols() - 2;
  const double inv2h = 0.5 / spacing;
  const double invh2 = 1.0 / (spacing * spacing);
  Matrix out(nx, ny);
  for (Index i = 1; i <= nx; ++i) {
    for (Index j = 1; j <= ny; ++j) {
      const double vx = (v(i + 1, j) - v(i - 1, j)) * inv2h;
      const double vy = (v(i, j + 1) - v(i, j - 1)) * inv2h;
      const double fx = (f(i + 1, j) - f(i - 1, j)) * inv2h;
      const double fy = (f(i, j + 1) - f(i, j - 1)) * inv2h;
      const double lap =
          (f(i + 1, j) + f(i - 1, j) + f(i, j + 1) + f(i, j - 1) - 4.0 * f(i, j)) * invh2;
      out(i - 1, j - 1) = -(vx * fx + vy * fy) + lap / beta;
    }
  }
  return out;
}

}  // namespace transop
