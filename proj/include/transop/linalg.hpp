#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace transop {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Row-major sample matrix: one state per row.
using Samples = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Axis-aligned closed box [lower, upper] in R^d.
struct Box {
  Vector lower;
  Vector upper;

  Index dimension() const { return lower.size(); }
  bool contains(const double* x) const;
  bool contains(const Vector& x) const { return contains(x.data()); }
};

Box make_box(std::vector<double> lower, std::vector<double> upper);
Box square(double lo, double hi, int dimension = 2);

double max_abs(const Matrix& a);

}  // namespace transop
