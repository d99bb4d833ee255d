#pragma once

#include "transop/bundle.hpp"
#include "transop/linalg.hpp"

#include <vector>

namespace transop {

struct SpectralResult {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // columns, weight-orthonormal
  Vector weight;
  /// max_k ||A v_k - lambda_k v_k||_inf
  double max_residual = 0.0;
  /// ||D^1/2 A D^-1/2 - its transpose||_max before symmetrization
  double symmetry_defect = 0.0;
};

struct ComplexSpectrum {
  ComplexVector eigenvalues;  // by modulus descending, then |argument|, upper half-plane first
  ComplexMatrix eigenvectors;
  double max_residual = 0.0;
};

/// Top-k eigenpairs of an operator self-adjoint in the weighted inner product
/// <u, v>_w = sum w u v. Eigenvectors are w-orthonormal with the first
/// nonzero entry positive; equal eigenvalues are ordered lexicographically by
/// their vectors.
SpectralResult selfadjoint_eigs(const Matrix& a, const Vector& weight, Index k);

ComplexSpectrum general_eigs(const Matrix& a);

/// argmax_k (lambda_k - lambda_{k+1}) over k >= 1 (1-based), ties to the
/// smallest k.
Index spectral_gap(const std::vector<double>& eigenvalues);
Index spectral_gap(const Vector& eigenvalues);

/// psi = T phi / sqrt(lambda), verified against K psi = sqrt(lambda) phi and
/// B psi = lambda psi.
Vector singular_pair(const OperatorBundle& bundle, const Vector& phi, double lambda);

}  // namespace transop
