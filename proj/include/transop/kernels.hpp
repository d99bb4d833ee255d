#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP variant that produce bit-identical output for any thread count:
// work is split into units whose boundaries do not depend on the number of
// threads, and reductions happen in a fixed order.

#include "transop/dynamics.hpp"
#include "transop/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace transop::kernels {

/// Samples per covariance shard. Fixed so shard boundaries never depend on
/// the thread count.
inline constexpr Index covariance_shard = 4096;

/// Integrate m bursts. steps[k] is the number of h-steps between snapshot k
/// and k+1; states must hold steps.size() + 1 matrices of shape m x d.
/// Burst i draws its start and its noise from Rng(seed, stream_tag::burst + i).
void integrate_bursts_serial(const SdeModel& model, const InitSampler& init,
                             std::span<const std::size_t> steps, double t0, double h,
                             std::uint64_t seed, std::vector<Samples>& states);
void integrate_bursts_omp(const SdeModel& model, const InitSampler& init,
                          std::span<const std::size_t> steps, double t0, double h,
                          std::uint64_t seed, std::vector<Samples>& states);

/// Unscaled sums Phi_x Phi_x^T, Phi_x Phi_y^T, Phi_y Phi_y^T over columns,
/// accumulated per shard then reduced pairwise.
struct CovarianceSums {
  Matrix xx;
  Matrix xy;
  Matrix yy;
};

CovarianceSums covariance_sums_serial(const Matrix& phi_x, const Matrix& phi_y);
CovarianceSums covariance_sums_omp(const Matrix& phi_x, const Matrix& phi_y);

/// counts(from[k], to[k]) += 1 for every k.
Matrix count_transitions_serial(std::span<const Index> from, std::span<const Index> to, Index n);
Matrix count_transitions_omp(std::span<const Index> from, std::span<const Index> to, Index n);

/// Nearest-center labels and total squared distortion.
double assign_nearest_serial(const Matrix& points, const Matrix& centers, std::vector<int>& labels);
double assign_nearest_omp(const Matrix& points, const Matrix& centers, std::vector<int>& labels);

}  // namespace transop::kernels
