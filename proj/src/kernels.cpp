#include "transop/kernels.hpp"

#include "transop/error.hpp"

#include <exception>
#include <limits>


namespace transop::kernels {

namespace {

void integrate_one(const SdeModel& model, const InitSampler& init,
                   std::span<const std::size_t> steps, double t0, double h, std::uint64_t seed,
                   Index i, EulerMaruyama& em, std::vector<double>& x,
                   std::vector<Samples>& states) {
  Rng rng(seed, stream_tag::burst + static_cast<std::uint64_t>(i));
  init(rng, x);
  const Index d = model.dimension;
  for (Index j = 0; j < d; ++j) states[0](i, j) = x[static_cast<std::size_t>(j)];
  std::size_t global = 0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    for (std::size_t s = 0; s < steps[k]; ++s, ++global) {
      em.step(x, t0 + static_cast<double>(global) * h, rng);
    }
    for (Index j = 0; j < d; ++j) states[k + 1](i, j) = x[static_cast<std::size_t>(j)];
  }
}

void check_states(const SdeModel& model, std::span<const std::size_t> steps,
                  const std::vector<Samples>& states) {
  require(states.size() == steps.size() + 1, Errc::shape_mismatch,
          "need one state matrix per snapshot");
  for (const auto& s : states) {
    require(s.rows() == states[0].rows() && s.cols() == model.dimension, Errc::shape_mismatch,
            "snapshot matrices must be m x d");
  }
}

CovarianceSums shard_sums(const Matrix& phi_x, const Matrix& phi_y, Index s) {
  const Index begin = s * covariance_shard;
  const Index len = std::min(covariance_shard, phi_x.cols() - begin);
  const auto x = phi_x.middleCols(begin, len);
  const auto y = phi_y.middleCols(begin, len);
  CovarianceSums out;
  out.xx.noalias() = x * x.transpose();
  out.xy.noalias() = x * y.transpose();
  out.yy.noalias() = y * y.transpose();
  return out;
}

// Pairwise tree reduction in index order, independent of who computed what.
CovarianceSums reduce(std::vector<CovarianceSums>& parts, Index n) {
  if (parts.empty()) return {Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (std::size_t width = 1; width < parts.size(); width *= 2) {
    for (std::size_t i = 0; i + width < parts.size(); i += 2 * width) {
      parts[i].xx += parts[i + width].xx;
      parts[i].xy += parts[i + width].xy;
      parts[i].yy += parts[i + width].yy;
    }
  }
  return std::move(parts[0]);
}

Index shard_count(const Matrix& phi_x, const Matrix& phi_y) {
  require(phi_x.rows() == phi_y.rows() && phi_x.cols() == phi_y.cols(), Errc::shape_mismatch,
          "feature matrices must have identical shape");
  return (phi_x.cols() + covariance_shard - 1) / covariance_shard;
}

double nearest(const Matrix& points, const Matrix& centers, Index i, int& label) {
  double best = std::numeric_limits<double>::infinity();
  label = 0;
  for (Index c = 0; c < centers.rows(); ++c) {
    const double dist = (points.row(i) - centers.row(c)).squaredNorm();
    if (dist < best) {
      best = dist;
      label = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

void integrate_bursts_serial(const SdeModel& model, const InitSampler& init,
                             std::span<const std::size_t> steps, double t0, double h,
                             std::uint64_t seed, std::vector<Samples>& states) {
  check_states(model, steps, states);
  EulerMaruyama em(model, h);
  std::vector<double> x(static_cast<std::size_t>(model.dimension));
  for (Index i = 0; i < states[0].rows(); ++i) {
    integrate_one(model, init, steps, t0, h, seed, i, em, x, states);
  }
}

void integrate_bursts_omp(const SdeModel& model, const InitSampler& init,
                          std::span<const std::size_t> steps, double t0, double h,
                          std::uint64_t seed, std::vector<Samples>& states) {
  check_states(model, steps, states);
  const Index m = states[0].rows();
  std::exception_ptr error;
#pragma omp parallel
  {
    EulerMaruyama em(model, h);
    std::vector<double> x(static_cast<std::size_t>(model.dimension));
#pragma omp for schedule(static)
    for (Index i = 0; i < m; ++i) {
      try {
        integrate_one(model, init, steps, t0, h, seed, i, em, x, states);
      } catch (...) {
#pragma omp critical(transop_burst_error)
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

CovarianceSums covariance_sums_serial(const Matrix& phi_x, const Matrix& phi_y) {
  const Index shards = shard_count(phi_x, phi_y);
  std::vector<CovarianceSums> parts;
  parts.reserve(static_cast<std::size_t>(shards));
  for (Index s = 0; s < shards; ++s) parts.push_back(shard_sums(phi_x, phi_y, s));
  return reduce(parts, phi_x.rows());
}

CovarianceSums covariance_sums_omp(const Matrix& phi_x, const Matrix& phi_y) {
  const Index shards = shard_count(phi_x, phi_y);
  std::vector<CovarianceSums> parts(static_cast<std::size_t>(shards));
#pragma omp parallel for schedule(dynamic, 1)
  for (Index s = 0; s < shards; ++s) parts[static_cast<std::size_t>(s)] = shard_sums(phi_x, phi_y, s);
  return reduce(parts, phi_x.rows());
}

Matrix count_transitions_serial(std::span<const Index> from, std::span<const Index> to, Index n) {
  require(from.size() == to.size(), Errc::shape_mismatch, "index arrays differ in length");
  Matrix w = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < from.size(); ++k) w(from[k], to[k]) += 1.0;
  return w;
}

// Integer-valued sums are exact in double, so atomic accumulation order
// cannot change the result.
Matrix count_transitions_omp(std::span<const Index> from, std::span<const Index> to, Index n) {
  require(from.size() == to.size(), Errc::shape_mismatch, "index arrays differ in length");
  Matrix w = Matrix::Zero(n, n);
  double* data = w.data();
  const auto len = static_cast<std::ptrdiff_t>(from.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < len; ++k) {
    const auto idx = from[static_cast<std::size_t>(k)] + n * to[static_cast<std::size_t>(k)];
#pragma omp atomic
    data[idx] += 1.0;
  }
  return w;
}

double assign_nearest_serial(const Matrix& points, const Matrix& centers, std::vector<int>& labels) {
  labels.resize(static_cast<std::size_t>(points.rows()));
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    total += nearest(points, centers, i, labels[static_cast<std::size_t>(i)]);
  }
  return total;
}

double assign_nearest_omp(const Matrix& points, const Matrix& centers, std::vector<int>& labels) {
  const Index n = points.rows();
  labels.resize(static_cast<std::size_t>(n));
  std::vector<double> dist(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    dist[static_cast<std::size_t>(i)] = nearest(points, centers, i, labels[static_cast<std::size_t>(i)]);
  }
  double total = 0.0;
  for (double v : dist) total += v;
  return total;
}

}  // namespace transop::kernels
