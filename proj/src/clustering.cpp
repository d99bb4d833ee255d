#include "transop/clustering.hpp"

#include "transop/error.hpp"
#include "transop/kernels.hpp"
#include "transop/rng.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>

namespace transop {

bool Partition::hard() const {
  return std::none_of(labels.begin(), labels.end(), [](int l) { return l == unassigned; });
}

std::vector<Index> Partition::block_sizes() const {
  std::vector<Index> sizes(static_cast<std::size_t>(m), 0);
  for (int l : labels) {
    if (l != unassigned) ++sizes[static_cast<std::size_t>(l)];
  }
  return sizes;
}

namespace {

Index distinct_rows(const Matrix& x) {
  std::vector<Index> idx(static_cast<std::size_t>(x.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  auto less = [&](Index a, Index b) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
    }
    return false;
  };
  std::sort(idx.begin(), idx.end(), less);
  Index count = idx.empty() ? 0 : 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    if (less(idx[i - 1], idx[i])) ++count;
  }
  return count;
}

Matrix plus_plus_seeds(const Matrix& x, int k, Rng& rng) {
  const Index n = x.rows();
  Matrix centers(k, x.cols());
  centers.row(0) = x.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  Vector d2(n);
  for (Index i = 0; i < n; ++i) d2[i] = (x.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        target -= d2[i];
        if (target < 0.0 && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      while (d2[pick] == 0.0 && pick > 0) --pick;
    }
    centers.row(c) = x.row(pick);
    for (Index i = 0; i < n; ++i) d2[i] = std::min(d2[i], (x.row(i) - centers.row(c)).squaredNorm());
  }
  return centers;
}

KmeansResult lloyd(const Matrix& x, const KmeansOptions& opts, int restart, bool parallel_assign) {
  Rng rng(opts.seed, stream_tag::kmeans + static_cast<std::uint64_t>(restart));
  KmeansResult r;
  r.restart = restart;
  r.centers = plus_plus_seeds(x, opts.k, rng);
  std::vector<int> labels;
  auto assign = [&]() {
    return parallel_assign ? kernels::assign_nearest_omp(x, r.centers, labels)
                           : kernels::assign_nearest_serial(x, r.centers, labels);
  };
  double prev = assign();
  r.history.push_back(prev);
  for (int it = 0; it < opts.max_iter; ++it) {
    r.iterations = it + 1;
    Matrix sums = Matrix::Zero(opts.k, x.cols());
    std::vector<Index> counts(static_cast<std::size_t>(opts.k), 0);
    for (Index i = 0; i < x.rows(); ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < opts.k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        r.centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: move it onto the point with the largest residual.
      Index far = 0;
      double worst = -1.0;
      for (Index i = 0; i < x.rows(); ++i) {
        const double d = (x.row(i) - r.centers.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
        if (d > worst) {
          worst = d;
          far = i;
        }
      }
      r.centers.row(c) = x.row(far);
    }
    const std::vector<int> old = labels;
    const double cur = assign();
    r.history.push_back(cur);
    const bool settled = labels == old;
    const bool small = prev - cur <= opts.tol * std::max(prev, 1e-300);
    prev = cur;
    if (settled || small) break;
  }
  r.distortion = prev;
  r.partition.labels = std::move(labels);
  r.partition.m = opts.k;
  return r;
}

}  // namespace

KmeansResult kmeans(const Matrix& points, const KmeansOptions& opts) {
  require(opts.k >= 1, Errc::precondition, "k must be positive");
  require(opts.restarts >= 1 && opts.max_iter >= 1, Errc::precondition,
          "restarts and max_iter must be positive");
  require(points.allFinite(), Errc::non_finite, "embedding has non-finite entries");
  require(opts.k <= points.rows(), Errc::precondition,
          "k = " + std::to_string(opts.k) + " exceeds the number of points");
  Matrix x = points;
  if (opts.row_normalize) {
    for (Index i = 0; i < x.rows(); ++i) {
      const double norm = x.row(i).norm();
      if (norm > 0.0) x.row(i) /= norm;
    }
  }
  const Index distinct = distinct_rows(x);
  if (opts.k > distinct) {
    fail(Errc::degenerate_input, "k = " + std::to_string(opts.k) + " exceeds the " +
                                     std::to_string(distinct) + " distinct points");
  }

  std::vector<KmeansResult> runs(static_cast<std::size_t>(opts.restarts));
  if (opts.exec == Exec::parallel && opts.restarts > 1) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < opts.restarts; ++r) {
      try {
        runs[static_cast<std::size_t>(r)] = lloyd(x, opts, r, false);
      } catch (...) {
#pragma omp critical(transop_kmeans_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (int r = 0; r < opts.restarts; ++r) {
      runs[static_cast<std::size_t>(r)] = lloyd(x, opts, r, opts.exec == Exec::parallel);
    }
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].distortion < runs[best].distortion) best = r;
  }
  return std::move(runs[best]);
}

Partition threshold_memberships(const Matrix& memberships, double min_membership, double margin) {
  Partition p;
  p.m = static_cast<int>(memberships.cols());
  p.labels.assign(static_cast<std::size_t>(memberships.rows()), Partition::unassigned);
  for (Index i = 0; i < memberships.rows(); ++i) {
    Index arg = 0;
    double first = -std::numeric_limits<double>::infinity();
    double second = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < memberships.cols(); ++j) {
      const double v = memberships(i, j);
      if (v > first) {
        second = first;
        first = v;
        arg = j;
      } else if (v > second) {
        second = v;
      }
    }
    const double threshold = std::max(min_membership, second + margin);
    if (first >= threshold) p.labels[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return p;
}

SebaResult seba(const Matrix& v, const Vector& weight, const SebaOptions& opts) {
  const Index p = v.rows();
  const Index r = v.cols();
  require(r >= 1 && p >= r, Errc::precondition, "SEBA needs 1 <= r <= n vectors");
  require(weight.size() == p, Errc::shape_mismatch, "weight length does not match V");
  const Matrix gram = v.transpose() * weight.asDiagonal() * v;
  const double defect = max_abs(gram - Matrix::Identity(r, r));
  if (defect > opts.orthonormality_tol) {
    std::ostringstream os;
    os << "SEBA input columns are not orthonormal under the weight (defect " << defect << ")";
    fail(Errc::precondition, os.str());
  }

  Eigen::HouseholderQR<Matrix> qr(v);
  Matrix q = qr.householderQ() * Matrix::Identity(p, r);
  const double mu = 0.99 / std::sqrt(static_cast<double>(p));
  Matrix rot = Matrix::Identity(r, r);
  Matrix s(p, r);
  SebaResult out;
  for (int it = 0; it < opts.max_iter; ++it) {
    out.iterations = it + 1;
    const Matrix z = q * rot.transpose();
    for (Index i = 0; i < p; ++i) {
      for (Index j = 0; j < r; ++j) {
        const double a = std::abs(z(i, j)) - mu;
        s(i, j) = a > 0.0 ? std::copysign(a, z(i, j)) : 0.0;
      }
    }
    for (Index j = 0; j < r; ++j) {
      const double norm = s.col(j).norm();
      if (norm > 0.0) s.col(j) /= norm;
    }
    Eigen::JacobiSVD<Matrix> svd(s.transpose() * q, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix next = svd.matrixU() * svd.matrixV().transpose();
    const double change = (next - rot).norm();
    rot = next;
    if (change < opts.tol) break;
  }

  for (Index j = 0; j < r; ++j) {
    if (s.col(j).sum() < 0.0) s.col(j) = -s.col(j);
  }
  s = s.cwiseMax(0.0);
  for (Index j = 0; j < r; ++j) {
    const double top = s.col(j).maxCoeff();
    if (top > 0.0) s.col(j) /= top;
  }
  out.memberships = s;
  out.partition = threshold_memberships(s, opts.min_membership, opts.margin);
  return out;
}

namespace {

void check_hard(const Partition& part, Index n) {
  require(part.size() == n, Errc::shape_mismatch, "partition length does not match");
  require(part.hard(), Errc::precondition, "a hard partition is required");
  for (int l : part.labels) {
    require(l >= 0 && l < part.m, Errc::precondition, "partition label out of range");
  }
}

}  // namespace

double metastability_score(const Matrix& s, const Vector& mu, const Partition& part) {
  const Index n = s.rows();
  require(s.cols() == n && mu.size() == n, Errc::shape_mismatch, "S and mu must agree in size");
  check_hard(part, n);
  std::vector<double> mass(static_cast<std::size_t>(part.m), 0.0);
  std::vector<double> stay(static_cast<std::size_t>(part.m), 0.0);
  std::vector<Index> sizes(static_cast<std::size_t>(part.m), 0);
  for (Index x = 0; x < n; ++x) {
    const auto b = static_cast<std::size_t>(part.labels[static_cast<std::size_t>(x)]);
    ++sizes[b];
    mass[b] += mu[x];
    double inside = 0.0;
    for (Index y = 0; y < n; ++y) {
      if (part.labels[static_cast<std::size_t>(y)] == part.labels[static_cast<std::size_t>(x)]) inside += s(x, y);
    }
    stay[b] += mu[x] * inside;
  }
  double d = 0.0;
  for (std::size_t b = 0; b < mass.size(); ++b) {
    require(sizes[b] > 0, Errc::empty_block, "block " + std::to_string(b) + " is empty");
    require(mass[b] > 0.0, Errc::empty_block, "block " + std::to_string(b) + " has zero mass");
    d += stay[b] / mass[b];
  }
  return d;
}

double projection_mass(const Vector& u, const Partition& part, const Vector& mu) {
  const Index n = u.size();
  require(mu.size() == n, Errc::shape_mismatch, "u and mu must agree in size");
  check_hard(part, n);
  const double norm = u.dot(mu.asDiagonal() * u);
  require(std::abs(norm - 1.0) <= 1e-6, Errc::precondition,
          "u must be normalized in the mu inner product (norm " + std::to_string(norm) + ")");
  std::vector<double> mass(static_cast<std::size_t>(part.m), 0.0);
  std::vector<double> first(static_cast<std::size_t>(part.m), 0.0);
  for (Index x = 0; x < n; ++x) {
    const auto b = static_cast<std::size_t>(part.labels[static_cast<std::size_t>(x)]);
    mass[b] += mu[x];
    first[b] += mu[x] * u[x];
  }
  double delta = 0.0;
  for (std::size_t b = 0; b < mass.size(); ++b) {
    require(mass[b] > 0.0, Errc::empty_block, "block " + std::to_string(b) + " has zero mass");
    delta += first[b] * first[b] / mass[b];
  }
  return delta;
}

MetastabilityBounds metastability_bounds(const std::vector<double>& eigs,
                                         const std::vector<double>& deltas, double d,
                                         std::optional<double> spectrum_floor) {
  require(eigs.size() >= 2, Errc::precondition, "need eigenvalues l_1 .. l_{m+1}");
  const std::size_t m = eigs.size() - 1;
  require(deltas.size() + 1 == m, Errc::shape_mismatch, "need deltas delta_2 .. delta_m");
  require(std::abs(eigs[0] - 1.0) <= 1e-8, Errc::precondition, "l_1 must equal 1");
  for (std::size_t j = 1; j < eigs.size(); ++j) {
    require(eigs[j] <= eigs[j - 1] + 1e-12, Errc::precondition, "eigenvalues must be descending");
  }
  MetastabilityBounds b;
  double weighted = 0.0;
  double product = 1.0;
  double slack = 0.0;
  double upper = 1.0;
  for (std::size_t j = 1; j < m; ++j) {
    const double delta = deltas[j - 1];
    weighted += delta * eigs[j];
    product *= 1.0 - delta;
    slack += 1.0 - delta;
    upper += eigs[j];
  }
  b.lower = 1.0 + weighted + eigs[m] * product;
  b.upper = upper;
  b.holds = b.lower - 1e-8 <= d && d <= b.upper + 1e-8;
  if (spectrum_floor) {
    b.lower_valid = 1.0 + weighted + *spectrum_floor * slack;
    b.holds_valid = *b.lower_valid - 1e-8 <= d && d <= b.upper + 1e-8;
  }
  return b;
}

}  // namespace transop
