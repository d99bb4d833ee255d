#include "oracles.hpp"
#include "transop/clustering.hpp"
#include "transop/error.hpp"
#include "transop/graph.hpp"
#include "transop/operators.hpp"
#include "transop/spectral.hpp"

#include <doctest.h>

#include <numeric>
#include <set>

using namespace transop;

namespace {

Matrix two_clouds(Rng& rng, Index per) {
  Matrix p(2 * per, 2);
  for (Index i = 0; i < 2 * per; ++i) {
    const double cx = i < per ? 0.0 : 100.0;
    double x, y;
    do {
      x = rng.uniform(-1, 1);
      y = rng.uniform(-1, 1);
    } while (x * x + y * y > 1);
    p(i, 0) = cx + x;
    p(i, 1) = y;
  }
  return p;
}

Partition relabel(const Partition& p, const std::vector<int>& perm) {
  Partition q = p;
  for (auto& l : q.labels)
    if (l >= 0) l = perm[static_cast<std::size_t>(l)];
  return q;
}

// Largest sine of the principal angles between two column spans, in the
// w-weighted inner product.
double max_principal_sine(const Matrix& a, const Matrix& b, const Vector& w) {
  const Vector s = w.cwiseSqrt();
  const Eigen::HouseholderQR<Matrix> qa(s.asDiagonal() * a), qb(s.asDiagonal() * b);
  const Matrix ua = qa.householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix ub = qb.householderQ() * Matrix::Identity(b.rows(), b.cols());
  const Matrix resid = ua - ub * (ub.transpose() * ua);
  return Eigen::JacobiSVD<Matrix>(resid).singularValues()[0];
}

Matrix orthonormal_indicators(const std::vector<int>& labels, int m, const Vector& w) {
  const Index n = static_cast<Index>(labels.size());
  Matrix v = Matrix::Zero(n, m);
  for (Index i = 0; i < n; ++i) v(i, labels[static_cast<std::size_t>(i)]) = 1.0;
  for (int j = 0; j < m; ++j) v.col(j) /= std::sqrt(v.col(j).cwiseProduct(v.col(j)).dot(w));
  return v;
}

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("k = 1 puts everything in one cluster") {
    Rng rng(61, stream_tag::property);
    const Matrix p = two_clouds(rng, 20);
    KmeansOptions o;
    o.k = 1;
    const KmeansResult r = kmeans(p, o);
    CHECK(std::all_of(r.partition.labels.begin(), r.partition.labels.end(), [](int l) { return l == 0; }));
  }

  TEST_CASE("two far clouds separate perfectly") {
    Rng rng(62, stream_tag::property);
    const Matrix p = two_clouds(rng, 50);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      KmeansOptions o;
      o.k = 2;
      o.seed = seed;
      o.restarts = 1;
      const KmeansResult r = kmeans(p, o);
      for (Index i = 0; i < 100; ++i)
        CHECK(r.partition.labels[static_cast<std::size_t>(i)] == r.partition.labels[i < 50 ? 0 : 50]);
      CHECK(r.partition.labels[0] != r.partition.labels[50]);
    }
  }

  TEST_CASE("k-means is deterministic and its distortion never increases") {
    Rng rng(63, stream_tag::property);
    Matrix p(300, 3);
    for (Index i = 0; i < p.size(); ++i) p.data()[i] = rng.normal();
    KmeansOptions o;
    o.k = 5;
    o.seed = 17;
    const KmeansResult a = kmeans(p, o);
    const KmeansResult b = kmeans(p, o);
    o.exec = Exec::serial;
    const KmeansResult c = kmeans(p, o);
    CHECK(a.partition.labels == b.partition.labels);
    CHECK(a.partition.labels == c.partition.labels);
    CHECK(a.distortion == c.distortion);
    REQUIRE(!a.history.empty());
    for (std::size_t i = 1; i < a.history.size(); ++i) CHECK(a.history[i] <= a.history[i - 1] * (1 + 1e-12));
    CHECK(a.history.back() == doctest::Approx(a.distortion));
  }

  TEST_CASE("k-means preconditions") {
    Matrix p(4, 1);
    p << 0, 0, 1, 1;
    KmeansOptions o;
    o.k = 3;
    try {
      kmeans(p, o);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::degenerate_input);
    }
    o.k = 2;
    CHECK(kmeans(p, o).partition.block_sizes() == std::vector<Index>{2, 2});
  }

  TEST_CASE("row normalization clusters directions") {
    Matrix p(4, 2);
    p << 1, 0, 10, 0.1, 0, 1, 0.1, 10;
    KmeansOptions o;
    o.k = 2;
    o.row_normalize = true;
    const auto l = kmeans(p, o).partition.labels;
    CHECK(l[0] == l[1]);
    CHECK(l[2] == l[3]);
    CHECK(l[0] != l[2]);
  }

  TEST_CASE("SEBA on a constant column") {
    const Vector w = Vector::Constant(5, 0.2);
    const SebaResult r = seba(Matrix::Ones(5, 1), w);
    CHECK(r.partition.hard());
    CHECK(r.partition.block_sizes() == std::vector<Index>{5});
  }

  TEST_CASE("SEBA recovers a rotated indicator subspace") {
    const std::vector<int> labels{0, 0, 1, 1, 1, 0, 1};
    Rng rng(64, stream_tag::property);
    const Vector w = oracle::random_density(rng, 7);
    const Matrix ind = orthonormal_indicators(labels, 2, w);
    const double th = 0.6;
    Matrix rot(2, 2);
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const Matrix v = ind * rot;
    const SebaResult r = seba(v, w);
    CHECK(r.partition.hard());
    CHECK(r.memberships.minCoeff() >= 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i)
      for (std::size_t j = 0; j < labels.size(); ++j)
        CHECK((labels[i] == labels[j]) == (r.partition.labels[i] == r.partition.labels[j]));
    CHECK(max_principal_sine(v, r.memberships, w) < 1e-3);
  }

  TEST_CASE("SEBA spans a nearly decoupled eigenspace") {
    const Graph g = oracle::barbell(1e-4);
    const OperatorBundle b = operator_bundle(transition_matrix(g), Density::uniform(6));
    const SpectralResult e = selfadjoint_eigs(b.F, b.mu, 2);
    const SebaResult r = seba(e.eigenvectors, b.mu);
    CHECK(max_principal_sine(e.eigenvectors, r.memberships, b.mu) < 1e-3);
    CHECK(r.partition.hard());
  }

  TEST_CASE("SEBA leaves the barbell bridge unassigned") {
    const Graph g = oracle::barbell_graph(9, 2);
    REQUIRE(g.size() == 20);
    const OperatorBundle b = operator_bundle(transition_matrix(g), Density::uniform(20));
    const SpectralResult e = selfadjoint_eigs(b.F, b.mu, 2);
    const SebaResult r = seba(e.eigenvectors, b.mu);
    CHECK(r.partition.labels[9] == Partition::unassigned);
    CHECK(r.partition.labels[10] == Partition::unassigned);
    for (int i = 0; i < 8; ++i) {
      CHECK(r.partition.labels[static_cast<std::size_t>(i)] != Partition::unassigned);
      CHECK(r.partition.labels[static_cast<std::size_t>(i)] == r.partition.labels[0]);
      CHECK(r.partition.labels[static_cast<std::size_t>(12 + i)] == r.partition.labels[19]);
    }
    CHECK(r.partition.labels[0] != r.partition.labels[19]);
  }

  TEST_CASE("SEBA rejects non-orthonormal input") {
    CHECK_THROWS_AS(seba(Matrix::Ones(4, 1), Vector::Constant(4, 0.5)), Error);
  }

  TEST_CASE("thresholding") {
    Matrix m(3, 2);
    m << 1.0, 0.2, 0.4, 0.45, 0.7, 0.7;
    const Partition p = threshold_memberships(m);
    CHECK(p.labels == std::vector<int>{0, -1, -1});
    CHECK_FALSE(p.hard());
  }

  TEST_CASE("metastability score examples") {
    Partition p;
    p.labels = {0, 1, 1, 2};
    p.m = 3;
    CHECK(metastability_score(Matrix::Identity(4, 4), Vector::Constant(4, 0.25), p) == doctest::Approx(3.0));
    CHECK(metastability_score(Matrix::Constant(4, 4, 0.25), Vector::Constant(4, 0.25), p) == doctest::Approx(1.0));
    Matrix s(2, 2);
    s << 0.9, 0.1, 0.1, 0.9;
    Partition two;
    two.labels = {0, 1};
    two.m = 2;
    CHECK(metastability_score(s, Vector::Constant(2, 0.5), two) == doctest::Approx(1.8));
    Partition gap;
    gap.labels = {0, 0};
    gap.m = 2;
    try {
      metastability_score(s, Vector::Constant(2, 0.5), gap);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::empty_block);
    }
  }

  TEST_CASE("projection mass examples") {
    Partition p;
    p.labels = {0, 0, 1};
    p.m = 2;
    const Vector mu = Vector::Constant(3, 1.0 / 3);
    Vector u(3);
    u << 1, -1, 0;
    u /= std::sqrt(u.cwiseProduct(u).dot(mu));
    CHECK(std::abs(projection_mass(u, p, mu)) < 1e-15);
    Vector pc(3);
    pc << 2, 2, -1;
    pc /= std::sqrt(pc.cwiseProduct(pc).dot(mu));
    CHECK(projection_mass(pc, p, mu) == doctest::Approx(1.0));
  }

  TEST_CASE("score and mass are invariant under relabeling") {
    Rng rng(65, stream_tag::property);
    for (int trial = 0; trial < 30; ++trial) {
      const Index n = 4 + static_cast<Index>(rng.below(12));
      const Graph g = oracle::random_graph(rng, n, trial % 2 == 1, 0.4);
      const Matrix s = transition_matrix(g);
      const Vector mu = oracle::random_density(rng, n);
      Partition p;
      p.m = 3;
      for (Index i = 0; i < n; ++i) p.labels.push_back(static_cast<int>(i % 3));
      std::vector<int> perm{2, 0, 1};
      const Partition q = relabel(p, perm);
      CHECK(metastability_score(s, mu, p) == doctest::Approx(metastability_score(s, mu, q)).epsilon(1e-14));
      Vector u(n);
      for (Index i = 0; i < n; ++i) u[i] = rng.normal();
      u /= std::sqrt(u.cwiseProduct(u).dot(mu));
      const double d = projection_mass(u, p, mu);
      CHECK(d == doctest::Approx(projection_mass(u, q, mu)).epsilon(1e-14));
      CHECK(d >= 0.0);
      CHECK(d <= 1.0 + 1e-12);
    }
  }

  TEST_CASE("bound examples") {
    const auto a = metastability_bounds({1, 1, 0.3}, {1.0}, 2.0);
    CHECK(a.lower == doctest::Approx(2.0));
    CHECK(a.upper == doctest::Approx(2.0));
    CHECK(a.holds);
    const auto b = metastability_bounds({1, 0.8, -0.5}, {1.0}, 1.8);
    CHECK(b.lower == doctest::Approx(1.8));
    CHECK(b.upper == doctest::Approx(1.8));
    CHECK(b.holds);
    CHECK_FALSE(b.lower_valid);
    CHECK_THROWS_AS(metastability_bounds({1, 0.5, 0.8}, {1.0}, 1.0), Error);
    CHECK_THROWS_AS(metastability_bounds({0.9, 0.5, 0.1}, {1.0}, 1.0), Error);
  }

  TEST_CASE("2-block chain reproduces the bound by hand") {
    Matrix s(2, 2);
    s << 0.9, 0.1, 0.1, 0.9;
    const Vector mu = Vector::Constant(2, 0.5);
    Partition two;
    two.labels = {0, 1};
    two.m = 2;
    const SpectralResult e = selfadjoint_eigs(s, mu, 2);
    CHECK(e.eigenvalues[1] == doctest::Approx(0.8));
    const double delta = projection_mass(e.eigenvectors.col(1), two, mu);
    CHECK(delta == doctest::Approx(1.0));
    const double d = metastability_score(s, mu, two);
    const auto bounds = metastability_bounds({1, 0.8, 0.0}, {delta}, d);
    CHECK(bounds.holds);
  }

  TEST_CASE("upper bound and the floor-corrected lower bound hold on reversible chains") {
    Rng rng(66, stream_tag::property);
    for (int trial = 0; trial < 100; ++trial) {
      const Index n = 4 + static_cast<Index>(rng.below(12));
      const Graph g = oracle::random_graph(rng, n, false, 0.4);
      const Matrix s = transition_matrix(g);
      const Vector pi = invariant_density(g, DensityMethod::degree_formula);
      const Vector r = pi.cwiseSqrt();
      const oracle::SymEig e = oracle::jacobi(r.asDiagonal() * s * r.cwiseInverse().asDiagonal());
      const int m = 2 + static_cast<int>(rng.below(2));
      KmeansOptions o;
      o.k = m;
      o.seed = static_cast<std::uint64_t>(trial);
      const Matrix emb = r.cwiseInverse().asDiagonal() * e.vectors.leftCols(m);
      Partition p;
      try {
        p = kmeans(emb, o).partition;
      } catch (const Error&) {
        continue;
      }
      const double d = metastability_score(s, pi, p);
      std::vector<double> eigs(e.values.data(), e.values.data() + m + 1);
      std::vector<double> deltas;
      for (int j = 1; j < m; ++j) {
        const Vector u = r.cwiseInverse().asDiagonal() * e.vectors.col(j);
        deltas.push_back(projection_mass(u, p, pi));
      }
      const auto b = metastability_bounds(eigs, deltas, d, e.values.minCoeff());
      CHECK(d <= b.upper + 1e-8);
      REQUIRE(b.holds_valid);
      CHECK(*b.holds_valid);
    }
  }
}
