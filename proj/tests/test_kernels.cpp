#include "transop/dynamics.hpp"
#include "transop/kernels.hpp"
#include "transop/rng.hpp"

#include <doctest.h>

#include <omp.h>

using namespace transop;

TEST_SUITE("kernels") {
  TEST_CASE("burst integration is identical serial and parallel") {
    QuadrupleWellParams p;
    p.c = 2.0;
    p.tilt_max = 2.0;
    const SdeModel m = make_quadruple_well_model(p);
    const std::vector<std::size_t> steps{50, 100, 25};
    for (int threads : {1, 2, 4, 7}) {
      omp_set_num_threads(threads);
      std::vector<Samples> a(4, Samples(257, 2)), b(4, Samples(257, 2));
      kernels::integrate_bursts_serial(m, quadruple_well_gibbs_sampler(p), steps, 0.5, 1e-3, 9, a);
      kernels::integrate_bursts_omp(m, quadruple_well_gibbs_sampler(p), steps, 0.5, 1e-3, 9, b);
      for (std::size_t k = 0; k < 4; ++k) CHECK(a[k] == b[k]);
    }
  }

  TEST_CASE("covariance sums are identical and match the dense product") {
    Rng rng(81, stream_tag::property);
    const Index m = 3 * kernels::covariance_shard + 123;
    Matrix x(6, m), y(6, m);
    for (Index i = 0; i < x.size(); ++i) {
      x.data()[i] = rng.normal();
      y.data()[i] = rng.normal();
    }
    for (int threads : {1, 3, 8}) {
      omp_set_num_threads(threads);
      const auto s = kernels::covariance_sums_serial(x, y);
      const auto o = kernels::covariance_sums_omp(x, y);
      CHECK(s.xx == o.xx);
      CHECK(s.xy == o.xy);
      CHECK(s.yy == o.yy);
      CHECK((s.xy - x * y.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("transition counts") {
    Rng rng(82, stream_tag::property);
    std::vector<Index> from, to;
    for (int k = 0; k < 50000; ++k) {
      from.push_back(static_cast<Index>(rng.below(30)));
      to.push_back(static_cast<Index>(rng.below(30)));
    }
    const Matrix s = kernels::count_transitions_serial(from, to, 30);
    CHECK(s.sum() == 50000.0);
    for (int threads : {1, 4}) {
      omp_set_num_threads(threads);
      CHECK(kernels::count_transitions_omp(from, to, 30) == s);
    }
    std::vector<Index> f{0, 0, 1}, t{1, 1, 0};
    const Matrix c = kernels::count_transitions_serial(f, t, 2);
    CHECK(c(0, 1) == 2.0);
    CHECK(c(1, 0) == 1.0);
  }

  TEST_CASE("nearest-center assignment") {
    Rng rng(83, stream_tag::property);
    Matrix pts(5000, 3), centers(7, 3);
    for (Index i = 0; i < pts.size(); ++i) pts.data()[i] = rng.normal();
    for (Index i = 0; i < centers.size(); ++i) centers.data()[i] = rng.normal();
    std::vector<int> a, b;
    const double da = kernels::assign_nearest_serial(pts, centers, a);
    for (int threads : {1, 5}) {
      omp_set_num_threads(threads);
      const double db = kernels::assign_nearest_omp(pts, centers, b);
      CHECK(a == b);
      CHECK(da == db);
    }
    Matrix tie(1, 1), cs(2, 1);
    tie << 0.0;
    cs << -1.0, 1.0;
    std::vector<int> l;
    kernels::assign_nearest_serial(tie, cs, l);
    CHECK(l[0] == 0);
  }
}
