#include "oracles.hpp"
#include "transop/error.hpp"
#include "transop/graph.hpp"
#include "transop/operators.hpp"
#include "transop/spectral.hpp"

#include <doctest.h>

#include <numbers>

using namespace transop;

namespace {

std::vector<std::complex<double>> to_list(const ComplexVector& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("identity") {
    const SpectralResult r = selfadjoint_eigs(Matrix::Identity(3, 3), Vector::Constant(3, 1.0 / 3), 3);
    CHECK((r.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-15);
    const ComplexSpectrum c = general_eigs(Matrix::Identity(4, 4));
    CHECK((c.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-15);
  }

  TEST_CASE("triangle Koopman spectrum") {
    const Graph t = oracle::triangle();
    const SpectralResult r =
        selfadjoint_eigs(transition_matrix(t), invariant_density(t, DensityMethod::degree_formula), 3);
    CHECK(r.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(r.eigenvalues[1] == doctest::Approx(-0.5));
    CHECK(r.eigenvalues[2] == doctest::Approx(-0.5));
    CHECK(r.max_residual < 1e-8);
  }

  TEST_CASE("barbell F has constant leading eigenvector") {
    const OperatorBundle b = operator_bundle(transition_matrix(oracle::barbell(0.1)), Density::uniform(6));
    const SpectralResult r = selfadjoint_eigs(b.F, b.mu, 2);
    CHECK(r.eigenvalues[0] == doctest::Approx(1.0));
    CHECK((r.eigenvectors.col(0).array() - 1.0).abs().maxCoeff() < 1e-10);
  }

  TEST_CASE("weighted orthonormality and canonical signs") {
    Rng rng(51, stream_tag::property);
    for (int trial = 0; trial < 30; ++trial) {
      const Index n = 2 + static_cast<Index>(rng.below(25));
      const Graph g = oracle::random_graph(rng, n, true, 0.3);
      const OperatorBundle b = operator_bundle(transition_matrix(g), Density::make(oracle::random_density(rng, n)));
      const SpectralResult r = selfadjoint_eigs(b.F, b.mu, n);
      const Matrix gram = r.eigenvectors.transpose() * b.mu.asDiagonal() * r.eigenvectors;
      CHECK((gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(r.max_residual < 1e-8);
      for (Index k = 0; k < n; ++k) {
        const Vector v = r.eigenvectors.col(k);
        const double big = v.cwiseAbs().maxCoeff();
        for (Index i = 0; i < n; ++i) {
          if (std::abs(v[i]) > 1e-10 * big) {
            CHECK(v[i] > 0);
            break;
          }
        }
      }
      // oracle eigenvalues from Jacobi on the symmetrized matrix
      const Vector s = b.mu.cwiseSqrt();
      const Matrix a = s.asDiagonal() * b.F * s.cwiseInverse().asDiagonal();
      const oracle::SymEig e = oracle::jacobi(0.5 * (a + a.transpose()));
      CHECK((e.values - r.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("degenerate eigenvalues are ordered deterministically") {
    const Matrix a = Matrix::Identity(4, 4);
    const SpectralResult r1 = selfadjoint_eigs(a, Vector::Constant(4, 0.25), 4);
    const SpectralResult r2 = selfadjoint_eigs(a, Vector::Constant(4, 0.25), 4);
    CHECK(r1.eigenvectors == r2.eigenvectors);
    for (Index k = 0; k + 1 < 4; ++k) {
      const Vector u = r1.eigenvectors.col(k), v = r1.eigenvectors.col(k + 1);
      CHECK(std::lexicographical_compare(v.data(), v.data() + 4, u.data(), u.data() + 4));
    }
  }

  TEST_CASE("not self-adjoint reports the defect") {
    const Matrix s = transition_matrix(oracle::cycle3());
    try {
      selfadjoint_eigs(s, Vector::Constant(3, 1.0 / 3), 2);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::not_self_adjoint);
      CHECK(e.numerical());
    }
  }

  TEST_CASE("general spectra") {
    const ComplexSpectrum c = general_eigs(transition_matrix(oracle::cycle3()));
    const double a = 2 * std::numbers::pi / 3;
    const std::vector<std::complex<double>> roots{1.0, std::polar(1.0, a), std::polar(1.0, -a)};
    CHECK(oracle::multiset_distance(to_list(c.eigenvalues), roots) < 1e-12);
    CHECK(c.max_residual < 1e-6);
    // modulus ties broken by argument
    CHECK(c.eigenvalues[0].real() == doctest::Approx(1.0));

    Rng rng(52, stream_tag::property);
    Matrix u = Matrix::Zero(6, 6);
    for (Index i = 0; i < 6; ++i)
      for (Index j = i; j < 6; ++j) u(i, j) = rng.uniform(-1, 1);
    const ComplexSpectrum t = general_eigs(u);
    std::vector<std::complex<double>> diag;
    for (Index i = 0; i < 6; ++i) diag.emplace_back(u(i, i), 0.0);
    CHECK(oracle::multiset_distance(to_list(t.eigenvalues), diag) < 1e-10);
    for (Index k = 0; k + 1 < 6; ++k) CHECK(std::abs(t.eigenvalues[k]) >= std::abs(t.eigenvalues[k + 1]) - 1e-12);
  }

  TEST_CASE("self-adjoint and general paths agree on reversible chains") {
    Rng rng(53, stream_tag::property);
    for (int trial = 0; trial < 30; ++trial) {
      const Index n = 2 + static_cast<Index>(rng.below(19));
      const Graph g = oracle::random_graph(rng, n, false, 0.3);
      const Matrix s = transition_matrix(g);
      const SpectralResult r = selfadjoint_eigs(s, invariant_density(g, DensityMethod::degree_formula), n);
      const ComplexSpectrum c = general_eigs(s);
      std::vector<std::complex<double>> re;
      for (Index i = 0; i < n; ++i) re.emplace_back(r.eigenvalues[i], 0.0);
      CHECK(oracle::multiset_distance(to_list(c.eigenvalues), re) < 1e-8);
    }
  }

  TEST_CASE("spectral gap examples") {
    CHECK(spectral_gap(std::vector<double>{1, 0.99, 0.98, 0.5}) == 3);
    CHECK(spectral_gap(std::vector<double>{1, 0.2}) == 1);
    CHECK(spectral_gap(std::vector<double>{1, 1, 1, 0.1}) == 3);
    CHECK(spectral_gap(std::vector<double>{1, 0.5, 0.0}) == 1);
    CHECK_THROWS_AS(spectral_gap(std::vector<double>{1}), Error);
  }

  TEST_CASE("singular pairs") {
    const OperatorBundle b = operator_bundle(transition_matrix(oracle::barbell(0.05)), Density::uniform(6));
    CHECK((singular_pair(b, Vector::Ones(6), 1.0) - Vector::Ones(6)).cwiseAbs().maxCoeff() < 1e-12);
    const SpectralResult r = selfadjoint_eigs(b.F, b.mu, 2);
    const double lam = r.eigenvalues[1];
    const Vector phi = r.eigenvectors.col(1);
    const Vector psi = singular_pair(b, phi, lam);
    CHECK((b.K * psi - std::sqrt(lam) * phi).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((b.B * psi - lam * psi).cwiseAbs().maxCoeff() < 1e-8);
    for (Index i = 0; i < 3; ++i) {
      CHECK(psi[i] * psi[0] > 0);
      CHECK(psi[i + 3] * psi[0] < 0);
    }
    try {
      singular_pair(b, phi, 1e-13);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::near_null_singular);
    }
  }
}
