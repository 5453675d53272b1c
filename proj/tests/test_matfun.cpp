#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "telegraph/error.hpp"
#include "telegraph/matfun.hpp"
#include "telegraph/random.hpp"

using namespace telegraph;

namespace {

ComplexMatrix diag(std::initializer_list<Complex> values) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (auto x : values) v(i++) = x;
  return v.asDiagonal();
}

ComplexMatrix jordan_block(int n, Complex lambda) {
  ComplexMatrix j = lambda * ComplexMatrix::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) j(i, i + 1) = 1.0;
  return j;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected telegraph::Error");
  return ErrorKind::IOError;
}

}  // namespace

TEST_SUITE("matfun") {
  TEST_CASE("expm of zero and diagonal matrices") {
    CHECK(expm(ComplexMatrix::Zero(2, 2)).isApprox(ComplexMatrix::Identity(2, 2), 0.0));
    const ComplexMatrix e = expm(diag({1.0, 2.0}));
    CHECK(std::abs(e(0, 0) - std::exp(1.0)) < 1e-15 * std::exp(1.0));
    CHECK(std::abs(e(1, 1) - std::exp(2.0)) < 1e-15 * std::exp(2.0));
    CHECK(std::abs(e(0, 1)) == 0.0);
  }

  TEST_CASE("expm of the lossless scalar exponent matches the series") {
    const Complex j(0.0, 1.0);
    ComplexMatrix m(2, 2);
    m << 0.0, j, j, 0.0;
    const ComplexMatrix reference = oracle::series_expm(m);
    ComplexMatrix closed(2, 2);
    closed << std::cos(1.0), j * std::sin(1.0), j * std::sin(1.0), std::cos(1.0);
    CHECK(oracle::rel(reference, closed) < 1e-15);
    CHECK(oracle::rel(expm(m), reference) < 1e-14);
  }

  TEST_CASE("expm agrees with the extended-precision Taylor oracle for norms up to 10") {
    Rng rng = make_rng(11, 0);
    std::uniform_real_distribution<double> target(0.01, 10.0);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + trial % 6;
      ComplexMatrix m = random_complex(n, n, rng);
      m *= target(rng) / oracle::spectral_norm(m);
      worst = std::max(worst, oracle::rel(expm(m), oracle::taylor_expm_extended(m)));
    }
    CHECK(worst <= 1e-12);
  }

  TEST_CASE("expm commutes with unitary similarity") {
    Rng rng = make_rng(12, 0);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + trial % 4;
      const ComplexMatrix m = 2.0 * random_complex(n, n, rng);
      const ComplexMatrix u = random_unitary(n, rng);
      const ComplexMatrix lhs = expm(u * m * u.adjoint());
      const ComplexMatrix rhs = u * expm(m) * u.adjoint();
      CHECK(oracle::rel(lhs, rhs) <= 1e-12);
    }
  }

  TEST_CASE("expm rejects non-square and non-finite input") {
    CHECK(kind_of([] { expm(ComplexMatrix::Zero(2, 3)); }) == ErrorKind::DimensionMismatch);
    ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK(kind_of([&] { expm(bad); }) == ErrorKind::NonFinite);
  }

  TEST_CASE("sqrtm_principal on identity, diagonal and Jordan inputs") {
    CHECK(sqrtm_principal(ComplexMatrix::Identity(3, 3))
              .isApprox(ComplexMatrix::Identity(3, 3), 1e-15));
    CHECK(sqrtm_principal(diag({4.0, 9.0})).isApprox(diag({2.0, 3.0}), 1e-15));

    ComplexMatrix expected(2, 2);
    expected << 1.0, 0.5, 0.0, 1.0;
    const ComplexMatrix x = sqrtm_principal(jordan_block(2, 1.0));
    CHECK(oracle::rel(x, expected) < 1e-15);
    CHECK(oracle::rel(x * x, jordan_block(2, 1.0)) < 1e-15);
  }

  TEST_CASE("sqrtm_principal succeeds on the 8x8 Jordan block") {
    const ComplexMatrix j = jordan_block(8, 1.0);
    const ComplexMatrix x = sqrtm_principal(j);
    CHECK(oracle::rel(x * x, j) <= 1e-10);
    // Conjugating by a random unitary leaves the matrix defective but
    // removes the triangular structure.
    Rng rng = make_rng(13, 0);
    const ComplexMatrix u = random_unitary(8, rng);
    const ComplexMatrix dense = u * j * u.adjoint();
    const ComplexMatrix y = sqrtm_principal(dense);
    CHECK(oracle::rel(y * y, dense) <= 1e-10);
    for (const auto& z : spectrum(y).eigenvalues) CHECK(z.real() > -1e-12);
  }

  TEST_CASE("sqrtm_principal residual and spectrum on random input") {
    Rng rng = make_rng(14, 0);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 1 + trial % 6;
      const ComplexMatrix m = random_complex(n, n, rng);
      const ComplexMatrix x = sqrtm_principal(m);
      CHECK(oracle::rel(x * x, m) <= 1e-10);
      CHECK(spectrum(x).min_real() > -1e-12);
    }
  }

  TEST_CASE("sqrtm_principal refuses eigenvalues on the non-positive real axis") {
    CHECK(kind_of([] { sqrtm_principal(diag({-1.0, 2.0})); }) == ErrorKind::BranchCut);
    CHECK(kind_of([] { sqrtm_principal(ComplexMatrix::Zero(2, 2)); }) == ErrorKind::BranchCut);
    CHECK(kind_of([] { sqrtm_principal(diag({Complex(-4.0, 1e-14), 1.0})); }) ==
          ErrorKind::BranchCut);
    CHECK_NOTHROW(sqrtm_principal(diag({Complex(-4.0, 1e-6), 1.0})));
    CHECK(kind_of([] { sqrtm_principal(ComplexMatrix::Zero(2, 1)); }) ==
          ErrorKind::DimensionMismatch);
  }

  TEST_CASE("hyperbolic functions") {
    CHECK(coshm(ComplexMatrix::Zero(3, 3)).isApprox(ComplexMatrix::Identity(3, 3), 0.0));
    CHECK(sinhm(ComplexMatrix::Zero(3, 3)).norm() == 0.0);

    const ComplexMatrix s = sinhm(diag({Complex(0.0, std::numbers::pi), 1.0}));
    CHECK(std::abs(s(0, 0)) < 1e-15);
    CHECK(std::abs(s(1, 1) - std::sinh(1.0)) < 1e-15);
    CHECK(std::abs(det(s)) < 1e-15);

    Rng rng = make_rng(15, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const ComplexMatrix m = random_complex(3, 3, rng);
      const auto [c, sh] = cosh_sinh(m);
      const ComplexMatrix identity = c * c - sh * sh;
      CHECK(oracle::rel(identity, ComplexMatrix::Identity(3, 3)) < 1e-11 * c.squaredNorm());
    }
  }

  TEST_CASE("spectrum") {
    auto sorted_re = [](const Spectrum& s) {
      std::vector<double> v;
      for (auto z : s.eigenvalues) v.push_back(z.real());
      std::sort(v.begin(), v.end());
      return v;
    };
    const auto s = spectrum(diag({3.0, 1.0, 2.0}));
    REQUIRE(s.size() == 3);
    CHECK(sorted_re(s) == std::vector<double>{1.0, 2.0, 3.0});

    ComplexMatrix nil(2, 2);
    nil << 0.0, 1.0, 0.0, 0.0;
    const auto z = spectrum(nil);
    REQUIRE(z.size() == 2);
    for (auto e : z.eigenvalues) CHECK(std::abs(e) == 0.0);

    Rng rng = make_rng(16, 0);
    const RealMatrix sym = random_symmetric(5, rng, -3.0, 3.0, false);
    CHECK(spectrum(sym.cast<Complex>()).max_abs_imag() <= 1e-13);
  }

  TEST_CASE("hermitian_part_min_eig") {
    CHECK(hermitian_part_min_eig(ComplexMatrix::Identity(4, 4)) == doctest::Approx(1.0));
    ComplexMatrix m(2, 2);
    m << 0.0, 2.0, 0.0, 0.0;
    CHECK(hermitian_part_min_eig(m) == doctest::Approx(-1.0).epsilon(1e-15));

    Rng rng = make_rng(17, 0);
    std::mt19937_64 sampler(17);
    for (int trial = 0; trial < 5; ++trial) {
      const ComplexMatrix a = random_complex(3, 3, rng);
      const double value = hermitian_part_min_eig(a);
      const double sampled = oracle::sampled_min_numerical_range_re(a, 100000, sampler);
      CHECK(sampled >= value - 1e-12);
      // The sampled minimum approaches the eigenvalue from above.
      CHECK(sampled - value < 0.05 * (1.0 + std::abs(value)));
    }
  }

  TEST_CASE("inverse_norm_bound") {
    CHECK(inverse_norm_bound(ComplexMatrix::Identity(2, 2)) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(inverse_norm_bound(diag({2.0, 0.5})) ==
          doctest::Approx(std::sqrt(4.25)).epsilon(1e-15));
    CHECK(spectral_norm(inverse(diag({2.0, 0.5}))) == doctest::Approx(2.0));

    Rng rng = make_rng(18, 0);
    for (int trial = 0; trial < 50; ++trial) {
      const ComplexMatrix a =
          random_complex(4, 4, rng) + 4.0 * ComplexMatrix::Identity(4, 4);
      const double truth = oracle::spectral_norm(a.inverse());
      CHECK(inverse_norm_bound(a) >= truth);
    }
    CHECK(kind_of([] { inverse_norm_bound(ComplexMatrix::Zero(3, 3)); }) ==
          ErrorKind::Singular);
    ComplexMatrix rank_one(2, 2);
    rank_one << 1.0, 2.0, 2.0, 4.0;
    CHECK(kind_of([&] { inverse_norm_bound(rank_one); }) == ErrorKind::Singular);
  }

  TEST_CASE("norms and determinant") {
    CHECK(spectral_norm(diag({3.0, -4.0})) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(frobenius_norm(ComplexMatrix::Identity(3, 3)) ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    ComplexMatrix m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    CHECK(std::abs(det(m) - Complex(-2.0, 0.0)) < 1e-14);

    Rng rng = make_rng(19, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const ComplexMatrix a = random_complex(5, 5, rng);
      CHECK(spectral_norm(a) <= frobenius_norm(a));
      CHECK(spectral_norm(a) == doctest::Approx(oracle::spectral_norm(a)).epsilon(1e-12));
    }
  }
}
