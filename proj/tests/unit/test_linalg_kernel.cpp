#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "effridge/errors.hpp"
#include "effridge/linalg_kernel.hpp"
#include "effridge/rng.hpp"
#include "oracles.hpp"

#include <cmath>
#include <limits>

using namespace effridge;

namespace {

Matrix col(std::initializer_list<double> v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("rbf entries") {
  const auto k2 = KernelSpec::rbf(2.0);
  CHECK(gram_matrix(k2, col({0.3}), col({0.3}))(0, 0) == 1.0);

  Matrix a(1, 2), b(1, 2);
  a << 0.0, 0.0;
  b << 1.0, 1.0;  // squared distance 2
  CHECK(gram_matrix(k2, a, b)(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(gram_matrix(k2, a, b)(0, 0) == doctest::Approx(0.3678794).epsilon(1e-7));

  CHECK(gram_matrix(KernelSpec::rbf(1.0), col({0.0}), col({3.0}))(0, 0) ==
        doctest::Approx(1.2341e-4).epsilon(1e-4));
}

TEST_CASE("gram matrix validation") {
  CHECK_THROWS_AS(KernelSpec::rbf(0.0).validate(), InvalidInput);
  CHECK_THROWS_AS(KernelSpec::rbf(-1.0), InvalidInput);
  Matrix bad = col({0.0, std::numeric_limits<double>::quiet_NaN()});
  CHECK_THROWS_AS(gram_matrix(KernelSpec::rbf(1.0), bad), InvalidInput);
  Matrix wide(2, 2);
  wide.setZero();
  CHECK_THROWS_AS(gram_matrix(KernelSpec::rbf(1.0), col({0.0}), wide), InvalidInput);
  CHECK_THROWS_AS(gram_matrix(KernelSpec::precomputed(), col({0.0})), InvalidInput);

  Matrix asym(2, 2);
  asym << 1.0, 0.5, 0.4, 1.0;
  CHECK_THROWS_AS(GramMatrix{asym}, InvalidInput);
  Matrix negdiag(2, 2);
  negdiag << -1.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(GramMatrix{negdiag}, InvalidInput);
}

TEST_CASE("gram matrix without X2 is exactly symmetric") {
  Rng rng(3);
  Matrix X(12, 3);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = rng.normal();
  const GramMatrix K = gram_matrix(KernelSpec::rbf(1.7), X);
  CHECK(K.entries() == K.entries().transpose());
  CHECK(K.entries().diagonal().isOnes());
}

TEST_CASE("duplicate rows are rejected") {
  Matrix X(3, 2);
  X << 0, 1, 2, 3, 0, 1;
  CHECK_THROWS_AS(check_distinct_rows(X), InvalidInput);
  X(2, 1) = 1.001;
  CHECK_NOTHROW(check_distinct_rows(X));

  Dataset data{X, Vector::Ones(3), std::nullopt};
  CHECK_NOTHROW(data.validate());
  data.y(1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(data.validate(), InvalidInput);
}

TEST_CASE("spectral decomposition examples") {
  SUBCASE("identity") {
    const auto s = spectral_decompose(GramMatrix(Matrix::Identity(2, 2)));
    CHECK(s.eigenvalues.isOnes());
    CHECK(s.trace_mean == 1.0);
  }
  SUBCASE("diagonal") {
    Matrix D = vec2(1.0, 2.0).asDiagonal();
    const auto s = spectral_decompose(GramMatrix(D));
    CHECK(s.eigenvalues(0) == doctest::Approx(2.0));
    CHECK(s.eigenvalues(1) == doctest::Approx(1.0));
    CHECK(s.trace_mean == doctest::Approx(1.5));
    Matrix swap(2, 2);
    swap << 0, 1, 1, 0;
    CHECK((s.eigenvectors.cwiseAbs() - swap).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("random spd reconstructs") {
    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
      const Matrix A = oracle::random_spd(5, rng);
      const auto s = spectral_decompose(GramMatrix(A));
      CHECK((s.reconstruct() - A).cwiseAbs().maxCoeff() < 1e-8);
      CHECK((s.eigenvectors.transpose() * s.eigenvectors - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
      for (Eigen::Index i = 1; i < 5; ++i) CHECK(s.eigenvalues(i - 1) >= s.eigenvalues(i));
    }
  }
}

TEST_CASE("eigenvalue clamp policy") {
  // Rotated diag(1, -1e-12): positive diagonal, one tiny negative eigenvalue.
  Matrix tiny(2, 2);
  tiny << 0.5 - 0.5e-12, 0.5 + 0.5e-12, 0.5 + 0.5e-12, 0.5 - 0.5e-12;
  const auto s = spectral_decompose(GramMatrix(tiny));
  CHECK(s.eigenvalues(1) == 0.0);
  // An indefinite Gram with a positive diagonal.
  Matrix indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(spectral_decompose(GramMatrix(indefinite)), NumericError);
}

TEST_CASE("square root of the gram") {
  CHECK(sqrt_gram(spectral_decompose(GramMatrix(Matrix::Identity(3, 3)))).isApprox(Matrix::Identity(3, 3)));
  Matrix D = vec2(4.0, 1.0).asDiagonal();
  const Matrix R = sqrt_gram(spectral_decompose(GramMatrix(D)));
  CHECK((R - Matrix(vec2(2.0, 1.0).asDiagonal())).cwiseAbs().maxCoeff() < 1e-14);

  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix A = oracle::random_spd(4, rng);
    const Matrix S = sqrt_gram(spectral_decompose(GramMatrix(A)));
    CHECK((S * S - A).cwiseAbs().maxCoeff() < 1e-8 * A.cwiseAbs().maxCoeff());
    CHECK(S == S.transpose());
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(S).eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("inverse kernel norm") {
  const auto I = spectral_decompose(GramMatrix(Matrix::Identity(3, 3)));
  const Vector y = Eigen::Vector3d(1.0, -2.0, 0.5);
  CHECK(inv_kernel_norm_sq(I, y) == doctest::Approx(y.squaredNorm()));
  CHECK(inv_kernel_norm_sq(I, Vector::Zero(3)) == 0.0);

  const auto D = spectral_decompose(GramMatrix(Matrix(vec2(2.0, 1.0).asDiagonal())));
  CHECK(inv_kernel_norm_sq(D, Vector::Ones(2)) == doctest::Approx(1.5).epsilon(1e-14));

  const auto singular = GramSpectrum::from_eigenvalues(vec2(1.0, 0.0));
  CHECK_THROWS_AS(inv_kernel_norm_sq(singular, Vector::Ones(2)), SingularGram);

  Rng rng(17);
  for (int rep = 0; rep < 30; ++rep) {
    const Matrix A = oracle::random_spd(6, rng);
    const auto s = spectral_decompose(GramMatrix(A));
    Vector v(6);
    for (auto& x : v) x = rng.normal();
    const double q = inv_kernel_norm_sq(s, v);
    CHECK(q >= v.squaredNorm() / s.eigenvalues.maxCoeff() * (1 - 1e-12));
    CHECK(q <= v.squaredNorm() / s.eigenvalues.minCoeff() * (1 + 1e-12));
    CHECK(q == doctest::Approx(v.dot(A.ldlt().solve(v))).epsilon(1e-10));
  }
}

TEST_CASE("spectrum from eigenvalues is diagonal") {
  const auto s = GramSpectrum::from_eigenvalues(Eigen::Vector3d(0.5, 2.0, 1.0));
  CHECK(s.eigenvalues(0) == 2.0);
  CHECK(s.eigenvalues(2) == 0.5);
  CHECK(s.reconstruct().isApprox(Matrix(Eigen::Vector3d(0.5, 2.0, 1.0).asDiagonal())));
}
