#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "effridge/errors.hpp"
#include "effridge/feature_sampler.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace effridge;

namespace {

Matrix rbf_points(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix X(n, 2);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = rng.normal();
  return X;
}

}  // namespace

TEST_CASE("gaussian feature shapes") {
  const Matrix root = Matrix::Identity(7, 7);
  const auto F = sample_gaussian_features(root, 5, 4, SeedPolicy{1, 0});
  CHECK(F.rows() == 7);
  CHECK(F.features() == 5);
  CHECK(F.train().rows() == 4);
  CHECK(F.test().rows() == 3);
  CHECK(F.seed == SeedPolicy{1, 0}.derived_seed());
  CHECK_THROWS_AS(sample_gaussian_features(root, 0, 4, SeedPolicy{}), InvalidInput);
  CHECK_THROWS_AS(sample_gaussian_features(root, 5, 8, SeedPolicy{}), InvalidInput);
}

TEST_CASE("identity gram gives F F^T close to I at large P") {
  const auto F = sample_gaussian_features(Matrix::Identity(3, 3), 100000, 3, SeedPolicy{2, 0});
  CHECK((empirical_kernel(F) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("sampling is deterministic per seed policy") {
  const Matrix root = sqrt_gram(spectral_decompose(gram_matrix(KernelSpec::rbf(1.0), rbf_points(6, 4))));
  const auto a = sample_gaussian_features(root, 20, 4, SeedPolicy{7, 3});
  const auto b = sample_gaussian_features(root, 20, 4, SeedPolicy{7, 3});
  const auto c = sample_gaussian_features(root, 20, 4, SeedPolicy{7, 4});
  CHECK(a.entries == b.entries);
  CHECK(a.entries != c.entries);

  const Matrix X = rbf_points(5, 9);
  const auto fa = sample_fourier_features(X, 1.5, 30, SeedPolicy{7, 3});
  const auto fb = sample_fourier_features(X, 1.5, 30, SeedPolicy{7, 3});
  CHECK(fa.entries == fb.entries);
}

TEST_CASE("gaussian features have mean zero and covariance K") {
  const Matrix X = rbf_points(3, 21);
  const GramMatrix K = gram_matrix(KernelSpec::rbf(2.0), X);
  const Matrix root = sqrt_gram(spectral_decompose(K));
  const int trials = 4000;
  double mean0 = 0.0, cross = 0.0, cross_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    // P = 1 so each trial is one draw of the feature process at the three points.
    const auto F = sample_gaussian_features(root, 1, 3, SeedPolicy{5, static_cast<std::uint64_t>(t)});
    mean0 += F.entries(0, 0);
    const double prod = F.entries(0, 0) * F.entries(1, 0);
    cross += prod;
    cross_sq += prod * prod;
  }
  mean0 /= trials;
  cross /= trials;
  const double sd = std::sqrt(cross_sq / trials - cross * cross);
  CHECK(std::abs(mean0) < 3.0 / std::sqrt(double(trials)));
  CHECK(std::abs(cross - K(0, 1)) < 3.0 * sd / std::sqrt(double(trials)));
}

TEST_CASE("fourier features") {
  SUBCASE("raw values bounded by sqrt 2") {
    const Eigen::Index P = 200;
    const auto F = sample_fourier_features(rbf_points(10, 1), 0.7, P, SeedPolicy{3, 0});
    CHECK((F.entries * std::sqrt(double(P))).cwiseAbs().maxCoeff() <= std::sqrt(2.0) + 1e-12);
    CHECK(F.n_train == 10);
  }
  SUBCASE("diagonal of the empirical kernel tends to 1") {
    Matrix X(1, 1);
    X << 0.4;
    const auto F = sample_fourier_features(X, 2.0, 100000, SeedPolicy{4, 0});
    CHECK(std::abs(empirical_kernel(F)(0, 0) - 1.0) < 0.02);
  }
  SUBCASE("off-diagonal matches the rbf kernel") {
    Matrix X(2, 1);
    X << 0.0, 1.0;
    const auto F = sample_fourier_features(X, 2.0, 100000, SeedPolicy{4, 1});
    CHECK(std::abs(empirical_kernel(F)(0, 1) - std::exp(-0.5)) < 0.02);
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(sample_fourier_features(rbf_points(3, 1), 1.0, 0, SeedPolicy{}), InvalidInput);
    CHECK_THROWS_AS(sample_fourier_features(rbf_points(3, 1), 0.0, 5, SeedPolicy{}), InvalidInput);
  }
}

TEST_CASE("empirical kernel") {
  FeatureMatrix F;
  F.entries = Matrix(3, 1);
  F.entries << 1.0, -2.0, 0.5;
  F.n_train = 3;
  const Vector v = F.entries.col(0);
  CHECK(empirical_kernel(F) == v * v.transpose());

  const Matrix root = sqrt_gram(spectral_decompose(gram_matrix(KernelSpec::rbf(1.0), rbf_points(8, 2))));
  const auto G = sample_gaussian_features(root, 50, 8, SeedPolicy{1, 1});
  const Matrix KP = empirical_kernel(G);
  CHECK(KP == KP.transpose());
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(KP).eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("empirical kernel error decays like P^-1/2") {
  const GramMatrix K = gram_matrix(KernelSpec::rbf(1.0), rbf_points(8, 13));
  const Matrix root = sqrt_gram(spectral_decompose(K));
  std::vector<double> ps{100, 1000, 10000};
  std::vector<double> errs;
  for (double p : ps) {
    double acc = 0.0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
      const auto F = sample_gaussian_features(root, static_cast<Eigen::Index>(p), 8,
                                              SeedPolicy{77, static_cast<std::uint64_t>(r)});
      acc += (empirical_kernel(F) - K.entries()).cwiseAbs().maxCoeff();
    }
    errs.push_back(acc / reps);
  }
  const double slope = oracle::log_log_slope(ps, errs);
  CHECK(std::abs(slope + 0.5) < 0.15);

  // Fourier features converge to the rbf kernel at the same rate.
  const Matrix X = rbf_points(6, 14);
  const GramMatrix Kx = gram_matrix(KernelSpec::rbf(1.0), X);
  std::vector<double> ferrs;
  for (double p : ps) {
    double acc = 0.0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
      const auto F = sample_fourier_features(X, 1.0, static_cast<Eigen::Index>(p),
                                             SeedPolicy{78, static_cast<std::uint64_t>(r)});
      acc += (empirical_kernel(F) - Kx.entries()).cwiseAbs().maxCoeff();
    }
    ferrs.push_back(acc / reps);
  }
  CHECK(std::abs(oracle::log_log_slope(ps, ferrs) + 0.5) < 0.15);
}
