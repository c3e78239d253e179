#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "effridge/effective_ridge.hpp"
#include "effridge/errors.hpp"
#include "effridge/montecarlo.hpp"
#include "effridge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace effridge;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Sorted uniform points on [0, 2 pi) with labels sin(x); test grid 2 pi k / M.
struct Sinusoid {
  Dataset train;
  Matrix test_X;
  Vector f_star;
};

Sinusoid sinusoid(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (auto& x : xs) x = 2.0 * std::numbers::pi * rng.uniform();
  std::sort(xs.begin(), xs.end());
  Sinusoid s;
  s.train.X.resize(n, 1);
  s.train.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.train.X(i, 0) = xs[static_cast<std::size_t>(i)];
    s.train.y(i) = std::sin(xs[static_cast<std::size_t>(i)]);
  }
  s.test_X.resize(m, 1);
  s.f_star.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    s.test_X(k, 0) = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
    s.f_star(k) = std::sin(s.test_X(k, 0));
  }
  return s;
}

Dataset gaussian_points(Eigen::Index n, Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.X.resize(n, dim);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < data.X.size(); ++i) data.X.data()[i] = rng.normal();
  for (Eigen::Index i = 0; i < n; ++i) data.y(i) = std::tanh(data.X(i, 0)) + 0.3 * rng.normal();
  return data;
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = rng.normal();
  return M;
}

TrialStats stats_from(const Vector& mean, const Vector& var, int trials) {
  TrialStats s;
  s.mean_prediction = mean;
  s.var_prediction = var;
  s.trials = trials;
  return s;
}

}  // namespace

TEST_CASE("running moments match two-pass formulas") {
  Rng rng(5);
  std::vector<Vector> samples;
  for (int k = 0; k < 50; ++k) {
    Vector v(3);
    v << 1e6 + rng.normal(), rng.normal() * 1e-3, 7.0;
    samples.push_back(v);
  }
  RunningMoments moments(3);
  for (const auto& s : samples) moments.add(s);

  Vector mean = Vector::Zero(3);
  for (const auto& s : samples) mean += s;
  mean /= 50.0;
  Vector var = Vector::Zero(3);
  for (const auto& s : samples) var += (s - mean).cwiseAbs2();
  var /= 49.0;

  CHECK(moments.count() == 50);
  CHECK((moments.mean() - mean).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((moments.variance() - var).cwiseAbs().maxCoeff() < 1e-9 * var.maxCoeff());
  CHECK(moments.variance()(2) == 0.0);

  RunningMoments one(2);
  one.add(vec2(1.0, 2.0));
  CHECK_THROWS_AS(one.variance(), InvalidInput);
  CHECK_THROWS_AS(one.add(Vector::Ones(3)), InvalidInput);
}

TEST_CASE("risk examples") {
  CHECK(estimate_risk(vec2(1.0, 2.0), vec2(0.0, 0.0)) == 2.5);
  CHECK(estimate_risk(vec2(1.5, -2.0), vec2(0.5, -3.0)) == 1.0);
  CHECK(estimate_risk(vec2(1.5, -2.0), vec2(1.5, -2.0)) == 0.0);
  CHECK_THROWS_AS(estimate_risk(vec2(1.0, 2.0), Vector::Zero(3)), InvalidInput);

  SUBCASE("hand decomposition") {
    const auto r = bias_variance_decompose(stats_from(vec2(1.0, 0.0), vec2(0.5, 0.5), 10),
                                           vec2(0.0, 0.0));
    CHECK(r.risk_of_mean == doctest::Approx(0.5));
    CHECK(r.mean_variance == doctest::Approx(0.5));
    CHECK(r.expected_risk == doctest::Approx(1.0));
    CHECK_FALSE(r.krr_risk.has_value());
  }
  SUBCASE("unbiased mean") {
    const auto r = bias_variance_decompose(stats_from(vec2(0.3, -1.0), vec2(0.2, 0.4), 10),
                                           vec2(0.3, -1.0));
    CHECK(r.expected_risk == doctest::Approx(r.mean_variance));
  }
  SUBCASE("with krr") {
    const auto r = bias_variance_decompose(stats_from(vec2(1.0, 0.0), vec2(0.5, 0.5), 10),
                                           vec2(0.0, 0.0), vec2(0.0, 1.0));
    REQUIRE(r.krr_risk.has_value());
    CHECK(*r.krr_risk == doctest::Approx(0.5));
    CHECK(*r.discrepancy == doctest::Approx(0.5));
  }
  SUBCASE("needs two trials") {
    CHECK_THROWS_AS(bias_variance_decompose(stats_from(vec2(1.0, 0.0), vec2(0.5, 0.5), 1),
                                            vec2(0.0, 0.0)),
                    InvalidInput);
  }
  SUBCASE("compare to krr") {
    const auto same = compare_average_to_krr(stats_from(vec2(1.0, 2.0), vec2(0, 0), 2), vec2(1.0, 2.0));
    CHECK(same.max_abs == 0.0);
    CHECK(same.rmse == 0.0);
    const auto d = compare_average_to_krr(stats_from(vec2(1.0, 2.0), vec2(0, 0), 2), vec2(0.0, 4.0));
    CHECK(d.max_abs == 2.0);
    CHECK(d.rmse == doctest::Approx(std::sqrt(2.5)));
    CHECK_THROWS_AS(compare_average_to_krr(stats_from(vec2(1.0, 2.0), vec2(0, 0), 2), Vector::Ones(3)),
                    InvalidInput);
  }
}

TEST_CASE("trial statistics") {
  const Dataset data = gaussian_points(8, 2, 11);
  const Matrix test_X = gaussian_matrix(5, 2, 12);
  const RFExperiment exp(data, test_X, KernelSpec::rbf(2.0));

  SUBCASE("single trial has no variance") {
    const auto s = exp.run(10, 0.1, 1, 3);
    CHECK_FALSE(s.has_variance());
    CHECK(s.var_prediction.size() == 5);
    CHECK(std::isnan(s.var_prediction(0)));
    CHECK(std::isnan(s.var_theta_norm_sq));
    CHECK_THROWS_AS(s.rms_band(), InvalidInput);
  }

  SUBCASE("decomposition identity and nonnegative variance") {
    const auto s = exp.run(12, 0.05, 40, 9);
    CHECK(s.var_prediction.minCoeff() >= 0.0);
    CHECK(s.var_theta_norm_sq >= 0.0);
    const Vector f_star = test_X.col(0).array().tanh();
    const auto r = bias_variance_decompose(s, f_star, exp.krr_predictions(0.05));
    CHECK(std::abs(r.expected_risk - (r.risk_of_mean + r.mean_variance)) <=
          1e-10 * r.expected_risk);
  }

  SUBCASE("bit-identical for any thread count") {
    const auto a = exp.run(9, 0.01, 23, 77, FeatureKind::gaussian, {1});
    const auto b = exp.run(9, 0.01, 23, 77, FeatureKind::gaussian, {3});
    const auto c = exp.run(9, 0.01, 23, 77, FeatureKind::gaussian, {8});
    CHECK(a.mean_prediction == b.mean_prediction);
    CHECK(a.var_prediction == b.var_prediction);
    CHECK(a.mean_theta_norm_sq == b.mean_theta_norm_sq);
    CHECK(a.mean_prediction == c.mean_prediction);
    CHECK(a.config_digest == b.config_digest);

    const auto other_seed = exp.run(9, 0.01, 23, 78, FeatureKind::gaussian, {1});
    CHECK(other_seed.mean_prediction != a.mean_prediction);
    CHECK(other_seed.config_digest != a.config_digest);

    const auto f1 = exp.run(9, 0.01, 6, 77, FeatureKind::fourier, {1});
    const auto f2 = exp.run(9, 0.01, 6, 77, FeatureKind::fourier, {4});
    CHECK(f1.mean_prediction == f2.mean_prediction);
  }

  SUBCASE("run_trials matches the experiment object") {
    const auto a = run_trials(data, test_X, KernelSpec::rbf(2.0), 9, 0.01, 5, 4);
    const auto b = exp.run(9, 0.01, 5, 4);
    CHECK(a.mean_prediction == b.mean_prediction);
    CHECK(a.config_digest == b.config_digest);
  }

  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(exp.run(0, 0.1, 5, 1), InvalidInput);
    CHECK_THROWS_AS(exp.run(5, -0.1, 5, 1), InvalidInput);
    CHECK_THROWS_AS(exp.run(5, 0.1, 0, 1), InvalidInput);
    CHECK_THROWS_AS(RFExperiment(data, gaussian_matrix(3, 4, 1), KernelSpec::rbf(1.0)), InvalidInput);
  }
}

TEST_CASE("trial errors name the failing trial") {
  // A nearly repeated point and huge opposite labels overflow the ridge solve.
  Dataset data;
  data.X.resize(3, 1);
  data.X << 0.0, 1e-5, 1.0;
  data.y.resize(3);
  data.y << 1e308, -1e308, 0.0;
  const RFExperiment exp(data, gaussian_matrix(2, 1, 3), KernelSpec::rbf(1.0));
  CHECK_THROWS_WITH_AS(exp.run(50, 1e-300, 3, 1), doctest::Contains("trial 0: "), NumericError);
}

TEST_CASE("ridgeless overparameterized fit interpolates on average") {
  const Dataset data = gaussian_points(6, 2, 21);
  const RFExperiment exp(data, gaussian_matrix(3, 2, 22), KernelSpec::rbf(1.5));
  const auto s = exp.run(24, 0.0, 20, 5);
  CHECK((s.mean_train_prediction - data.y).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("theta norm check") {
  const Vector d = Vector::Ones(2);
  const GramSpectrum spec = GramSpectrum::from_eigenvalues(d);

  TrialStats zero;
  zero.mean_theta_norm_sq = 0.0;
  const auto eff = solve_effective_ridge({d, 1.0, 0.1});
  const auto z = theta_norm_check(zero, spec, Vector::Zero(2), eff, 2);
  CHECK(z.theoretical == 0.0);
  CHECK(z.gap == 0.0);

  TrialStats s;
  s.mean_theta_norm_sq = 2.0;
  const auto c = theta_norm_check(s, spec, Vector::Ones(2), eff, 2);
  CHECK(c.theoretical == doctest::Approx(2.279648).epsilon(1e-6));
  CHECK(c.gap == doctest::Approx(c.theoretical - 2.0));
  CHECK_THROWS_AS(theta_norm_check(s, spec, Vector::Ones(2), eff, 0), InvalidInput);
}

TEST_CASE("predictor variance exceeds half the leading lower-bound term") {
  // P >= 4N and lambda >= 0.1 keep the 1/P^2 correction small.
  for (std::uint64_t seed : {31, 32, 33}) {
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(seed % 3) * 3;
    const Dataset data = gaussian_points(n, 3, seed);
    const Matrix test_X = gaussian_matrix(4, 3, seed + 100);
    const KernelSpec kernel = KernelSpec::rbf(2.0 + static_cast<double>(seed % 2));
    const RFExperiment exp(data, test_X, kernel);
    for (Eigen::Index P : {4 * n, 8 * n}) {
      for (double lambda : {0.1, 1.0}) {
        const auto s = exp.run(P, lambda, 600, seed);
        const SpectrumInput input{exp.train_spectrum().eigenvalues,
                                  static_cast<double>(P) / static_cast<double>(n), lambda};
        for (Eigen::Index k = 0; k < test_X.rows(); ++k) {
          const Vector k_x = exp.cross_kernel().row(k).transpose();
          const double k_tilde = posterior_kernel(exp.train_spectrum(), k_x, 1.0);
          const double bound = theoretical_variance_term(exp.train_spectrum(), data.y, input,
                                                         k_tilde, static_cast<double>(P));
          CAPTURE(seed);
          CAPTURE(P);
          CAPTURE(lambda);
          CHECK(s.var_prediction(k) >= 0.5 * bound);
        }
      }
    }
  }
}

TEST_CASE("average RF on the sinusoid matches kernel ridge regression") {
  const Sinusoid s = sinusoid(4, 100, 1);
  const RFExperiment exp(s.train, s.test_X, KernelSpec::rbf(2.0));
  const auto outside_band = [](const TrialStats& stats, const Vector& krr) {
    const Vector band = 3.0 * stats.standard_error();
    int outside = 0;
    for (Eigen::Index k = 0; k < krr.size(); ++k) {
      if (std::abs(stats.mean_prediction(k) - krr(k)) >= band(k)) ++outside;
    }
    return outside;
  };
  // Two of these training points are 0.016 apart, so the smallest Gram
  // eigenvalue (~3e-5) is below the ridge and lambda = 1e-4 must be compared
  // with the effective-ridge KRR rather than the ridgeless one.
  const auto small_ridge = exp.run(100, 1e-4, 500, 1);
  CHECK(outside_band(small_ridge, exp.krr_predictions(exp.effective_ridge(100, 1e-4).lambda_tilde)) == 0);
  const auto ridgeless = exp.run(100, 0.0, 500, 1);
  CHECK(outside_band(ridgeless, exp.krr_predictions(0.0)) == 0);
}
