#pragma once

// Repeated RF fits over independent feature draws, and the statistics that
// are compared against the effective-ridge theory.
//
// Trials may run on several threads, but every trial is a pure function of
// (configuration, derived seed) and results are merged in trial order, so
// the statistics are bit-identical for any thread count.

#include "effridge/effective_ridge.hpp"
#include "effridge/feature_sampler.hpp"
#include "effridge/linalg_kernel.hpp"
#include "effridge/predictors.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace effridge {

/// Welford accumulator over vectors of a fixed length.
class RunningMoments {
 public:
  explicit RunningMoments(Eigen::Index size = 0) : mean_(Vector::Zero(size)), m2_(Vector::Zero(size)) {}

  void add(const Vector& sample);

  long count() const { return count_; }
  const Vector& mean() const { return mean_; }
  /// Unbiased sample variance; requires count() >= 2.
  Vector variance() const;

 private:
  long count_ = 0;
  Vector mean_;
  Vector m2_;
};

struct TrialStats {
  Vector mean_prediction;        // test points
  Vector var_prediction;         // NaN when trials < 2
  double mean_theta_norm_sq = 0.0;
  double var_theta_norm_sq = 0.0;  // NaN when trials < 2
  Vector mean_train_prediction;
  int trials = 0;
  std::string config_digest;

  bool has_variance() const { return trials >= 2; }
  /// sqrt(var / trials) per test point.
  Vector standard_error() const;
  /// k * sqrt(mean(var) / trials): the band an RMSE against the true mean is compared with.
  double rms_band(double k = 3.0) const;
};

struct RiskReport {
  double risk_of_mean = 0.0;     // L(E[f])
  double mean_variance = 0.0;    // E_D[Var f(x)]
  double expected_risk = 0.0;    // E[L(f)]
  std::optional<double> krr_risk;     // L of the supplied KRR predictions
  std::optional<double> discrepancy;  // expected_risk - krr_risk
};

struct Discrepancy {
  double max_abs = 0.0;
  double rmse = 0.0;
};

struct ThetaNormCheck {
  double empirical = 0.0;
  double theoretical = 0.0;
  double gap = 0.0;
};

struct RunOptions {
  int threads = 0;  // 0: std::thread::hardware_concurrency()
};

/// Precomputes the joint train+test kernel, its square root and the training
/// spectrum once, then serves any number of (P, lambda) Monte Carlo runs.
class RFExperiment {
 public:
  RFExperiment(Dataset train, Matrix test_X, KernelSpec kernel);

  const Dataset& train() const { return train_; }
  const Matrix& test_X() const { return test_X_; }
  const KernelSpec& kernel() const { return kernel_; }
  const GramSpectrum& train_spectrum() const { return train_spectrum_; }
  /// K(test, train), M x N.
  const Matrix& cross_kernel() const { return cross_; }
  const Matrix& joint_sqrt() const { return joint_sqrt_; }
  Eigen::Index n_train() const { return train_.size(); }
  Eigen::Index n_test() const { return test_X_.rows(); }

  TrialStats run(Eigen::Index P, double lambda, int trials, std::uint64_t base_seed,
                 FeatureKind kind = FeatureKind::gaussian, const RunOptions& options = {}) const;

  /// KRR predictions at the test points with the given ridge.
  Vector krr_predictions(double ridge, bool allow_pseudoinverse = false) const;

  EffectiveRidge effective_ridge(Eigen::Index P, double lambda) const;

 private:
  Dataset train_;
  Matrix test_X_;
  KernelSpec kernel_;
  GramSpectrum train_spectrum_;
  Matrix cross_;
  Matrix joint_sqrt_;
  std::uint64_t data_hash_ = 0;
};

TrialStats run_trials(const Dataset& dataset, const Matrix& test_X, const KernelSpec& kernel,
                      Eigen::Index P, double lambda, int trials, std::uint64_t base_seed,
                      FeatureKind kind = FeatureKind::gaussian, const RunOptions& options = {});

RiskReport bias_variance_decompose(const TrialStats& stats, const Vector& f_star,
                                   const std::optional<Vector>& krr_predictions = std::nullopt);

Discrepancy compare_average_to_krr(const TrialStats& stats, const Vector& krr_predictions);

ThetaNormCheck theta_norm_check(const TrialStats& stats, const GramSpectrum& spectrum,
                                const Vector& y, const EffectiveRidge& eff, Eigen::Index P);

/// Mean squared difference.
double estimate_risk(const Vector& predictions, const Vector& targets);

}  // namespace effridge
