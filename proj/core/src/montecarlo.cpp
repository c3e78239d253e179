#include "effridge/montecarlo.hpp"

#include "effridge/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

namespace effridge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001B3ULL;
    }
  }
  template <class T>
  void value(const T& v) { bytes(&v, sizeof v); }
  void matrix(const Matrix& m) {
    value(m.rows());
    value(m.cols());
    bytes(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xCBF29CE484222325ULL;
};

struct TrialOutput {
  Vector test_predictions;
  Vector train_predictions;
  double theta_norm_sq = 0.0;
};

void check_lengths(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw InvalidInput(std::string(what) + ": length " + std::to_string(a) + " vs " +
                       std::to_string(b));
  }
}

}  // namespace

void RunningMoments::add(const Vector& sample) {
  if (count_ == 0 && mean_.size() == 0) {
    mean_ = Vector::Zero(sample.size());
    m2_ = Vector::Zero(sample.size());
  }
  check_lengths(sample.size(), mean_.size(), "running moments");
  ++count_;
  const Vector delta = sample - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta.cwiseProduct(sample - mean_);
}

Vector RunningMoments::variance() const {
  if (count_ < 2) throw InvalidInput("variance needs at least two samples");
  return m2_ / static_cast<double>(count_ - 1);
}

Vector TrialStats::standard_error() const {
  if (!has_variance()) throw InvalidInput("standard error needs at least two trials");
  return (var_prediction / static_cast<double>(trials)).cwiseSqrt();
}

double TrialStats::rms_band(double k) const {
  if (!has_variance()) throw InvalidInput("error band needs at least two trials");
  return k * std::sqrt(var_prediction.mean() / static_cast<double>(trials));
}

RFExperiment::RFExperiment(Dataset train, Matrix test_X, KernelSpec kernel)
    : train_(std::move(train)), test_X_(std::move(test_X)), kernel_(kernel) {
  train_.validate();
  kernel_.validate();
  if (test_X_.rows() < 1) throw InvalidInput("need at least one test point");
  if (test_X_.cols() != train_.dim()) throw InvalidInput("test points have the wrong dimension");

  Matrix all(train_.size() + test_X_.rows(), train_.dim());
  all << train_.X, test_X_;
  const GramMatrix joint = gram_matrix(kernel_, all);
  joint_sqrt_ = sqrt_gram(spectral_decompose(joint));
  train_spectrum_ =
      spectral_decompose(GramMatrix(joint.entries().topLeftCorner(train_.size(), train_.size())));
  cross_ = joint.entries().bottomLeftCorner(test_X_.rows(), train_.size());

  Fnv1a h;
  h.matrix(train_.X);
  h.matrix(train_.y);
  h.matrix(test_X_);
  h.value(static_cast<int>(kernel_.kind));
  h.value(kernel_.lengthscale);
  data_hash_ = h.digest();
}

TrialStats RFExperiment::run(Eigen::Index P, double lambda, int trials, std::uint64_t base_seed,
                             FeatureKind kind, const RunOptions& options) const {
  if (trials < 1) throw InvalidInput("need at least one trial");
  if (P < 1) throw InvalidInput("feature count P must be at least 1");
  if (!(lambda >= 0.0)) throw InvalidInput("ridge must be nonnegative");

  const Eigen::Index n = n_train();
  Matrix all;
  if (kind == FeatureKind::fourier) {
    all.resize(n + n_test(), train_.dim());
    all << train_.X, test_X_;
  }

  std::vector<TrialOutput> outputs(static_cast<std::size_t>(trials));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
  const auto one_trial = [&](int t) {
    const SeedPolicy policy{base_seed, static_cast<std::uint64_t>(t)};
    const FeatureMatrix F =
        kind == FeatureKind::gaussian
            ? sample_gaussian_features(joint_sqrt_, P, n, policy)
            : sample_fourier_features(all, kernel_.lengthscale, P, policy, n);
    const RFModel model = fit_rf(F.train(), train_.y, lambda);
    auto& out = outputs[static_cast<std::size_t>(t)];
    out.test_predictions = predict_rf(model, F.test());
    out.train_predictions = model.train_predictions;
    out.theta_norm_sq = model.theta_norm_sq;
  };

  int threads = options.threads > 0 ? options.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, trials);
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int t = next++; t < trials; t = next++) {
      try {
        one_trial(t);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (int t = 0; t < trials; ++t) {
    if (const auto& err = errors[static_cast<std::size_t>(t)]) {
      try {
        std::rethrow_exception(err);
      } catch (const Error& e) {
        rethrow_with_context(e, "trial " + std::to_string(t) + ": ");
      }
    }
  }

  RunningMoments test_moments(n_test());
  RunningMoments train_moments(n);
  RunningMoments norm_moments(1);
  for (const auto& out : outputs) {
    test_moments.add(out.test_predictions);
    train_moments.add(out.train_predictions);
    norm_moments.add(Vector::Constant(1, out.theta_norm_sq));
  }

  TrialStats stats;
  stats.trials = trials;
  stats.mean_prediction = test_moments.mean();
  stats.mean_train_prediction = train_moments.mean();
  stats.mean_theta_norm_sq = norm_moments.mean()(0);
  if (trials >= 2) {
    stats.var_prediction = test_moments.variance();
    stats.var_theta_norm_sq = norm_moments.variance()(0);
  } else {
    stats.var_prediction = Vector::Constant(n_test(), kNaN);
    stats.var_theta_norm_sq = kNaN;
  }

  Fnv1a h;
  h.value(data_hash_);
  h.value(P);
  h.value(lambda);
  h.value(trials);
  h.value(base_seed);
  h.value(static_cast<int>(kind));
  std::ostringstream digest;
  digest << std::hex << h.digest();
  stats.config_digest = digest.str();
  return stats;
}

Vector RFExperiment::krr_predictions(double ridge, bool allow_pseudoinverse) const {
  return predict_krr(fit_krr(train_spectrum_, train_.y, ridge, allow_pseudoinverse), cross_);
}

EffectiveRidge RFExperiment::effective_ridge(Eigen::Index P, double lambda) const {
  const double gamma = static_cast<double>(P) / static_cast<double>(n_train());
  return solve_effective_ridge({train_spectrum_.eigenvalues, gamma, lambda});
}

TrialStats run_trials(const Dataset& dataset, const Matrix& test_X, const KernelSpec& kernel,
                      Eigen::Index P, double lambda, int trials, std::uint64_t base_seed,
                      FeatureKind kind, const RunOptions& options) {
  const RFExperiment experiment(dataset, test_X, kernel);
  return experiment.run(P, lambda, trials, base_seed, kind, options);
}

RiskReport bias_variance_decompose(const TrialStats& stats, const Vector& f_star,
                                   const std::optional<Vector>& krr_predictions) {
  check_lengths(stats.mean_prediction.size(), f_star.size(), "f_star");
  if (!f_star.allFinite()) throw InvalidInput("f_star has non-finite entries");
  if (!stats.has_variance()) throw InvalidInput("risk decomposition needs at least two trials");
  RiskReport report;
  report.risk_of_mean = estimate_risk(stats.mean_prediction, f_star);
  report.mean_variance = stats.var_prediction.mean();
  report.expected_risk = report.risk_of_mean + report.mean_variance;
  if (krr_predictions) {
    report.krr_risk = estimate_risk(*krr_predictions, f_star);
    report.discrepancy = report.expected_risk - *report.krr_risk;
  }
  return report;
}

Discrepancy compare_average_to_krr(const TrialStats& stats, const Vector& krr_predictions) {
  check_lengths(stats.mean_prediction.size(), krr_predictions.size(), "krr predictions");
  const Vector diff = stats.mean_prediction - krr_predictions;
  if (diff.size() == 0) return {};
  return {diff.cwiseAbs().maxCoeff(), std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()))};
}

ThetaNormCheck theta_norm_check(const TrialStats& stats, const GramSpectrum& spectrum,
                                const Vector& y, const EffectiveRidge& eff, Eigen::Index P) {
  if (P < 1) throw InvalidInput("feature count P must be at least 1");
  ThetaNormCheck out;
  out.empirical = stats.mean_theta_norm_sq;
  out.theoretical = parameter_norm_theory(spectrum, y, eff);
  out.gap = std::abs(out.empirical - out.theoretical);
  return out;
}

double estimate_risk(const Vector& predictions, const Vector& targets) {
  check_lengths(predictions.size(), targets.size(), "risk");
  if (predictions.size() == 0) throw InvalidInput("risk over an empty set");
  return (predictions - targets).squaredNorm() / static_cast<double>(predictions.size());
}

}  // namespace effridge
