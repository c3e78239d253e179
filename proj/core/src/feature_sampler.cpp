#include "effridge/feature_sampler.hpp"

#include "effridge/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace effridge {

namespace {

void check_counts(Eigen::Index P, Eigen::Index n_train, Eigen::Index rows) {
  if (P < 1) throw InvalidInput("feature count P must be at least 1");
  if (n_train < 0 || n_train > rows) {
    throw InvalidInput("n_train " + std::to_string(n_train) + " outside [0, " +
                       std::to_string(rows) + "]");
  }
}

}  // namespace

FeatureMatrix sample_gaussian_features(const Matrix& joint_sqrt, Eigen::Index P,
                                       Eigen::Index n_train, const SeedPolicy& policy) {
  if (joint_sqrt.rows() != joint_sqrt.cols()) {
    throw InvalidInput("joint square root must be square");
  }
  check_counts(P, n_train, joint_sqrt.rows());
  const Eigen::Index m = joint_sqrt.rows();

  FeatureMatrix out;
  out.seed = policy.derived_seed();
  out.n_train = n_train;
  Rng rng(out.seed);
  // Column j of W^T is the j-th feature's white noise over the M points.
  Matrix noise(m, P);
  for (Eigen::Index j = 0; j < P; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) noise(i, j) = rng.normal();
  }
  out.entries.noalias() = joint_sqrt * noise;
  out.entries /= std::sqrt(static_cast<double>(P));
  return out;
}

FeatureMatrix sample_fourier_features(const Matrix& X_all, double lengthscale, Eigen::Index P,
                                      const SeedPolicy& policy, Eigen::Index n_train) {
  if (!(lengthscale > 0.0)) throw InvalidInput("fourier features need a positive lengthscale");
  if (!X_all.allFinite()) throw InvalidInput("non-finite coordinates");
  if (n_train < 0) n_train = X_all.rows();
  check_counts(P, n_train, X_all.rows());

  FeatureMatrix out;
  out.seed = policy.derived_seed();
  out.n_train = n_train;
  Rng rng(out.seed);
  const Eigen::Index d = X_all.cols();
  const double freq_sd = std::sqrt(2.0 / lengthscale);
  Matrix freqs(d, P);
  Vector phases(P);
  for (Eigen::Index j = 0; j < P; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) freqs(k, j) = freq_sd * rng.normal();
    phases(j) = 2.0 * std::numbers::pi * rng.uniform();
  }
  Matrix arg = X_all * freqs;
  arg.rowwise() += phases.transpose();
  out.entries = std::sqrt(2.0 / static_cast<double>(P)) * arg.array().cos().matrix();
  return out;
}

Matrix empirical_kernel(const FeatureMatrix& F) {
  Matrix out = F.entries * F.entries.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace effridge
