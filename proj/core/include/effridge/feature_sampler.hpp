#pragma once

// Random feature matrices over the joint set of training and test points.
//
// Row i, column j holds (1/sqrt(P)) phi_j(x_i), so the training block F
// satisfies E[F F^T] = K(X, X) and the empirical kernel is F F^T.

#include "effridge/linalg_kernel.hpp"
#include "effridge/rng.hpp"

#include <cstdint>

namespace effridge {

struct FeatureMatrix {
  Matrix entries;            // (N + N_test) x P
  Eigen::Index n_train = 0;  // first n_train rows are the training block
  std::uint64_t seed = 0;    // derived stream seed

  Eigen::Index features() const { return entries.cols(); }
  Eigen::Index rows() const { return entries.rows(); }

  auto train() const { return entries.topRows(n_train); }
  auto test() const { return entries.bottomRows(entries.rows() - n_train); }
};

enum class FeatureKind { gaussian, fourier };

/// (1/sqrt P) K^{1/2} W^T with W a P x M standard normal matrix filled
/// feature by feature from the derived stream.
FeatureMatrix sample_gaussian_features(const Matrix& joint_sqrt, Eigen::Index P,
                                       Eigen::Index n_train, const SeedPolicy& policy);

/// sqrt(2/P) cos(x^T w_j + b_j) with w_j ~ N(0, (2/lengthscale) I) and b_j ~ U[0, 2 pi).
/// The sqrt(2/P) factor is the whole scaling: it already contains the 1/sqrt(P).
FeatureMatrix sample_fourier_features(const Matrix& X_all, double lengthscale, Eigen::Index P,
                                      const SeedPolicy& policy, Eigen::Index n_train = -1);

/// F F^T over all rows.
Matrix empirical_kernel(const FeatureMatrix& F);

}  // namespace effridge
