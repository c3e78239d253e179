#pragma once

// Ridge fits of the random feature (RF) and kernel (KRR) predictors.

#include "effridge/feature_sampler.hpp"
#include "effridge/linalg_kernel.hpp"

#include <optional>

namespace effridge {

/// Fitted RF parameters for one feature sample.
struct RFModel {
  Vector theta_hat;          // P
  double lambda = 0.0;
  Vector train_predictions;  // F theta_hat
  double theta_norm_sq = 0.0;

  Eigen::Index features() const { return theta_hat.size(); }
};

/// Which normal equations to solve when lambda > 0. Both give the same theta.
enum class RidgeForm {
  automatic,  // dual when N <= P, primal otherwise
  dual,       // theta = F^T (F F^T + lambda I_N)^{-1} y
  primal,     // theta = (F^T F + lambda I_P)^{-1} F^T y
};

/// Relative singular-value cutoff of the ridgeless pseudoinverse.
inline constexpr double kPinvCutoff = 1e-10;

/// lambda > 0: ridge solution by symmetric factorization plus one refinement step.
/// lambda = 0: minimum-norm least squares through a pseudoinverse.
RFModel fit_rf(const Matrix& F_train, const Vector& y, double lambda,
               RidgeForm form = RidgeForm::automatic);

Vector predict_rf(const RFModel& model, const Matrix& F_eval);

struct KRRModel {
  Vector coefficients;  // (K + lambda I)^{-1} y
  double lambda = 0.0;
};

/// With lambda = 0 a numerically singular K throws SingularGram unless
/// allow_pseudoinverse is set.
KRRModel fit_krr(const GramMatrix& gram, const Vector& y, double lambda,
                 bool allow_pseudoinverse = false);

/// Spectral route: U diag(1/(d + lambda)) U^T y. Cheap when many ridges share one K.
KRRModel fit_krr(const GramSpectrum& spectrum, const Vector& y, double lambda,
                 bool allow_pseudoinverse = false);

/// k_cross is M x N, rows K(x, X).
Vector predict_krr(const KRRModel& model, const Matrix& k_cross);

/// Posterior covariance K(x,x') - K(x,X) K^{-1} K(X,x'). Without k_x2, x' = x
/// and k_xx is K(x,x); otherwise k_xx is K(x,x').
double posterior_kernel(const GramSpectrum& spectrum, const Vector& k_x, double k_xx,
                        const std::optional<Vector>& k_x2 = std::nullopt);

/// Mean and covariance scale of the RF predictor conditioned on F.
struct ConditionalMoments {
  Vector mean;            // K(x, X) K^{-1} y_hat per row of k_cross
  double cov_scale = 0.0; // ||theta||^2 / P; Cov = cov_scale * posterior kernel
};

ConditionalMoments conditional_moments(const FeatureMatrix& F, const GramSpectrum& spectrum,
                                       const Matrix& k_cross, const RFModel& model);

}  // namespace effridge
