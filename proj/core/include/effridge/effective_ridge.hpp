#pragma once

// The effective ridge: the unique positive solution t of
//
//   t = lambda + (t / gamma) (1/N) sum_i d_i / (t + d_i),
//
// where d_i are the Gram eigenvalues and gamma = P / N. The average
// lambda-RF predictor is close to the KRR predictor with ridge t.

#include "effridge/linalg_kernel.hpp"

namespace effridge {

struct SpectrumInput {
  Vector eigenvalues;  // d_i >= 0
  double gamma = 1.0;  // P / N
  double lambda = 0.0;

  void validate() const;
};

struct EffectiveRidge {
  double lambda_tilde = 0.0;
  double d_lambda_tilde = 0.0;       // derivative with respect to lambda
  double effective_dimension = 0.0;  // sum d_i / (lambda_tilde + d_i)
  double residual = 0.0;             // |fixed-point equation| at lambda_tilde
  double gamma = 0.0;
  double lambda = 0.0;
};

/// Residual t - lambda - (t/gamma) mean(d / (t + d)) of the defining equation.
double effective_ridge_residual(const SpectrumInput& input, double lambda_tilde);

/// Solves the fixed point. For lambda > 0 the root is bracketed in
/// [lambda, lambda + T/gamma] with T the mean eigenvalue. For lambda = 0
/// delegates to ridgeless_limit. Converges to |residual| < 1e-12 max(t, 1).
EffectiveRidge solve_effective_ridge(const SpectrumInput& input);

/// 1 / (1 - (1/(gamma N)) sum d/(t+d) + (t/(gamma N)) sum d/(t+d)^2).
double effective_ridge_derivative(const SpectrumInput& input, double lambda_tilde);

double effective_dimension(const Vector& eigenvalues, double lambda_tilde);

/// Limit of the effective ridge as lambda -> 0: zero for gamma > 1, the
/// positive root of gamma = mean(d / (t + d)) for gamma < 1. Throws
/// AtThreshold at gamma = 1.
double ridgeless_limit(const Vector& eigenvalues, double gamma);

/// Explicit ridge lambda giving effective ridge lambda_star:
/// lambda = lambda_star - (lambda_star/gamma) mean(d / (lambda_star + d)).
/// Throws InfeasibleTarget when that is not positive.
double calibrate_ridge(const Vector& eigenvalues, double gamma, double lambda_star);

/// d_lambda_tilde * y^T K (K + lambda_tilde I)^{-2} y: the predicted mean of ||theta||^2.
double parameter_norm_theory(const GramSpectrum& spectrum, const Vector& y,
                             const EffectiveRidge& eff);

/// Leading term of the RF predictor variance lower bound at a point x:
/// d_lambda_tilde * (y^T M y / P) * posterior_kernel(x, x), M = K (K + lambda_tilde I)^{-2}.
double theoretical_variance_term(const GramSpectrum& spectrum, const Vector& y,
                                 const SpectrumInput& input, double k_tilde_xx, double P);

}  // namespace effridge
