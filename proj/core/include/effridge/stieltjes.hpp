#pragma once

// Stieltjes transforms of the generalized Wishart matrix F^T F and the
// expected smoother E[A_lambda], A_lambda = F (F^T F + lambda I)^{-1} F^T.

#include "effridge/linalg_kernel.hpp"
#include "effridge/rng.hpp"

#include <complex>
#include <cstdint>

namespace effridge {

using Complex = std::complex<double>;

struct StieltjesSolution {
  Complex z;
  Complex m_tilde;
  double residual = 0.0;      // |m - f_z(m)|, bounds the distance to the true root
  int iterations = 0;
  bool in_cone = false;       // m = u - v/z with u, v >= 0
  bool above_lower_bound = false;  // |m| >= 1 / (|z| + T/gamma)
};

enum class StieltjesMethod {
  continuation,  // Newton in t = 1/m, tracked from the real-axis effective ridge
  damped,        // m <- (1 - eta) m + eta f_z(m) from -1/z
};

struct StieltjesOptions {
  StieltjesMethod method = StieltjesMethod::continuation;
  double damping = 0.5;         // eta, damped method only
  int max_iterations = 100000;
  double tolerance = 1e-10;
};

/// Eigenvalues of F^T F for one draw of F = (1/sqrt P) diag(sqrt d) W^T.
struct WishartSample {
  Vector eigenvalues;  // P values, descending
  std::uint64_t seed = 0;
};

/// Draws W (P x N standard normal) from the derived stream. The law of the
/// spectrum only depends on the Gram eigenvalues, so the Gram is taken diagonal.
WishartSample sample_wishart(const Vector& gram_eigenvalues, Eigen::Index P,
                             const SeedPolicy& policy);

/// (1/P) sum_p 1 / (lambda_p - z). Rejects z on the closed positive real axis.
Complex empirical_stieltjes(const WishartSample& sample, Complex z);

/// f_z(m) = -(1/z) (1 - (1/gamma) mean(d m / (1 + d m))); its fixed point in
/// the cone spanned by 1 and -1/z is the deterministic equivalent of m_P(z).
Complex stieltjes_map(const Vector& d, double gamma, Complex z, Complex m);

/// With t = 1/m the fixed point is the effective ridge equation with complex
/// ridge -z. The default method starts from the real solution at Re(-z) and
/// follows Im(-z) from 0 with Newton corrections, which stays on the cone
/// branch. The damped iteration can settle on a second fixed point outside the
/// cone when gamma < 1 and |z| is small; it throws NumericError in that case.
/// Both end with one Newton polish. On the negative real axis the effective
/// ridge solver is used and m = 1 / lambda_tilde(-z).
StieltjesSolution theoretical_stieltjes(const Vector& d, double gamma, Complex z,
                                        const StieltjesOptions& options = {});

/// Monte Carlo mean and variance E|m_P - mean|^2 of the empirical transform.
struct StieltjesMoments {
  Complex mean;
  double variance = 0.0;
  int trials = 0;
};

StieltjesMoments stieltjes_monte_carlo(const Vector& gram_eigenvalues, Eigen::Index P, Complex z,
                                       int trials, const SeedPolicy& policy);

/// Eigenvalues d_i / (d_i + lambda_tilde) of K (K + lambda_tilde I)^{-1}.
Vector expected_A_theoretical(const Vector& d, double lambda_tilde);

/// Average of A_lambda over `trials` feature draws, symmetrized, in the basis of the Gram.
Matrix monte_carlo_expected_A(const GramSpectrum& spectrum, Eigen::Index P, double lambda,
                              int trials, const SeedPolicy& policy);

/// Eigenvalues (descending) of monte_carlo_expected_A.
Vector empirical_expected_A(const GramSpectrum& spectrum, Eigen::Index P, double lambda,
                            int trials, const SeedPolicy& policy);

}  // namespace effridge
