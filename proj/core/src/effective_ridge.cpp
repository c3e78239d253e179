#include "effridge/effective_ridge.hpp"

#include "effridge/errors.hpp"
#include "root_finding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace effridge {

namespace {

void check_spectrum(const Vector& eigenvalues) {
  if (eigenvalues.size() == 0) throw InvalidInput("empty spectrum");
  if (!eigenvalues.allFinite()) throw InvalidInput("spectrum has non-finite values");
  if (eigenvalues.minCoeff() < 0.0) throw InvalidInput("spectrum has negative eigenvalues");
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidInput("gamma must be positive and finite, got " + std::to_string(gamma));
  }
}

double residual_tolerance(double t) { return 1e-12 * std::max(t, 1.0); }

/// The ridgeless root can sit near 1e-14 for fast-decaying spectra, where an
/// absolute 1e-12 would accept almost anything. g(t) = t q(t) with
/// q(t) = 1 - mean(d/(t+d))/gamma, so this asks |q| < 1e-12 for t < 1.
double ridgeless_tolerance(double t) { return 1e-12 * std::min(t, 1.0); }

/// g(t) and g'(t) for the defining equation.
void eval_fixed_point(const Vector& d, double gamma, double lambda, double t, double& value,
                      double& slope) {
  const auto ratio = d.array() / (t + d.array());
  const double n = static_cast<double>(d.size());
  value = t - lambda - (t / gamma) * ratio.sum() / n;
  slope = 1.0 - ratio.square().sum() / (gamma * n);
}

EffectiveRidge finish(const SpectrumInput& input, double lambda_tilde) {
  EffectiveRidge out;
  out.lambda = input.lambda;
  out.gamma = input.gamma;
  out.lambda_tilde = lambda_tilde;
  out.residual = std::abs(effective_ridge_residual(input, lambda_tilde));
  out.d_lambda_tilde = effective_ridge_derivative(input, lambda_tilde);
  out.effective_dimension = effective_dimension(input.eigenvalues, lambda_tilde);
  return out;
}

}  // namespace

void SpectrumInput::validate() const {
  check_spectrum(eigenvalues);
  check_gamma(gamma);
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw InvalidInput("ridge must be nonnegative and finite, got " + std::to_string(lambda));
  }
}

double effective_ridge_residual(const SpectrumInput& input, double lambda_tilde) {
  double value = 0.0;
  double slope = 0.0;
  eval_fixed_point(input.eigenvalues, input.gamma, input.lambda, lambda_tilde, value, slope);
  return value;
}

EffectiveRidge solve_effective_ridge(const SpectrumInput& input) {
  input.validate();
  if (input.lambda == 0.0) return finish(input, ridgeless_limit(input.eigenvalues, input.gamma));

  const double trace_mean = input.eigenvalues.mean();
  if (trace_mean == 0.0) return finish(input, input.lambda);

  const auto eval = [&](double t, double& value, double& slope) {
    eval_fixed_point(input.eigenvalues, input.gamma, input.lambda, t, value, slope);
  };
  const auto root = detail::newton_in_bracket(eval, input.lambda,
                                              input.lambda + trace_mean / input.gamma,
                                              residual_tolerance);
  return finish(input, root.root);
}

double effective_ridge_derivative(const SpectrumInput& input, double lambda_tilde) {
  const Vector& d = input.eigenvalues;
  const double gn = input.gamma * static_cast<double>(d.size());
  double first = 0.0;
  double second = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) == 0.0) continue;
    const double denom = lambda_tilde + d(i);
    first += d(i) / denom;
    second += d(i) / (denom * denom);
  }
  const double denominator = 1.0 - first / gn + lambda_tilde * second / gn;
  if (!(denominator > 0.0)) {
    throw NumericError("effective ridge derivative has a nonpositive denominator " +
                       std::to_string(denominator));
  }
  return 1.0 / denominator;
}

double effective_dimension(const Vector& eigenvalues, double lambda_tilde) {
  if (lambda_tilde < 0.0) throw InvalidInput("effective ridge must be nonnegative");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double d = eigenvalues(i);
    if (d > 0.0) sum += d / (lambda_tilde + d);
  }
  return sum;
}

double ridgeless_limit(const Vector& eigenvalues, double gamma) {
  check_spectrum(eigenvalues);
  check_gamma(gamma);
  if (gamma == 1.0) {
    throw AtThreshold("ridgeless effective ridge is degenerate at gamma = 1");
  }
  if (gamma > 1.0) return 0.0;
  if (eigenvalues.minCoeff() <= 0.0) {
    throw InvalidInput("ridgeless limit for gamma < 1 needs a strictly positive spectrum");
  }
  const double root_gamma = std::sqrt(gamma);
  const double lower =
      eigenvalues.minCoeff() * (1.0 - root_gamma) / root_gamma * (1.0 - 1e-12);
  const double upper = eigenvalues.mean() / gamma;
  const auto eval = [&](double t, double& value, double& slope) {
    eval_fixed_point(eigenvalues, gamma, 0.0, t, value, slope);
  };
  return detail::newton_in_bracket(eval, lower, upper, ridgeless_tolerance).root;
}

double calibrate_ridge(const Vector& eigenvalues, double gamma, double lambda_star) {
  check_spectrum(eigenvalues);
  check_gamma(gamma);
  if (!(lambda_star > 0.0) || !std::isfinite(lambda_star)) {
    throw InvalidInput("target effective ridge must be positive and finite");
  }
  const double n = static_cast<double>(eigenvalues.size());
  const double shrink =
      (lambda_star / gamma) * (eigenvalues.array() / (lambda_star + eigenvalues.array())).sum() / n;
  const double lambda = lambda_star - shrink;
  if (!(lambda > 0.0)) {
    throw InfeasibleTarget("effective ridge " + std::to_string(lambda_star) +
                           " is at or below the ridgeless limit for gamma " +
                           std::to_string(gamma));
  }
  return lambda;
}

double parameter_norm_theory(const GramSpectrum& spectrum, const Vector& y,
                             const EffectiveRidge& eff) {
  if (y.size() != spectrum.size()) throw InvalidInput("label length does not match the spectrum");
  if (eff.lambda_tilde <= 0.0) require_positive_spectrum(spectrum, "parameter norm theory");
  const Vector c = spectrum.project(y);
  double quad = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double d = spectrum.eigenvalues(i);
    if (d == 0.0) continue;
    const double denom = eff.lambda_tilde + d;
    quad += d * c(i) * c(i) / (denom * denom);
  }
  return eff.d_lambda_tilde * quad;
}

double theoretical_variance_term(const GramSpectrum& spectrum, const Vector& y,
                                 const SpectrumInput& input, double k_tilde_xx, double P) {
  if (input.eigenvalues.size() != spectrum.size()) {
    throw InvalidInput("spectrum input does not match the gram spectrum");
  }
  if (!(k_tilde_xx >= 0.0)) throw InvalidInput("posterior variance must be nonnegative");
  if (!(P > 0.0)) throw InvalidInput("feature count must be positive");
  const EffectiveRidge eff = solve_effective_ridge(input);
  return parameter_norm_theory(spectrum, y, eff) / P * k_tilde_xx;
}

}  // namespace effridge
