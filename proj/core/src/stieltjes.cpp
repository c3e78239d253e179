#include "effridge/stieltjes.hpp"

#include "effridge/effective_ridge.hpp"
#include "effridge/errors.hpp"
#include "effridge/feature_sampler.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace effridge {

namespace {

Complex map_derivative(const Vector& d, double gamma, Complex z, Complex m) {
  Complex sum = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const Complex denom = 1.0 + d(i) * m;
    sum += d(i) / (denom * denom);
  }
  return sum / (z * gamma * static_cast<double>(d.size()));
}

double fixed_point_residual(const Vector& d, double gamma, Complex z, Complex m) {
  return std::abs(m - stieltjes_map(d, gamma, z, m));
}

/// One Newton step on m - f_z(m); kept only if it lowers the residual.
Complex newton_polish(const Vector& d, double gamma, Complex z, Complex m) {
  const Complex phi = m - stieltjes_map(d, gamma, z, m);
  const Complex slope = 1.0 - map_derivative(d, gamma, z, m);
  if (std::abs(slope) == 0.0) return m;
  const Complex polished = m - phi / slope;
  return fixed_point_residual(d, gamma, z, polished) <= std::abs(phi) ? polished : m;
}

void classify(StieltjesSolution& s, const Vector& d, double gamma) {
  const Complex m = s.m_tilde;
  const Complex w = -1.0 / s.z;
  const double slack = 1e-12 * std::abs(m);
  if (std::abs(w.imag()) > 1e-300) {
    const double v = m.imag() / w.imag();
    const double u = m.real() - v * w.real();
    s.in_cone = u >= -slack && v >= -slack;
  } else {
    s.in_cone = std::abs(m.imag()) <= slack && m.real() >= -slack;
  }
  const double bound = 1.0 / (std::abs(s.z) + d.mean() / gamma);
  s.above_lower_bound = std::abs(m) >= bound * (1.0 - 1e-12);
}

/// g(t) = t - lambda - (t/gamma) mean(d/(t+d)) and g'(t) = 1 - (1/gamma) mean(d^2/(t+d)^2).
void ridge_equation(const Vector& d, double gamma, Complex lambda, Complex t, Complex& value,
                    Complex& slope) {
  Complex first = 0.0;
  Complex second = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const Complex r = d(i) / (t + d(i));
    first += r;
    second += r * r;
  }
  const double gn = gamma * static_cast<double>(d.size());
  value = t - lambda - t * first / gn;
  slope = 1.0 - second / gn;
}

/// Solves g(t) = 0 for the complex ridge `lambda` by continuation in Im(lambda).
Complex continue_from_real_axis(const Vector& d, double gamma, Complex lambda, int max_steps,
                                int& steps) {
  Complex t = solve_effective_ridge({d, gamma, lambda.real()}).lambda_tilde;
  double s = 0.0;
  double h = 1.0;
  steps = 0;
  while (s < 1.0) {
    if (++steps > max_steps || h < 1e-12) {
      throw NumericError("stieltjes continuation stalled at s=" + std::to_string(s));
    }
    h = std::min(h, 1.0 - s);
    const Complex target(lambda.real(), (s + h) * lambda.imag());
    Complex value, slope;
    ridge_equation(d, gamma, Complex(lambda.real(), s * lambda.imag()), t, value, slope);
    const Complex predicted = t + Complex(0.0, h * lambda.imag()) / slope;
    Complex next = predicted;
    bool converged = false;
    for (int k = 0; k < 30 && !converged; ++k) {
      ridge_equation(d, gamma, target, next, value, slope);
      if (slope == 0.0 || !std::isfinite(std::abs(value))) break;
      const Complex step = value / slope;
      next -= step;
      converged = std::abs(step) <= 1e-14 * std::max(std::abs(next), 1e-300);
    }
    // Reject corrections that wander far from the predictor: they may have
    // jumped to the other branch.
    if (converged && std::abs(next - predicted) <= 0.1 * std::abs(next)) {
      t = next;
      s += h;
      h *= 2.0;
    } else {
      h *= 0.5;
    }
  }
  return t;
}

}  // namespace

WishartSample sample_wishart(const Vector& gram_eigenvalues, Eigen::Index P,
                             const SeedPolicy& policy) {
  if (P < 1) throw InvalidInput("feature count P must be at least 1");
  if (gram_eigenvalues.size() == 0 || gram_eigenvalues.minCoeff() < 0.0) {
    throw InvalidInput("gram eigenvalues must be nonnegative");
  }
  const Eigen::Index n = gram_eigenvalues.size();
  const Matrix root = gram_eigenvalues.cwiseSqrt().asDiagonal();
  const FeatureMatrix F = sample_gaussian_features(root, P, n, policy);

  // F F^T (N x N) and F^T F (P x P) share their nonzero spectrum.
  const bool wide = P >= n;
  const Matrix small = wide ? Matrix(F.entries * F.entries.transpose())
                            : Matrix(F.entries.transpose() * F.entries);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(small, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("wishart eigensolver failed");

  WishartSample out;
  out.seed = F.seed;
  out.eigenvalues = Vector::Zero(P);
  const Vector ev = solver.eigenvalues().reverse().cwiseMax(0.0);
  out.eigenvalues.head(ev.size()) = ev;
  return out;
}

Complex empirical_stieltjes(const WishartSample& sample, Complex z) {
  if (std::abs(z.imag()) <= 1e-12 && z.real() >= -1e-12) {
    throw InvalidInput("z must lie off the nonnegative real axis");
  }
  if (sample.eigenvalues.size() == 0) throw InvalidInput("empty wishart sample");
  Complex sum = 0.0;
  for (Eigen::Index p = 0; p < sample.eigenvalues.size(); ++p) {
    sum += 1.0 / (sample.eigenvalues(p) - z);
  }
  return sum / static_cast<double>(sample.eigenvalues.size());
}

Complex stieltjes_map(const Vector& d, double gamma, Complex z, Complex m) {
  Complex sum = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const Complex dm = d(i) * m;
    sum += dm / (1.0 + dm);
  }
  return -(1.0 - sum / (gamma * static_cast<double>(d.size()))) / z;
}

StieltjesSolution theoretical_stieltjes(const Vector& d, double gamma, Complex z,
                                        const StieltjesOptions& options) {
  if (!(z.real() < 0.0)) throw InvalidInput("the fixed-point solver needs Re(z) < 0");
  if (d.size() == 0 || !d.allFinite() || d.minCoeff() < 0.0) {
    throw InvalidInput("spectrum must be finite and nonnegative");
  }
  if (!(gamma > 0.0)) throw InvalidInput("gamma must be positive");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw InvalidInput("damping must lie in (0, 1]");
  }

  StieltjesSolution out;
  out.z = z;
  if (z.imag() == 0.0) {
    const EffectiveRidge eff = solve_effective_ridge({d, gamma, -z.real()});
    Complex m = 1.0 / eff.lambda_tilde;
    m = newton_polish(d, gamma, z, m);
    out.m_tilde = Complex(m.real(), 0.0);
    out.iterations = 1;
  } else if (options.method == StieltjesMethod::continuation) {
    int steps = 0;
    const Complex t = continue_from_real_axis(d, gamma, -z, options.max_iterations, steps);
    out.m_tilde = newton_polish(d, gamma, z, 1.0 / t);
    out.iterations = steps;
  } else {
    Complex m = -1.0 / z;
    double residual = fixed_point_residual(d, gamma, z, m);
    const double target = std::min(options.tolerance, 1e-13 * std::max(std::abs(m), 1.0));
    const double eta = options.damping;
    int it = 0;
    while (residual > target && it < options.max_iterations) {
      ++it;
      m = (1.0 - eta) * m + eta * stieltjes_map(d, gamma, z, m);
      residual = fixed_point_residual(d, gamma, z, m);
    }
    out.m_tilde = newton_polish(d, gamma, z, m);
    out.iterations = it;
  }
  out.residual = fixed_point_residual(d, gamma, z, out.m_tilde);
  if (!(out.residual < options.tolerance)) {
    throw NumericError("stieltjes fixed point did not converge: residual " +
                       std::to_string(out.residual) + " after " +
                       std::to_string(out.iterations) + " iterations");
  }
  classify(out, d, gamma);
  if (!out.in_cone) {
    throw NumericError("stieltjes iteration settled on a fixed point outside the cone");
  }
  return out;
}

StieltjesMoments stieltjes_monte_carlo(const Vector& gram_eigenvalues, Eigen::Index P, Complex z,
                                       int trials, const SeedPolicy& policy) {
  if (trials < 1) throw InvalidInput("need at least one trial");
  std::vector<Complex> values;
  values.reserve(static_cast<std::size_t>(trials));
  Complex sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto sample =
        sample_wishart(gram_eigenvalues, P, policy.with_trial(policy.trial_index + t));
    values.push_back(empirical_stieltjes(sample, z));
    sum += values.back();
  }
  StieltjesMoments out;
  out.trials = trials;
  out.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (const Complex& v : values) ss += std::norm(v - out.mean);
    out.variance = ss / static_cast<double>(trials - 1);
  }
  return out;
}

Vector expected_A_theoretical(const Vector& d, double lambda_tilde) {
  if (!(lambda_tilde > 0.0)) throw InvalidInput("effective ridge must be positive");
  return (d.array() / (d.array() + lambda_tilde)).matrix();
}

Matrix monte_carlo_expected_A(const GramSpectrum& spectrum, Eigen::Index P, double lambda,
                              int trials, const SeedPolicy& policy) {
  if (trials < 1) throw InvalidInput("need at least one trial");
  if (!(lambda > 0.0)) throw InvalidInput("ridge must be positive");
  const Eigen::Index n = spectrum.size();
  const Matrix root = sqrt_gram(spectrum);
  Matrix sum = Matrix::Zero(n, n);
  for (int t = 0; t < trials; ++t) {
    const FeatureMatrix F =
        sample_gaussian_features(root, P, n, policy.with_trial(policy.trial_index + t));
    const Matrix& f = F.entries;
    if (P > n) {
      // A = (G + lambda I)^{-1} G with G = F F^T.
      const Matrix g = f * f.transpose();
      Matrix shifted = g;
      shifted.diagonal().array() += lambda;
      sum += Eigen::LDLT<Matrix>(shifted).solve(g);
    } else {
      Matrix shifted = f.transpose() * f;
      shifted.diagonal().array() += lambda;
      sum += f * Eigen::LDLT<Matrix>(shifted).solve(f.transpose());
    }
  }
  sum /= static_cast<double>(trials);
  return 0.5 * (sum + sum.transpose());
}

Vector empirical_expected_A(const GramSpectrum& spectrum, Eigen::Index P, double lambda,
                            int trials, const SeedPolicy& policy) {
  const Matrix mean = monte_carlo_expected_A(spectrum, P, lambda, trials, policy);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(mean, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigensolver failed on E[A]");
  return solver.eigenvalues().reverse();
}

}  // namespace effridge
