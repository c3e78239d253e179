#include "effridge/predictors.hpp"

#include "effridge/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace effridge {

namespace {

void check_lambda(double lambda) {
  if (!std::isfinite(lambda)) throw InvalidInput("ridge must be finite");
  if (lambda < 0.0) throw InvalidInput("ridge must be nonnegative, got " + std::to_string(lambda));
}

/// Solves (A + lambda I) x = b for symmetric PSD A with one refinement step.
Vector refined_ridge_solve(const Matrix& A, double lambda, const Vector& b) {
  Matrix shifted = A;
  shifted.diagonal().array() += lambda;
  Eigen::LDLT<Matrix> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw NumericError("symmetric factorization failed");
  Vector x = ldlt.solve(b);
  const Vector residual = b - shifted * x;
  x += ldlt.solve(residual);
  if (!x.allFinite()) throw NumericError("ridge solve produced non-finite values");
  return x;
}

Vector min_norm_least_squares(const Matrix& F, const Vector& y) {
  Eigen::BDCSVD<Matrix> svd(F, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  Vector coeffs = svd.matrixU().transpose() * y;
  const double cutoff = sigma.size() > 0 ? kPinvCutoff * sigma(0) : 0.0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    coeffs(k) = sigma(k) > cutoff ? coeffs(k) / sigma(k) : 0.0;
  }
  return svd.matrixV() * coeffs;
}

}  // namespace

RFModel fit_rf(const Matrix& F_train, const Vector& y, double lambda, RidgeForm form) {
  check_lambda(lambda);
  if (y.size() != F_train.rows()) {
    throw InvalidInput("label length " + std::to_string(y.size()) + " does not match " +
                       std::to_string(F_train.rows()) + " feature rows");
  }
  if (F_train.cols() < 1) throw InvalidInput("feature matrix has no columns");
  if (!F_train.allFinite() || !y.allFinite()) throw InvalidInput("non-finite fit inputs");

  RFModel model;
  model.lambda = lambda;
  if (lambda == 0.0) {
    model.theta_hat = min_norm_least_squares(F_train, y);
  } else {
    if (form == RidgeForm::automatic) {
      form = F_train.rows() <= F_train.cols() ? RidgeForm::dual : RidgeForm::primal;
    }
    if (form == RidgeForm::dual) {
      const Matrix gram = F_train * F_train.transpose();
      model.theta_hat = F_train.transpose() * refined_ridge_solve(gram, lambda, y);
    } else {
      const Matrix gram = F_train.transpose() * F_train;
      model.theta_hat = refined_ridge_solve(gram, lambda, F_train.transpose() * y);
    }
  }
  model.train_predictions = F_train * model.theta_hat;
  model.theta_norm_sq = model.theta_hat.squaredNorm();
  return model;
}

Vector predict_rf(const RFModel& model, const Matrix& F_eval) {
  if (F_eval.cols() != model.features()) {
    throw InvalidInput("evaluation matrix has " + std::to_string(F_eval.cols()) +
                       " columns, model has " + std::to_string(model.features()) + " features");
  }
  return F_eval * model.theta_hat;
}

KRRModel fit_krr(const GramMatrix& gram, const Vector& y, double lambda, bool allow_pseudoinverse) {
  check_lambda(lambda);
  if (y.size() != gram.size()) throw InvalidInput("label length does not match the gram size");
  if (lambda > 0.0) return {refined_ridge_solve(gram.entries(), lambda, y), lambda};
  const GramSpectrum spectrum = spectral_decompose(gram);
  const double top = spectrum.eigenvalues.maxCoeff();
  if (top > 0.0 && spectrum.eigenvalues.minCoeff() > kSingularFloor * top) {
    return {refined_ridge_solve(gram.entries(), 0.0, y), 0.0};
  }
  return fit_krr(spectrum, y, 0.0, allow_pseudoinverse);
}

KRRModel fit_krr(const GramSpectrum& spectrum, const Vector& y, double lambda,
                 bool allow_pseudoinverse) {
  check_lambda(lambda);
  if (y.size() != spectrum.size()) throw InvalidInput("label length does not match the gram size");
  const Vector c = spectrum.project(y);
  Vector scaled(c.size());
  if (lambda > 0.0) {
    scaled = c.array() / (spectrum.eigenvalues.array() + lambda);
  } else {
    const double top = spectrum.eigenvalues.maxCoeff();
    const double floor = kSingularFloor * top;
    const bool singular = !(top > 0.0) || spectrum.eigenvalues.minCoeff() <= floor;
    if (singular && !allow_pseudoinverse) {
      throw SingularGram("ridgeless kernel fit on a numerically singular gram matrix");
    }
    const double cutoff = kPinvCutoff * top;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const double d = spectrum.eigenvalues(i);
      scaled(i) = d > cutoff ? c(i) / d : 0.0;
    }
  }
  return {spectrum.eigenvectors * scaled, lambda};
}

Vector predict_krr(const KRRModel& model, const Matrix& k_cross) {
  if (k_cross.cols() != model.coefficients.size()) {
    throw InvalidInput("cross kernel has " + std::to_string(k_cross.cols()) +
                       " columns, model was fit on " + std::to_string(model.coefficients.size()) +
                       " points");
  }
  return k_cross * model.coefficients;
}

double posterior_kernel(const GramSpectrum& spectrum, const Vector& k_x, double k_xx,
                        const std::optional<Vector>& k_x2) {
  if (k_x.size() != spectrum.size() || (k_x2 && k_x2->size() != spectrum.size())) {
    throw InvalidInput("kernel vector length does not match the gram size");
  }
  require_positive_spectrum(spectrum, "posterior kernel");
  const Vector a = spectrum.project(k_x);
  const Vector b = k_x2 ? spectrum.project(*k_x2) : a;
  return k_xx - (a.array() * b.array() / spectrum.eigenvalues.array()).sum();
}

ConditionalMoments conditional_moments(const FeatureMatrix& F, const GramSpectrum& spectrum,
                                       const Matrix& k_cross, const RFModel& model) {
  if (model.features() != F.features()) {
    throw InvalidInput("model and feature matrix disagree on P");
  }
  if (model.train_predictions.size() != spectrum.size() || F.n_train != spectrum.size()) {
    throw InvalidInput("model was not fit on the training block of this spectrum");
  }
  if (k_cross.cols() != spectrum.size()) throw InvalidInput("cross kernel width mismatch");
  ConditionalMoments out;
  out.mean = k_cross * solve_with_spectrum(spectrum, model.train_predictions);
  out.cov_scale = model.theta_norm_sq / static_cast<double>(F.features());
  return out;
}

}  // namespace effridge
