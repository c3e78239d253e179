#include "effridge/linalg_kernel.hpp"

#include "effridge/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace effridge {

KernelSpec KernelSpec::rbf(double lengthscale) {
  KernelSpec spec{KernelKind::rbf, lengthscale};
  spec.validate();
  return spec;
}

void KernelSpec::validate() const {
  if (kind == KernelKind::rbf && !(lengthscale > 0.0 && std::isfinite(lengthscale))) {
    throw InvalidInput("rbf kernel needs a positive finite lengthscale, got " +
                       std::to_string(lengthscale));
  }
}

void check_distinct_rows(const Matrix& X) {
  const Eigen::Index n = X.rows();
  const double tol = 1e-12 * static_cast<double>(std::max<Eigen::Index>(X.cols(), 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if ((X.row(i) - X.row(j)).squaredNorm() < tol) {
        throw InvalidInput("duplicate rows " + std::to_string(i) + " and " + std::to_string(j) +
                           ": data points must be distinct");
      }
    }
  }
}

void Dataset::validate() const {
  if (X.rows() < 1) throw InvalidInput("dataset needs at least one point");
  if (y.size() != X.rows()) {
    throw InvalidInput("label count " + std::to_string(y.size()) + " does not match " +
                       std::to_string(X.rows()) + " points");
  }
  if (!X.allFinite()) throw InvalidInput("dataset has non-finite coordinates");
  if (!y.allFinite()) throw InvalidInput("dataset has non-finite labels");
  if (f_star && !f_star->allFinite()) throw InvalidInput("f_star has non-finite entries");
  check_distinct_rows(X);
}

GramMatrix::GramMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw InvalidInput("gram matrix must be square");
  }
  if (!entries_.allFinite()) throw InvalidInput("gram matrix has non-finite entries");
  const double scale = std::max(entries_.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (entries_.size() > 0 && asym > 1e-12 * scale) {
    throw InvalidInput("gram matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  }
  if (entries_.size() > 0 && entries_.diagonal().minCoeff() < 0.0) {
    throw InvalidInput("gram matrix has a negative diagonal entry");
  }
  entries_ = 0.5 * (entries_ + entries_.transpose()).eval();
}

Matrix GramSpectrum::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

GramSpectrum GramSpectrum::from_eigenvalues(const Vector& eigenvalues) {
  if (eigenvalues.size() == 0) throw InvalidInput("empty spectrum");
  if (!eigenvalues.allFinite() || eigenvalues.minCoeff() < 0.0) {
    throw InvalidInput("spectrum must be finite and nonnegative");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(eigenvalues.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return eigenvalues(a) > eigenvalues(b); });
  GramSpectrum out;
  const Eigen::Index n = eigenvalues.size();
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = eigenvalues(order[static_cast<std::size_t>(k)]);
    out.eigenvectors(order[static_cast<std::size_t>(k)], k) = 1.0;
  }
  out.trace_mean = eigenvalues.mean();
  return out;
}

namespace {

void require_finite(const Matrix& X, const char* name) {
  if (!X.allFinite()) {
    throw InvalidInput(std::string(name) + " has non-finite coordinates");
  }
}

}  // namespace

Matrix gram_matrix(const KernelSpec& kernel, const Matrix& X, const Matrix& X2) {
  kernel.validate();
  if (kernel.kind != KernelKind::rbf) {
    throw InvalidInput("a precomputed kernel cannot be evaluated on coordinates");
  }
  if (X.cols() != X2.cols()) {
    throw InvalidInput("column counts differ: " + std::to_string(X.cols()) + " vs " +
                       std::to_string(X2.cols()));
  }
  require_finite(X, "X");
  require_finite(X2, "X2");
  Matrix out(X.rows(), X2.rows());
  for (Eigen::Index j = 0; j < X2.rows(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      out(i, j) = std::exp(-(X.row(i) - X2.row(j)).squaredNorm() / kernel.lengthscale);
    }
  }
  return out;
}

GramMatrix gram_matrix(const KernelSpec& kernel, const Matrix& X) {
  kernel.validate();
  if (kernel.kind != KernelKind::rbf) {
    throw InvalidInput("a precomputed kernel cannot be evaluated on coordinates");
  }
  require_finite(X, "X");
  const Eigen::Index n = X.rows();
  Matrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = std::exp(-(X.row(i) - X.row(j)).squaredNorm() / kernel.lengthscale);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return GramMatrix(std::move(out));
}

GramSpectrum spectral_decompose(const GramMatrix& gram) {
  const Eigen::Index n = gram.size();
  if (n == 0) throw InvalidInput("empty gram matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram.entries());
  if (solver.info() != Eigen::Success) {
    throw NumericError("symmetric eigensolver did not converge");
  }
  // Eigen returns ascending order.
  GramSpectrum out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  const double top = std::max(out.eigenvalues(0), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    double& d = out.eigenvalues(i);
    if (d < 0.0) {
      if (d < -1e-10 * top) {
        throw NumericError("gram matrix is not positive semidefinite: eigenvalue " +
                           std::to_string(d));
      }
      d = 0.0;
    }
  }
  out.trace_mean = gram.entries().trace() / static_cast<double>(n);
  return out;
}

Matrix sqrt_gram(const GramSpectrum& spectrum) {
  if (spectrum.size() > 0 && spectrum.eigenvalues.minCoeff() < 0.0) {
    throw NumericError("square root needs a nonnegative spectrum");
  }
  const Vector root = spectrum.eigenvalues.cwiseSqrt();
  Matrix out = spectrum.eigenvectors * root.asDiagonal() * spectrum.eigenvectors.transpose();
  return 0.5 * (out + out.transpose());
}

void require_positive_spectrum(const GramSpectrum& spectrum, const char* context) {
  const double top = spectrum.eigenvalues.maxCoeff();
  const double floor = kSingularFloor * top;
  if (!(top > 0.0) || spectrum.eigenvalues.minCoeff() <= floor) {
    throw SingularGram(std::string(context) + ": gram matrix is numerically singular");
  }
}

double inv_kernel_norm_sq(const GramSpectrum& spectrum, const Vector& y) {
  if (y.size() != spectrum.size()) throw InvalidInput("label length does not match the gram size");
  require_positive_spectrum(spectrum, "inverse kernel norm");
  const Vector c = spectrum.project(y);
  return (c.array().square() / spectrum.eigenvalues.array()).sum();
}

Vector solve_with_spectrum(const GramSpectrum& spectrum, const Vector& v) {
  if (v.size() != spectrum.size()) throw InvalidInput("vector length does not match the gram size");
  require_positive_spectrum(spectrum, "gram solve");
  const Vector c = spectrum.project(v);
  return spectrum.eigenvectors * (c.array() / spectrum.eigenvalues.array()).matrix();
}

}  // namespace effridge
