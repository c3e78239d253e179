#pragma once

// Kernels, Gram matrices and their spectra.

#include <Eigen/Dense>

#include <optional>

namespace effridge {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class KernelKind { rbf, precomputed };

/// K(x, x') = exp(-||x - x'||^2 / lengthscale) for rbf; precomputed carries no parameters.
struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  double lengthscale = 1.0;

  static KernelSpec rbf(double lengthscale);
  static KernelSpec precomputed() { return {KernelKind::precomputed, 0.0}; }

  void validate() const;
};

/// Training data: rows of X are points, y the labels. f_star optionally holds
/// true regression values at held-out points.
struct Dataset {
  Matrix X;
  Vector y;
  std::optional<Vector> f_star;

  Eigen::Index size() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }

  /// Checks N >= 1, matching sizes, finite values and distinct rows.
  void validate() const;
};

/// Throws InvalidInput when two rows have squared distance below 1e-12 * d.
void check_distinct_rows(const Matrix& X);

/// Symmetric N x N kernel matrix with a nonnegative diagonal.
class GramMatrix {
 public:
  /// Validates symmetry (1e-12 relative) and the diagonal; exact symmetry is enforced on storage.
  explicit GramMatrix(Matrix entries);

  const Matrix& entries() const { return entries_; }
  Eigen::Index size() const { return entries_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

/// Eigendecomposition U diag(d) U^T of a Gram matrix, eigenvalues sorted descending.
struct GramSpectrum {
  Vector eigenvalues;
  Matrix eigenvectors;
  double trace_mean = 0.0;

  Eigen::Index size() const { return eigenvalues.size(); }
  Matrix reconstruct() const;
  /// U^T v
  Vector project(const Vector& v) const { return eigenvectors.transpose() * v; }

  /// Spectrum of diag(d); eigenvectors are the identity.
  static GramSpectrum from_eigenvalues(const Vector& eigenvalues);
};

/// Kernel between rows of X and rows of X2.
Matrix gram_matrix(const KernelSpec& kernel, const Matrix& X, const Matrix& X2);

/// Kernel between rows of X; exactly symmetric.
GramMatrix gram_matrix(const KernelSpec& kernel, const Matrix& X);

/// Eigenvalues in [-1e-10 max(d), 0) are clamped to zero, more negative ones rejected.
GramSpectrum spectral_decompose(const GramMatrix& gram);

/// K^{1/2} = U diag(sqrt d) U^T.
Matrix sqrt_gram(const GramSpectrum& spectrum);

/// Relative floor below which an eigenvalue counts as zero when inverting.
inline constexpr double kSingularFloor = 1e-12;

/// Throws SingularGram unless every eigenvalue exceeds kSingularFloor * max(d).
void require_positive_spectrum(const GramSpectrum& spectrum, const char* context);

/// y^T K^{-1} y, the squared inverse-kernel norm of the labels.
double inv_kernel_norm_sq(const GramSpectrum& spectrum, const Vector& y);

/// K^{-1} v through the spectrum. Requires a positive spectrum.
Vector solve_with_spectrum(const GramSpectrum& spectrum, const Vector& v);

}  // namespace effridge
