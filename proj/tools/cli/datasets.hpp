#pragma once

#include "effridge/linalg_kernel.hpp"

#include <cstdint>
#include <string>

namespace effridge::cli {

/// Training set plus evaluation points and the true function on them.
struct ExperimentData {
  Dataset train;
  Matrix test_X;
  Vector test_f_star;
};

/// Header `x_0,...,x_{d-1},y`. Rows keep file order; duplicate inputs are rejected.
Dataset load_dataset_csv(const std::string& path);

/// Train abscissae uniform on [0, 2pi) from the seeded stream (sorted), labels
/// sin(x). Test points are the grid 2pi k / n_test.
ExperimentData generate_sinusoid(Eigen::Index n, Eigen::Index n_test, std::uint64_t seed);

/// Two Gaussian clusters in `dim` dimensions with labels alternating +1, -1.
/// Centers sit at +-separation/sqrt(dim) * (1,...,1), noise N(0, I/dim).
ExperimentData generate_clusters(Eigen::Index n, Eigen::Index n_test, Eigen::Index dim,
                                 double separation, std::uint64_t seed);

enum class SpectrumKind { exponential, polynomial };

/// exponential: d_i = exp(-(i-1)/2); polynomial: d_i = 1/i, i = 1..n.
Vector generate_spectrum(SpectrumKind kind, Eigen::Index n);

}  // namespace effridge::cli
