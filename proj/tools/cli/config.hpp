#pragma once

#include "cli/datasets.hpp"
#include "effridge/feature_sampler.hpp"
#include "effridge/linalg_kernel.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace effridge::cli {

enum class Experiment { solve, calibrate, average_rf, double_descent, stieltjes, expected_a, predictor_fan };

const char* to_string(Experiment e) noexcept;
Experiment parse_experiment(const std::string& name);

enum class DatasetSource { sinusoid, clusters, spectrum, csv };

struct DatasetSpec {
  DatasetSource source = DatasetSource::sinusoid;
  Eigen::Index n = 4;
  Eigen::Index n_test = 100;
  Eigen::Index dim = 20;           // clusters
  double separation = 1.0;         // clusters
  SpectrumKind spectrum = SpectrumKind::exponential;
  std::string path;                // csv training file
  std::string test_path;           // csv evaluation file; training points when empty
  std::optional<std::uint64_t> seed;  // generators; resolved to base_seed when absent
};

struct ExperimentConfig {
  Experiment experiment = Experiment::solve;
  DatasetSpec dataset;
  KernelSpec kernel = KernelSpec::rbf(1.0);
  std::vector<double> gamma_grid;
  std::vector<Eigen::Index> p_grid;
  std::vector<double> lambda_list;
  int trials = 100;
  std::uint64_t base_seed = 0;
  std::string output_dir = "out";
  FeatureKind feature_kind = FeatureKind::gaussian;

  /// Throws InvalidInput on a violated invariant.
  void validate() const;
  /// Fills the generator seed from base_seed.
  ExperimentConfig resolved() const;
};

/// Desk-scale defaults for each experiment.
ExperimentConfig default_config(Experiment e);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
/// Reads a JSON file; ParseError for malformed JSON, IoError for a missing file.
ExperimentConfig load_config(const std::string& path);

}  // namespace effridge::cli
