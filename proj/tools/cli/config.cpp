#include "cli/config.hpp"

#include "effridge/errors.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <utility>

namespace effridge::cli {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Experiment, const char*>, 7> kExperimentNames{{
    {Experiment::solve, "solve"},
    {Experiment::calibrate, "calibrate"},
    {Experiment::average_rf, "average-rf"},
    {Experiment::double_descent, "double-descent"},
    {Experiment::stieltjes, "stieltjes"},
    {Experiment::expected_a, "expected-a"},
    {Experiment::predictor_fan, "predictor-fan"},
}};

const char* source_name(DatasetSource s) {
  switch (s) {
    case DatasetSource::sinusoid: return "sinusoid";
    case DatasetSource::clusters: return "clusters";
    case DatasetSource::spectrum: return "spectrum";
    case DatasetSource::csv: return "csv";
  }
  return "?";
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw InvalidInput(std::string("unknown key '") + item.key() + "' in " + where);
  }
}

DatasetSpec dataset_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("dataset must be an object");
  reject_unknown(j, {"source", "n", "n_test", "dim", "separation", "kind", "path", "test_path", "seed"},
                 "dataset");
  if (!j.contains("source")) throw InvalidInput("dataset needs exactly one source");
  DatasetSpec d;
  const auto source = get_or<std::string>(j, "source", "");
  if (source == "sinusoid") {
    d.source = DatasetSource::sinusoid;
  } else if (source == "clusters") {
    d.source = DatasetSource::clusters;
    d.n = 100;
  } else if (source == "spectrum") {
    d.source = DatasetSource::spectrum;
    d.n = 20;
  } else if (source == "csv") {
    d.source = DatasetSource::csv;
  } else {
    throw InvalidInput("unknown dataset source '" + source + "'");
  }
  d.n = get_or<Eigen::Index>(j, "n", d.n);
  d.n_test = get_or<Eigen::Index>(j, "n_test", d.n_test);
  d.dim = get_or<Eigen::Index>(j, "dim", d.dim);
  d.separation = get_or<double>(j, "separation", d.separation);
  const auto kind = get_or<std::string>(j, "kind", "exponential");
  if (kind == "exponential") {
    d.spectrum = SpectrumKind::exponential;
  } else if (kind == "polynomial") {
    d.spectrum = SpectrumKind::polynomial;
  } else {
    throw InvalidInput("unknown spectrum kind '" + kind + "'");
  }
  d.path = get_or<std::string>(j, "path", "");
  d.test_path = get_or<std::string>(j, "test_path", "");
  if (j.contains("seed")) d.seed = get_or<std::uint64_t>(j, "seed", 0);
  return d;
}

json dataset_to_json(const DatasetSpec& d) {
  json j;
  j["source"] = source_name(d.source);
  switch (d.source) {
    case DatasetSource::sinusoid:
      j["n"] = d.n;
      j["n_test"] = d.n_test;
      break;
    case DatasetSource::clusters:
      j["n"] = d.n;
      j["n_test"] = d.n_test;
      j["dim"] = d.dim;
      j["separation"] = d.separation;
      break;
    case DatasetSource::spectrum:
      j["n"] = d.n;
      j["kind"] = d.spectrum == SpectrumKind::exponential ? "exponential" : "polynomial";
      break;
    case DatasetSource::csv:
      j["path"] = d.path;
      if (!d.test_path.empty()) j["test_path"] = d.test_path;
      break;
  }
  if (d.seed) j["seed"] = *d.seed;
  return j;
}

DatasetSpec builtin(DatasetSource source, Eigen::Index n, Eigen::Index n_test = 100) {
  DatasetSpec d;
  d.source = source;
  d.n = n;
  d.n_test = n_test;
  return d;
}

}  // namespace

const char* to_string(Experiment e) noexcept {
  for (const auto& [k, name] : kExperimentNames) {
    if (k == e) return name;
  }
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& [k, n] : kExperimentNames) {
    if (name == n) return k;
  }
  throw InvalidInput("unknown experiment '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (gamma_grid.empty() == p_grid.empty()) {
    throw InvalidInput("exactly one of gamma_grid and p_grid must be nonempty");
  }
  for (double g : gamma_grid) {
    if (!(g > 0.0) || !std::isfinite(g)) throw InvalidInput("gamma_grid entries must be positive");
  }
  for (auto p : p_grid) {
    if (p < 1) throw InvalidInput("p_grid entries must be at least 1");
  }
  if (lambda_list.empty()) throw InvalidInput("lambda_list must be nonempty");
  for (double l : lambda_list) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidInput("lambda_list entries must be >= 0");
  }
  if (trials < 1) throw InvalidInput("trials must be at least 1");
  if (output_dir.empty()) throw InvalidInput("output_dir must be nonempty");
  kernel.validate();

  const auto& d = dataset;
  if (d.source != DatasetSource::csv && d.n < 1) throw InvalidInput("dataset n must be at least 1");
  if ((d.source == DatasetSource::sinusoid || d.source == DatasetSource::clusters) && d.n_test < 1) {
    throw InvalidInput("dataset n_test must be at least 1");
  }
  if (d.source == DatasetSource::csv && d.path.empty()) throw InvalidInput("csv dataset needs a path");

  const bool needs_points = experiment == Experiment::average_rf ||
                            experiment == Experiment::double_descent ||
                            experiment == Experiment::predictor_fan;
  if (needs_points && d.source == DatasetSource::spectrum) {
    throw InvalidInput(std::string(to_string(experiment)) + " needs data points, not a bare spectrum");
  }
  if (needs_points && kernel.kind != KernelKind::rbf) {
    throw InvalidInput(std::string(to_string(experiment)) + " needs an rbf kernel");
  }
}

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig out = *this;
  if (!out.dataset.seed && out.dataset.source != DatasetSource::spectrum &&
      out.dataset.source != DatasetSource::csv) {
    out.dataset.seed = base_seed;
  }
  return out;
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  c.base_seed = 1;
  switch (e) {
    case Experiment::solve:
      c.dataset = builtin(DatasetSource::spectrum, 20);
      c.gamma_grid = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0, 8.0};
      c.lambda_list = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
      c.trials = 1;
      break;
    case Experiment::calibrate:
      c.dataset = builtin(DatasetSource::spectrum, 20);
      c.gamma_grid = {0.5, 1.0, 2.0};
      c.lambda_list = {1e-3, 1e-2, 1e-1, 1.0};
      c.trials = 1;
      break;
    case Experiment::average_rf:
      c.dataset = builtin(DatasetSource::sinusoid, 4, 100);
      c.kernel = KernelSpec::rbf(2.0);
      c.gamma_grid = {0.5, 1.0, 2.0, 4.0};
      c.lambda_list = {0.1, 1.0};
      c.trials = 500;
      break;
    case Experiment::double_descent:
      c.dataset = builtin(DatasetSource::clusters, 100, 100);
      c.kernel = KernelSpec::rbf(1.0);
      c.gamma_grid = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0};
      c.lambda_list = {1e-4, 0.5};
      c.trials = 40;
      break;
    case Experiment::stieltjes:
      c.dataset = builtin(DatasetSource::spectrum, 50);
      c.p_grid = {50, 100, 200, 400};
      c.lambda_list = {1.0};
      c.trials = 200;
      break;
    case Experiment::expected_a:
      c.dataset = builtin(DatasetSource::spectrum, 10);
      c.p_grid = {10, 50, 200};
      c.lambda_list = {1e-2};
      c.trials = 500;
      break;
    case Experiment::predictor_fan:
      c.dataset = builtin(DatasetSource::sinusoid, 4, 100);
      c.kernel = KernelSpec::rbf(2.0);
      c.gamma_grid = {0.5, 2.0, 8.0};
      c.lambda_list = {1e-4};
      c.trials = 100;
      break;
  }
  return c;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  reject_unknown(j,
                 {"experiment", "dataset", "kernel", "gamma_grid", "p_grid", "lambda_list", "trials",
                  "base_seed", "output_dir", "feature_kind"},
                 "config");
  if (!j.contains("experiment")) throw InvalidInput("config needs 'experiment'");
  ExperimentConfig c = default_config(parse_experiment(get_or<std::string>(j, "experiment", "")));

  if (j.contains("dataset")) c.dataset = dataset_from_json(j.at("dataset"));
  if (j.contains("kernel")) {
    const auto& k = j.at("kernel");
    if (!k.is_object()) throw InvalidInput("kernel must be an object");
    reject_unknown(k, {"kind", "lengthscale"}, "kernel");
    const auto kind = get_or<std::string>(k, "kind", "rbf");
    if (kind == "rbf") {
      c.kernel = KernelSpec::rbf(get_or<double>(k, "lengthscale", 1.0));
    } else if (kind == "precomputed") {
      c.kernel = KernelSpec::precomputed();
    } else {
      throw InvalidInput("unknown kernel kind '" + kind + "'");
    }
  }
  if (j.contains("gamma_grid") || j.contains("p_grid")) {
    c.gamma_grid = get_or<std::vector<double>>(j, "gamma_grid", {});
    c.p_grid = get_or<std::vector<Eigen::Index>>(j, "p_grid", {});
  }
  c.lambda_list = get_or(j, "lambda_list", c.lambda_list);
  c.trials = get_or(j, "trials", c.trials);
  c.base_seed = get_or(j, "base_seed", c.base_seed);
  c.output_dir = get_or(j, "output_dir", c.output_dir);
  const auto fk = get_or<std::string>(j, "feature_kind", "gaussian");
  if (fk == "gaussian") {
    c.feature_kind = FeatureKind::gaussian;
  } else if (fk == "fourier") {
    c.feature_kind = FeatureKind::fourier;
  } else {
    throw InvalidInput("unknown feature_kind '" + fk + "'");
  }
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["dataset"] = dataset_to_json(c.dataset);
  if (c.kernel.kind == KernelKind::rbf) {
    j["kernel"] = {{"kind", "rbf"}, {"lengthscale", c.kernel.lengthscale}};
  } else {
    j["kernel"] = {{"kind", "precomputed"}};
  }
  if (!c.gamma_grid.empty()) j["gamma_grid"] = c.gamma_grid;
  if (!c.p_grid.empty()) j["p_grid"] = c.p_grid;
  j["lambda_list"] = c.lambda_list;
  j["trials"] = c.trials;
  j["base_seed"] = c.base_seed;
  j["output_dir"] = c.output_dir;
  j["feature_kind"] = c.feature_kind == FeatureKind::gaussian ? "gaussian" : "fourier";
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config ") + path + ": " + e.what(), 0);
  }
  return config_from_json(j);
}

}  // namespace effridge::cli
