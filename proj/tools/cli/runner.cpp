#include "cli/runner.hpp"

#include "cli/svg_plot.hpp"
#include "effridge/effective_ridge.hpp"
#include "effridge/montecarlo.hpp"
#include "effridge/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <ostream>

namespace effridge::cli {

namespace {

namespace fs = std::filesystem;

/// One cell of the (gamma or P) x lambda grid.
struct GridPoint {
  long N = 0;
  double P = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
};

/// With integral = true, P is rounded to a feature count and gamma recomputed.
std::vector<GridPoint> grid(const ExperimentConfig& c, long N, bool integral) {
  std::vector<GridPoint> out;
  const double n = static_cast<double>(N);
  std::vector<double> ps;
  for (double g : c.gamma_grid) ps.push_back(integral ? std::max(1.0, std::round(g * n)) : g * n);
  for (auto p : c.p_grid) ps.push_back(static_cast<double>(p));
  for (double p : ps) {
    for (double l : c.lambda_list) out.push_back({N, p, p / n, l});
  }
  return out;
}

std::string context(const GridPoint& g) {
  return "gamma=" + format_double(g.gamma) + " lambda=" + format_double(g.lambda) + ": ";
}

void for_each_point(const std::vector<GridPoint>& points, const std::function<void(const GridPoint&)>& body) {
  for (const auto& g : points) {
    try {
      body(g);
    } catch (const Error& e) {
      rethrow_with_context(e, context(g));
    }
  }
}

ResultRow key_row(const GridPoint& g, std::uint64_t seed, int trials) {
  ResultRow r;
  r.N = g.N;
  r.P = g.P;
  r.gamma = g.gamma;
  r.lambda = g.lambda;
  r.seed = seed;
  r.trials = trials;
  return r;
}

void require_variance(const ExperimentConfig& c) {
  if (c.trials < 2) {
    throw InvalidInput(std::string(to_string(c.experiment)) + " needs trials >= 2 for error bands");
  }
}

ResultTable run_solve(const ExperimentConfig& c) {
  const Vector d = experiment_spectrum(c);
  ResultTable t{"solve", {"lambda_tilde", "d_lambda_tilde", "effective_dimension", "residual"}, {}};
  for_each_point(grid(c, d.size(), false), [&](const GridPoint& g) {
    const auto eff = solve_effective_ridge({d, g.gamma, g.lambda});
    auto row = key_row(g, c.base_seed, 0);
    row.metrics = {eff.lambda_tilde, eff.d_lambda_tilde, eff.effective_dimension, eff.residual};
    t.rows.push_back(std::move(row));
  });
  return t;
}

ResultTable run_calibrate(const ExperimentConfig& c) {
  const Vector d = experiment_spectrum(c);
  ResultTable t{"calibrate",
                {"lambda_star", "ridgeless_limit", "feasible", "recovered_lambda_tilde", "roundtrip_rel_error"},
                {}};
  for_each_point(grid(c, d.size(), false), [&](const GridPoint& g) {
    const double target = g.lambda;
    // At gamma = 1 the ridgeless effective ridge tends to 0 even though the
    // limit problem itself is degenerate.
    const double floor = g.gamma == 1.0 ? 0.0 : ridgeless_limit(d, g.gamma);
    auto row = key_row(g, c.base_seed, 0);
    try {
      const double lambda = calibrate_ridge(d, g.gamma, target);
      const double back = solve_effective_ridge({d, g.gamma, lambda}).lambda_tilde;
      row.lambda = lambda;
      row.metrics = {target, floor, 1.0, back, std::abs(back - target) / target};
    } catch (const InfeasibleTarget&) {
      row.lambda = 0.0;
      row.metrics = {target, floor, 0.0, 0.0, 0.0};
    }
    t.rows.push_back(std::move(row));
  });
  return t;
}

Vector krr_at(const RFExperiment& ex, double lambda_tilde) {
  return ex.krr_predictions(lambda_tilde, lambda_tilde == 0.0);
}

ResultTable run_average_rf(const ExperimentConfig& c) {
  require_variance(c);
  const ExperimentData data = load_experiment_data(c.dataset);
  const RFExperiment ex(data.train, data.test_X, c.kernel);
  ResultTable t{"average-rf",
                {"lambda_tilde", "rf_mean_mse", "krr_mse", "expected_risk", "mean_variance",
                 "max_abs_gap", "rmse_gap", "mc_band", "bound_term_norm", "bound_term_norm_sq"},
                {}};
  // The agreement bound scales as sqrt(K(x,x)) ||y||_{K^-1} / P with K(x,x) = 1
  // for rbf; both readings of the norm are reported.
  const double norm_sq = inv_kernel_norm_sq(ex.train_spectrum(), ex.train().y);
  for_each_point(grid(c, ex.n_train(), true), [&](const GridPoint& g) {
    const auto P = static_cast<Eigen::Index>(g.P);
    const auto stats = ex.run(P, g.lambda, c.trials, c.base_seed, c.feature_kind);
    const auto eff = ex.effective_ridge(P, g.lambda);
    const Vector krr = krr_at(ex, eff.lambda_tilde);
    const auto risk = bias_variance_decompose(stats, data.test_f_star, krr);
    const auto gap = compare_average_to_krr(stats, krr);
    auto row = key_row(g, c.base_seed, c.trials);
    row.metrics = {eff.lambda_tilde, risk.risk_of_mean, *risk.krr_risk, risk.expected_risk,
                   risk.mean_variance, gap.max_abs, gap.rmse, stats.rms_band(),
                   std::sqrt(norm_sq) / g.P, norm_sq / g.P};
    t.rows.push_back(std::move(row));
  });
  return t;
}

ResultTable run_double_descent(const ExperimentConfig& c) {
  require_variance(c);
  const ExperimentData data = load_experiment_data(c.dataset);
  const RFExperiment ex(data.train, data.test_X, c.kernel);
  ResultTable t{"double-descent",
                {"expected_risk", "risk_of_mean", "variance", "krr_risk", "lambda_tilde",
                 "theta_norm_sq", "theta_norm_theory"},
                {}};
  for_each_point(grid(c, ex.n_train(), true), [&](const GridPoint& g) {
    const auto P = static_cast<Eigen::Index>(g.P);
    const auto stats = ex.run(P, g.lambda, c.trials, c.base_seed, c.feature_kind);
    const auto eff = ex.effective_ridge(P, g.lambda);
    const auto risk = bias_variance_decompose(stats, data.test_f_star, krr_at(ex, eff.lambda_tilde));
    const auto norm = theta_norm_check(stats, ex.train_spectrum(), ex.train().y, eff, P);
    auto row = key_row(g, c.base_seed, c.trials);
    row.metrics = {risk.expected_risk, risk.risk_of_mean, risk.mean_variance, *risk.krr_risk,
                   eff.lambda_tilde, norm.empirical, norm.theoretical};
    t.rows.push_back(std::move(row));
  });
  return t;
}

ResultTable run_stieltjes(const ExperimentConfig& c) {
  require_variance(c);
  const Vector d = experiment_spectrum(c);
  ResultTable t{"stieltjes", {"m_mean", "m_variance", "m_theory", "abs_error", "residual"}, {}};
  for_each_point(grid(c, d.size(), true), [&](const GridPoint& g) {
    if (!(g.lambda > 0.0)) throw InvalidInput("stieltjes evaluates z = -lambda and needs lambda > 0");
    const Complex z(-g.lambda, 0.0);
    const auto P = static_cast<Eigen::Index>(g.P);
    const auto mc = stieltjes_monte_carlo(d, P, z, c.trials, SeedPolicy{c.base_seed, 0});
    const auto theory = theoretical_stieltjes(d, g.gamma, z);
    auto row = key_row(g, c.base_seed, c.trials);
    row.metrics = {mc.mean.real(), mc.variance, theory.m_tilde.real(), std::abs(mc.mean - theory.m_tilde),
                   theory.residual};
    t.rows.push_back(std::move(row));
  });
  return t;
}

ResultTable run_expected_a(const ExperimentConfig& c) {
  const Vector d = experiment_spectrum(c);
  const GramSpectrum spectrum = GramSpectrum::from_eigenvalues(d);
  ResultTable t{"expected-a", {"lambda_tilde", "max_abs_deviation", "mean_abs_deviation"}, {}};
  for_each_point(grid(c, d.size(), true), [&](const GridPoint& g) {
    const auto P = static_cast<Eigen::Index>(g.P);
    const Vector empirical = empirical_expected_A(spectrum, P, g.lambda, c.trials, SeedPolicy{c.base_seed, 0});
    const auto eff = solve_effective_ridge({spectrum.eigenvalues, g.gamma, g.lambda});
    const Vector dev = (empirical - expected_A_theoretical(spectrum.eigenvalues, eff.lambda_tilde)).cwiseAbs();
    auto row = key_row(g, c.base_seed, c.trials);
    row.metrics = {eff.lambda_tilde, dev.maxCoeff(), dev.mean()};
    t.rows.push_back(std::move(row));
  });
  return t;
}

ResultTable run_predictor_fan(const ExperimentConfig& c) {
  require_variance(c);
  const ExperimentData data = load_experiment_data(c.dataset);
  const RFExperiment ex(data.train, data.test_X, c.kernel);
  ResultTable t{"predictor-fan", {"x", "rf_mean", "rf_std", "krr_effective", "f_star"}, {}};
  for_each_point(grid(c, ex.n_train(), true), [&](const GridPoint& g) {
    const auto P = static_cast<Eigen::Index>(g.P);
    const auto stats = ex.run(P, g.lambda, c.trials, c.base_seed, c.feature_kind);
    const auto eff = ex.effective_ridge(P, g.lambda);
    const Vector krr = krr_at(ex, eff.lambda_tilde);
    for (Eigen::Index k = 0; k < ex.n_test(); ++k) {
      auto row = key_row(g, c.base_seed, c.trials);
      row.metrics = {data.test_X(k, 0), stats.mean_prediction(k), std::sqrt(stats.var_prediction(k)),
                     krr(k), data.test_f_star(k)};
      t.rows.push_back(std::move(row));
    }
  });
  return t;
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input:
    case ErrorKind::parse:
      return exit_invalid_config;
    case ErrorKind::io:
      return exit_io;
    case ErrorKind::singular_gram:
    case ErrorKind::numeric:
    case ErrorKind::at_threshold:
    case ErrorKind::infeasible_target:
      return exit_numeric;
  }
  return exit_numeric;
}

ExperimentData load_experiment_data(const DatasetSpec& spec) {
  const std::uint64_t seed = spec.seed.value_or(0);
  switch (spec.source) {
    case DatasetSource::sinusoid:
      return generate_sinusoid(spec.n, spec.n_test, seed);
    case DatasetSource::clusters:
      return generate_clusters(spec.n, spec.n_test, spec.dim, spec.separation, seed);
    case DatasetSource::csv: {
      ExperimentData out;
      out.train = load_dataset_csv(spec.path);
      if (spec.test_path.empty()) {
        out.test_X = out.train.X;
        out.test_f_star = out.train.y;
      } else {
        const Dataset test = load_dataset_csv(spec.test_path);
        if (test.dim() != out.train.dim()) throw InvalidInput("test csv has a different dimension");
        out.test_X = test.X;
        out.test_f_star = test.y;
      }
      return out;
    }
    case DatasetSource::spectrum:
      break;
  }
  throw InvalidInput("a bare spectrum has no data points");
}

Vector experiment_spectrum(const ExperimentConfig& config) {
  if (config.dataset.source == DatasetSource::spectrum) {
    return generate_spectrum(config.dataset.spectrum, config.dataset.n);
  }
  const ExperimentData data = load_experiment_data(config.dataset);
  return spectral_decompose(gram_matrix(config.kernel, data.train.X)).eigenvalues;
}

ResultTable run_experiment(const ExperimentConfig& config) {
  config.validate();
  switch (config.experiment) {
    case Experiment::solve: return run_solve(config);
    case Experiment::calibrate: return run_calibrate(config);
    case Experiment::average_rf: return run_average_rf(config);
    case Experiment::double_descent: return run_double_descent(config);
    case Experiment::stieltjes: return run_stieltjes(config);
    case Experiment::expected_a: return run_expected_a(config);
    case Experiment::predictor_fan: return run_predictor_fan(config);
  }
  throw InvalidInput("unknown experiment");
}

namespace {

void write_plots(const ResultTable& table, const fs::path& dir) {
  for (const auto& [name, svg] : render_all_plots(table)) {
    write_file_atomic((dir / name).string(), svg);
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

}  // namespace

int cmd_run(const ExperimentConfig& config, std::ostream& log) {
  try {
    const ExperimentConfig resolved = config.resolved();
    resolved.validate();
    const ResultTable table = run_experiment(resolved);
    const std::string csv = to_csv(table);

    const fs::path dir(resolved.output_dir);
    ensure_dir(dir);
    write_file_atomic((dir / "results.csv").string(), csv);
    write_file_atomic((dir / "config.json").string(), config_to_json(resolved).dump(2) + "\n");
    write_plots(parse_results_csv(read_file((dir / "results.csv").string())), dir);
    log << to_string(resolved.experiment) << ": " << table.rows.size() << " rows written to "
        << (dir / "results.csv").string() << "\n";
    return exit_ok;
  } catch (const Error& e) {
    log << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

int cmd_plot(const std::string& results_csv, const std::string& output_dir, std::ostream& log) {
  try {
    const ResultTable table = parse_results_csv(read_file(results_csv));
    ensure_dir(output_dir);
    write_plots(table, output_dir);
    return exit_ok;
  } catch (const Error& e) {
    log << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace effridge::cli
