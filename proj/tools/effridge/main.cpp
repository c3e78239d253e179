#include "cli/config.hpp"
#include "cli/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace cli = effridge::cli;

namespace {

struct Overrides {
  std::string config_path;
  std::vector<double> gamma;
  std::vector<double> lambda;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_experiment(cli::Experiment experiment, const Overrides& o) {
  try {
    cli::ExperimentConfig config =
        o.config_path.empty() ? cli::default_config(experiment) : cli::load_config(o.config_path);
    if (config.experiment != experiment) {
      std::cerr << "error: config is for '" << cli::to_string(config.experiment) << "', not '"
                << cli::to_string(experiment) << "'\n";
      return cli::exit_invalid_config;
    }
    if (!o.gamma.empty()) {
      config.gamma_grid = o.gamma;
      config.p_grid.clear();
    }
    if (!o.lambda.empty()) config.lambda_list = o.lambda;
    if (o.trials) config.trials = *o.trials;
    if (o.seed) config.base_seed = *o.seed;
    if (!o.out.empty()) config.output_dir = o.out;
    return cli::cmd_run(config, std::cerr);
  } catch (const effridge::Error& e) {
    std::cerr << "error (" << effridge::to_string(e.kind()) << "): " << e.what() << "\n";
    return cli::exit_code_for(e.kind());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-feature regression and effective-ridge experiments"};
  app.require_subcommand(1);

  Overrides o;
  for (auto e : {cli::Experiment::solve, cli::Experiment::calibrate, cli::Experiment::average_rf,
                 cli::Experiment::double_descent, cli::Experiment::stieltjes,
                 cli::Experiment::expected_a, cli::Experiment::predictor_fan}) {
    auto* sub = app.add_subcommand(cli::to_string(e), std::string("run the ") + cli::to_string(e) + " experiment");
    sub->add_option("--config", o.config_path, "experiment config JSON (defaults if omitted)");
    sub->add_option("--gamma", o.gamma, "override gamma_grid");
    sub->add_option("--lambda", o.lambda, "override lambda_list");
    sub->add_option("--trials", o.trials, "override trials");
    sub->add_option("--seed", o.seed, "override base_seed");
    sub->add_option("--out", o.out, "override output_dir");
    sub->final_callback([e, &o] { throw CLI::RuntimeError(run_experiment(e, o)); });
  }

  std::string csv_path;
  std::string plot_out = ".";
  auto* plot = app.add_subcommand("plot", "re-render plot_<metric>.svg from a results.csv");
  plot->add_option("--csv", csv_path, "results.csv to render")->required();
  plot->add_option("--out", plot_out, "directory for the SVG files");
  plot->final_callback([&] { throw CLI::RuntimeError(cli::cmd_plot(csv_path, plot_out, std::cerr)); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::RuntimeError& e) {
    return e.get_exit_code();
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::exit_invalid_config;
  }
  return 0;
}
