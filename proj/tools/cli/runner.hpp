#pragma once

#include "cli/config.hpp"
#include "cli/datasets.hpp"
#include "cli/results.hpp"
#include "effridge/errors.hpp"

#include <iosfwd>

namespace effridge::cli {

enum ExitCode : int { exit_ok = 0, exit_invalid_config = 1, exit_io = 2, exit_numeric = 3 };

int exit_code_for(ErrorKind kind) noexcept;

/// Points-based datasets (sinusoid, clusters, csv).
ExperimentData load_experiment_data(const DatasetSpec& spec);

/// Builtin spectrum, or the Gram eigenvalues of a points-based dataset.
Vector experiment_spectrum(const ExperimentConfig& config);

/// Pure computation: same resolved config, same table.
ResultTable run_experiment(const ExperimentConfig& config);

/// Runs, then writes results.csv, config.json and plot_<metric>.svg into
/// output_dir. Diagnostics go to `log`; returns an ExitCode.
int cmd_run(const ExperimentConfig& config, std::ostream& log);

/// Re-renders every plot for an existing results.csv into `output_dir`.
int cmd_plot(const std::string& results_csv, const std::string& output_dir, std::ostream& log);

}  // namespace effridge::cli
