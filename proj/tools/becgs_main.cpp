// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <iostream>

#include "becgs/errors.hpp"
#include "becgs/kernels.hpp"
#include "becgs/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ground states of multi-component condensates via alternating Newton iterations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool dump_states = false;
  int threads = 0;

  CLI::App* run = app.add_subcommand("run", "Solve every sweep point and write result files");
  run->add_option("config", config_path, "run configuration file")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_flag("--dump-states", dump_states, "write wave-function grid dumps per run");
  run->add_option("--threads", threads, "OpenMP thread count for the kernels");

  CLI::App* table = app.add_subcommand("table", "Print the summary table to standard output");
  table->add_option("config", config_path, "run configuration file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) becgs::kernels::set_max_threads(threads);
    const becgs::RunConfig config = becgs::parse_run_config(config_path);

    becgs::RunOptions options;
    options.out_dir = out_dir;
    options.dump_states = dump_states;
    options.write_files = run->parsed();

    const becgs::RunOutcome outcome = becgs::execute(config, options);
    becgs::write_summary(outcome.rows, std::cout);
    return outcome.all_converged ? 0 : 1;
  } catch (const becgs::SolverError& err) {
    std::cerr << err.what() << "\n";
    return err.code() == becgs::Errc::ConfigParse ? 2 : 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
