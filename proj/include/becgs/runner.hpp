// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "becgs/config.hpp"

namespace becgs {

struct ResultRow {
  std::vector<std::pair<std::string, double>> params;
  bool ok = false;
  double f = 0.0;
  double nrm_g = 0.0;
  int iter = 0;
  long inner_iter = 0;
  double cpu_s = 0.0;
  std::string term;  // termination code, or the error code for failed rows
  std::string tag;   // filename-friendly parameter tag
};

struct RunOptions {
  std::string out_dir;  // overrides the config value when nonempty
  bool dump_states = false;
  bool write_files = true;  // `table` prints to stdout only
};

struct RunOutcome {
  std::vector<ResultRow> rows;
  bool all_converged = true;
};

// Builds every sweep point, dispatches the configured solver, and (when
// requested) writes summary/history/state files under the output directory.
// Rows are ordered by the parameter tuple regardless of execution details.
RunOutcome execute(const RunConfig& config, const RunOptions& options);

// CSV with header params...,f,nrmG,iter,inner_iter,cpu_s,term.
void write_summary(const std::vector<ResultRow>& rows, std::ostream& os);

// Column text: node coordinates then phi1, phi2, full double precision.
// `rescale` maps the unit-norm state back to wave-function amplitude.
void dump_state(const IterateState& state, const Grid& grid, const std::string& path,
                std::array<double, 2> rescale = {1.0, 1.0});

}  // namespace becgs
