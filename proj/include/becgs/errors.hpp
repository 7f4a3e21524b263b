// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace becgs {

// Failure modes surfaced through SolverError. The names double as the
// machine-readable codes reported in CLI summary rows.
enum class Errc {
  NonfinitePotential,
  NonpositiveIterate,
  IndefiniteJacobian,
  NoConvergence,
  DegenerateBorder,
  LineSearchStall,
  InvalidSpec,
  ConfigParse,
};

const char* to_string(Errc code);

class SolverError : public std::runtime_error {
 public:
  SolverError(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw SolverError(code, message);
}

}  // namespace becgs
