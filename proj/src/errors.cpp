// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include "becgs/errors.hpp"

namespace becgs {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::NonfinitePotential: return "NONFINITE_POTENTIAL";
    case Errc::NonpositiveIterate: return "NONPOSITIVE_ITERATE";
    case Errc::IndefiniteJacobian: return "INDEFINITE_JACOBIAN";
    case Errc::NoConvergence: return "NO_CONVERGENCE";
    case Errc::DegenerateBorder: return "DEGENERATE_BORDER";
    case Errc::LineSearchStall: return "LINE_SEARCH_STALL";
    case Errc::InvalidSpec: return "INVALID_SPEC";
    case Errc::ConfigParse: return "CONFIG_PARSE";
  }
  return "UNKNOWN";
}

}  // namespace becgs
