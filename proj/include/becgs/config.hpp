// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "becgs/solvers.hpp"

namespace becgs {

// Minimal TOML-style document: [section] headers, key = value lines, # line
// comments. Values are strings, numbers, booleans or homogeneous arrays.
class ConfigDoc {
 public:
  struct Value {
    enum class Type { String, Number, Boolean, NumberList, StringList };
    Type type = Type::String;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<double> numbers;
    std::vector<std::string> strings;
    int line = 0;
  };

  static ConfigDoc parse_file(const std::string& path);
  static ConfigDoc parse_text(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_number(const std::string& section, const std::string& key, double fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_numbers(const std::string& section, const std::string& key) const;

  std::string require_string(const std::string& section, const std::string& key) const;
  double require_number(const std::string& section, const std::string& key) const;
  std::vector<double> require_numbers(const std::string& section, const std::string& key) const;

  // A number, or nullopt when the key is absent or set to the word "auto".
  std::optional<double> get_number_or_auto(const std::string& section,
                                           const std::string& key) const;

 private:
  const Value* find(const std::string& section, const std::string& key) const;
  const Value& require(const std::string& section, const std::string& key) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, Value>> sections_;
};

enum class ProblemFamily { SpinHalf, Spin1, Spin2, Custom, Multiblock };
enum class Algorithm { Anni, Alm, Multiblock };

struct MultiblockConfig {
  int m = 2;
  std::string plugin = "quartic";      // quartic | saturable | modified_gpe
  std::vector<double> quartic_beta;    // per block (recycled when shorter)
  double saturable_a = 1.0;
  std::vector<double> coupling;        // m*m row-major
};

struct ProblemConfig {
  ProblemFamily family = ProblemFamily::SpinHalf;
  Scheme scheme = Scheme::FD;
  Domain domain;
  std::array<int, 3> n{};
  PotentialSpec potential;

  double alpha = 0.5;
  double magnetization = 0.0;
  bool use_beta_ratio = false;
  double beta_scale = 1.0;
  std::array<double, 3> beta_ratio{1.0, 1.0, 1.0};  // b11 : b12 : b22
  double beta11 = 0.0, beta22 = 0.0, beta12 = 0.0;
  double beta0 = 0.0, beta1 = 0.0, beta2 = 0.0;
  double zeeman_p = 0.0, zeeman_q = 0.0;

  MultiblockConfig multiblock;
};

struct SweepConfig {
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> magnetization;
};

struct RunConfig {
  ProblemConfig problem;
  Algorithm algorithm = Algorithm::Anni;
  SolverConfig solver;
  bool linear_backend_auto = true;
  bool precond_shift_auto = true;
  SweepConfig sweep;
  std::string out_dir = "becgs_out";
};

RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text, const std::string& origin = "<string>");

}  // namespace becgs
