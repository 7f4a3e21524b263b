// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include "becgs/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "becgs/errors.hpp"

namespace becgs {

namespace {

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& msg) {
  fail(Errc::ConfigParse, origin + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Strips a # comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

bool parse_number(const std::string& tok, double& out) {
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end != nullptr && *end == '\0' && end != tok.c_str();
}

ConfigDoc::Value parse_value(const std::string& origin, int line, const std::string& raw) {
  ConfigDoc::Value v;
  v.line = line;
  const std::string tok = trim(raw);
  if (tok.empty()) parse_fail(origin, line, "empty value");

  if (tok.front() == '"') {
    if (tok.size() < 2 || tok.back() != '"') parse_fail(origin, line, "unterminated string");
    v.type = ConfigDoc::Value::Type::String;
    v.str = tok.substr(1, tok.size() - 2);
    return v;
  }
  if (tok == "true" || tok == "false") {
    v.type = ConfigDoc::Value::Type::Boolean;
    v.boolean = tok == "true";
    return v;
  }
  if (tok.front() == '[') {
    if (tok.back() != ']') parse_fail(origin, line, "unterminated array");
    const std::string body = tok.substr(1, tok.size() - 2);
    std::string item;
    std::vector<std::string> items;
    std::stringstream ss(body);
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) items.push_back(item);
    }
    if (!items.empty() && items.front().front() == '"') {
      v.type = ConfigDoc::Value::Type::StringList;
      for (const std::string& it : items) {
        if (it.size() < 2 || it.front() != '"' || it.back() != '"')
          parse_fail(origin, line, "malformed string array element '" + it + "'");
        v.strings.push_back(it.substr(1, it.size() - 2));
      }
    } else {
      v.type = ConfigDoc::Value::Type::NumberList;
      for (const std::string& it : items) {
        double x;
        if (!parse_number(it, x)) parse_fail(origin, line, "'" + it + "' is not a number");
        v.numbers.push_back(x);
      }
    }
    return v;
  }
  double x;
  if (parse_number(tok, x)) {
    v.type = ConfigDoc::Value::Type::Number;
    v.num = x;
    return v;
  }
  // Bare words act as strings ("auto", "anni", ...).
  v.type = ConfigDoc::Value::Type::String;
  v.str = tok;
  return v;
}

}  // namespace

ConfigDoc ConfigDoc::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::ConfigParse, "cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str(), path);
}

ConfigDoc ConfigDoc::parse_text(const std::string& text, const std::string& origin) {
  ConfigDoc doc;
  doc.origin_ = origin;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') parse_fail(origin, lineno, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) parse_fail(origin, lineno, "empty section name");
      doc.sections_[section];
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) parse_fail(origin, lineno, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) parse_fail(origin, lineno, "empty key");
    doc.sections_[section][key] = parse_value(origin, lineno, s.substr(eq + 1));
  }
  return doc;
}

const ConfigDoc::Value* ConfigDoc::find(const std::string& section,
                                        const std::string& key) const {
  auto sit = sections_.find(section);
  if (sit == sections_.end()) return nullptr;
  auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  return &kit->second;
}

const ConfigDoc::Value& ConfigDoc::require(const std::string& section,
                                           const std::string& key) const {
  const Value* v = find(section, key);
  if (v == nullptr)
    fail(Errc::ConfigParse, origin_ + ": missing required key '" + section + "." + key + "'");
  return *v;
}

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

bool ConfigDoc::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

std::string ConfigDoc::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  const Value* v = find(section, key);
  if (v == nullptr) return fallback;
  if (v->type != Value::Type::String)
    fail(Errc::ConfigParse, origin_ + ":" + std::to_string(v->line) + ": '" + section + "." +
                                key + "' must be a string");
  return v->str;
}

double ConfigDoc::get_number(const std::string& section, const std::string& key,
                             double fallback) const {
  const Value* v = find(section, key);
  if (v == nullptr) return fallback;
  if (v->type != Value::Type::Number)
    fail(Errc::ConfigParse, origin_ + ":" + std::to_string(v->line) + ": '" + section + "." +
                                key + "' must be a number");
  return v->num;
}

bool ConfigDoc::get_bool(const std::string& section, const std::string& key,
                         bool fallback) const {
  const Value* v = find(section, key);
  if (v == nullptr) return fallback;
  if (v->type != Value::Type::Boolean)
    fail(Errc::ConfigParse, origin_ + ":" + std::to_string(v->line) + ": '" + section + "." +
                                key + "' must be true or false");
  return v->boolean;
}

std::vector<double> ConfigDoc::get_numbers(const std::string& section,
                                           const std::string& key) const {
  const Value* v = find(section, key);
  if (v == nullptr) return {};
  if (v->type == Value::Type::Number) return {v->num};
  if (v->type != Value::Type::NumberList)
    fail(Errc::ConfigParse, origin_ + ":" + std::to_string(v->line) + ": '" + section + "." +
                                key + "' must be a number array");
  return v->numbers;
}

std::string ConfigDoc::require_string(const std::string& section, const std::string& key) const {
  require(section, key);
  return get_string(section, key, {});
}

double ConfigDoc::require_number(const std::string& section, const std::string& key) const {
  require(section, key);
  return get_number(section, key, 0.0);
}

std::vector<double> ConfigDoc::require_numbers(const std::string& section,
                                               const std::string& key) const {
  require(section, key);
  return get_numbers(section, key);
}

std::optional<double> ConfigDoc::get_number_or_auto(const std::string& section,
                                                    const std::string& key) const {
  const Value* v = find(section, key);
  if (v == nullptr) return std::nullopt;
  if (v->type == Value::Type::Number) return v->num;
  if (v->type == Value::Type::String && v->str == "auto") return std::nullopt;
  fail(Errc::ConfigParse, origin_ + ":" + std::to_string(v->line) + ": '" + section + "." + key +
                              "' must be a number or auto");
}

namespace {

ProblemFamily parse_family(const std::string& s) {
  if (s == "spin_half") return ProblemFamily::SpinHalf;
  if (s == "spin1") return ProblemFamily::Spin1;
  if (s == "spin2") return ProblemFamily::Spin2;
  if (s == "custom") return ProblemFamily::Custom;
  if (s == "multiblock") return ProblemFamily::Multiblock;
  fail(Errc::ConfigParse, "unknown problem.family '" + s + "'");
}

Scheme parse_scheme(const std::string& s) {
  if (s == "fd") return Scheme::FD;
  if (s == "spectral") return Scheme::Spectral;
  fail(Errc::ConfigParse, "unknown problem.scheme '" + s + "'");
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "anni") return Algorithm::Anni;
  if (s == "alm") return Algorithm::Alm;
  if (s == "multiblock") return Algorithm::Multiblock;
  fail(Errc::ConfigParse, "unknown solver.algorithm '" + s + "'");
}

PotentialSpec parse_potential(const ConfigDoc& doc, int dims) {
  std::vector<double> weights = doc.get_numbers("potential", "harmonic");
  if (weights.empty()) weights.assign(dims, 0.0);
  if (weights.size() == 1 && dims > 1) weights.assign(dims, weights[0]);
  if (static_cast<int>(weights.size()) != dims)
    fail(Errc::ConfigParse, "potential.harmonic needs one weight per axis");

  const std::string lattice = doc.get_string("potential", "lattice", "none");
  LatticeForm form = LatticeForm::None;
  if (lattice == "sin2")
    form = LatticeForm::Sin2;
  else if (lattice == "cos2")
    form = LatticeForm::Cos2;
  else if (lattice != "none")
    fail(Errc::ConfigParse, "potential.lattice must be none, sin2 or cos2");

  PotentialSpec pot = PotentialSpec::harmonic_lattice(
      weights, doc.get_number("potential", "lattice_amplitude", 0.0),
      doc.get_number("potential", "lattice_wavenumber", 1.0), form);
  pot.offset = doc.get_number("potential", "offset", 0.0);
  return pot;
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
  const ConfigDoc doc = ConfigDoc::parse_text(text, origin);
  RunConfig rc;

  ProblemConfig& pc = rc.problem;
  pc.family = parse_family(doc.require_string("problem", "family"));
  pc.scheme = parse_scheme(doc.get_string("problem", "scheme", "fd"));

  const std::vector<double> lower = doc.require_numbers("problem", "lower");
  const std::vector<double> upper = doc.require_numbers("problem", "upper");
  if (lower.empty() || lower.size() != upper.size() || lower.size() > 3)
    fail(Errc::ConfigParse, "problem.lower/upper must list 1..3 matching axis bounds");
  pc.domain.dims = static_cast<int>(lower.size());
  for (int a = 0; a < pc.domain.dims; ++a) {
    pc.domain.lower[a] = lower[a];
    pc.domain.upper[a] = upper[a];
  }

  std::vector<double> nvals = doc.require_numbers("problem", "n");
  if (nvals.size() == 1 && pc.domain.dims > 1) nvals.assign(pc.domain.dims, nvals[0]);
  if (static_cast<int>(nvals.size()) != pc.domain.dims)
    fail(Errc::ConfigParse, "problem.n needs one count per axis");
  for (int a = 0; a < pc.domain.dims; ++a) pc.n[a] = static_cast<int>(nvals[a]);

  pc.potential = parse_potential(doc, pc.domain.dims);

  pc.alpha = doc.get_number("problem", "alpha", 0.5);
  pc.magnetization = doc.get_number("problem", "m", 0.0);
  pc.zeeman_p = doc.get_number("problem", "p", 0.0);
  pc.zeeman_q = doc.get_number("problem", "q", 0.0);

  if (doc.has("problem", "beta_ratio")) {
    const std::vector<double> r = doc.require_numbers("problem", "beta_ratio");
    if (r.size() != 3)
      fail(Errc::ConfigParse, "problem.beta_ratio must list b11:b12:b22 ratios");
    pc.use_beta_ratio = true;
    pc.beta_ratio = {r[0], r[1], r[2]};
    pc.beta_scale = doc.get_number("problem", "beta", 1.0);
  } else {
    pc.beta11 = doc.get_number("problem", "beta11", 0.0);
    pc.beta22 = doc.get_number("problem", "beta22", 0.0);
    pc.beta12 = doc.get_number("problem", "beta12", 0.0);
  }
  pc.beta0 = doc.get_number("problem", "beta0", 0.0);
  pc.beta1 = doc.get_number("problem", "beta1", 0.0);
  pc.beta2 = doc.get_number("problem", "beta2", 0.0);

  if (pc.family == ProblemFamily::Multiblock) {
    MultiblockConfig& mb = pc.multiblock;
    mb.m = static_cast<int>(doc.get_number("multiblock", "m", 2));
    if (mb.m < 2) fail(Errc::ConfigParse, "multiblock.m must be at least 2");
    mb.plugin = doc.get_string("multiblock", "plugin", "quartic");
    mb.quartic_beta = doc.get_numbers("multiblock", "quartic_beta");
    if (mb.quartic_beta.empty()) mb.quartic_beta.push_back(1.0);
    mb.saturable_a = doc.get_number("multiblock", "saturable_a", 1.0);
    mb.coupling = doc.require_numbers("multiblock", "coupling");
    if (mb.coupling.size() != static_cast<std::size_t>(mb.m) * mb.m)
      fail(Errc::ConfigParse, "multiblock.coupling must be an m*m row-major list");
  }

  rc.algorithm = parse_algorithm(doc.get_string("solver", "algorithm", "anni"));
  SolverConfig& sc = rc.solver;
  sc.tau1 = doc.get_number("solver", "tau1", 0.0);
  sc.tau2 = doc.get_number_or_auto("solver", "tau2");
  sc.grad_tol = doc.get_number("solver", "grad_tol", 1e-6);
  sc.energy_tol = doc.get_number("solver", "energy_tol", 1e-12);
  sc.max_iter = static_cast<int>(doc.get_number("solver", "max_iter", 200));
  sc.max_halvings = static_cast<int>(doc.get_number("solver", "max_halvings", 60));
  sc.inner_nni_tol = doc.get_number("solver", "inner_nni_tol", 1e-8);
  sc.inner_max_iter = static_cast<int>(doc.get_number("solver", "inner_max_iter", 500));
  const std::string init = doc.get_string("solver", "init", "ones");
  if (init == "ones")
    sc.init = InitialGuess::Ones;
  else if (init == "gaussian")
    sc.init = InitialGuess::Gaussian;
  else
    fail(Errc::ConfigParse, "solver.init must be ones or gaussian");

  const std::string backend = doc.get_string("linear", "backend", "auto");
  if (backend == "auto") {
    rc.linear_backend_auto = true;
  } else if (backend == "direct") {
    rc.linear_backend_auto = false;
    sc.inner.backend = LinearBackend::DirectTridiag;
  } else if (backend == "pcg") {
    rc.linear_backend_auto = false;
    sc.inner.backend = LinearBackend::Pcg;
  } else {
    fail(Errc::ConfigParse, "linear.backend must be auto, direct or pcg");
  }
  sc.inner.pcg_tol = doc.get_number("linear", "pcg_tol", 1e-8);
  sc.inner.pcg_maxit = static_cast<int>(doc.get_number("linear", "pcg_maxit", 500));
  if (const auto shift = doc.get_number_or_auto("linear", "precond_shift")) {
    rc.precond_shift_auto = false;
    sc.inner.precond_shift = *shift;
  }

  rc.sweep.beta = doc.get_numbers("sweep", "beta");
  rc.sweep.alpha = doc.get_numbers("sweep", "alpha");
  rc.sweep.magnetization = doc.get_numbers("sweep", "m");
  if (doc.has_section("sweep") && !doc.has("sweep", "beta") && !doc.has("sweep", "alpha") &&
      !doc.has("sweep", "m"))
    fail(Errc::ConfigParse, "sweep section present but lists no beta/alpha/m values");

  rc.out_dir = doc.get_string("output", "dir", "becgs_out");
  return rc;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::ConfigParse, "cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config_text(buffer.str(), path);
}

}  // namespace becgs
