#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hilfer/errors.hpp"
#include "hilfer/expr.hpp"
#include "hilfer/solver.hpp"

namespace hilfer {

/// Optional "solver" block of a problem file.
struct SolverOverrides {
  std::optional<int> n_base;
  std::optional<double> grading;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<double> damping;

  friend bool operator==(const SolverOverrides&, const SolverOverrides&) = default;
};

/// Optional "reported" block: externally published values of the
/// certificate, compared against the computed ones in literal mode.
struct ReportedValues {
  std::optional<double> q;
  std::optional<double> rho_norm;
  std::optional<double> G;
  std::optional<double> L_star;

  bool empty() const { return !q && !rho_norm && !G && !L_star; }
  friend bool operator==(const ReportedValues&, const ReportedValues&) = default;
};

struct ProblemFile {
  ProblemSpec spec;
  SolverOverrides solver;
  ReportedValues reported;
};

namespace detail {

using nlohmann::json;

inline std::string key_at(const std::string& prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

// Scalar entry: a JSON number or a constant expression string.
inline double read_scalar(const json& node, const std::string& path) {
  double v = 0.0;
  if (node.is_number()) {
    v = node.get<double>();
  } else if (node.is_string()) {
    const Expr e = parse(node.get<std::string>());
    if (uses(e, Var::t) || uses(e, Var::z)) throw SchemaError(path, "scalar expression must not use t or z");
    try {
      v = eval(e, 0.0, 0.0);
    } catch (const EvalError& err) {
      throw SchemaError(path, err.what());
    }
  } else {
    throw SchemaError(path, "expected a number or an expression string");
  }
  if (!std::isfinite(v)) throw SchemaError(path, "value is not finite");
  return v;
}

inline const json& require(const json& obj, std::string_view key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path, "missing required key");
  return *it;
}

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto k : allowed) known = known || k == key;
    if (!known) throw SchemaError(key_at(prefix, key), "unknown key");
  }
}

inline Expr read_expr(const json& node, const std::string& path) {
  // Numbers go through the parser so a negative literal becomes -(x), the
  // same tree its serialized text produces.
  if (node.is_number()) return parse(format_double(node.get<double>()));
  if (!node.is_string()) throw SchemaError(path, "expected an expression string");
  return parse(node.get<std::string>());
}

inline int read_int(const json& node, const std::string& path) {
  if (!node.is_number_integer()) throw SchemaError(path, "expected an integer");
  return node.get<int>();
}

}  // namespace detail

/// Builds a problem from a parsed JSON document. Errors name the key path
/// (e.g. "nonlocal[0].tau").
inline ProblemFile problem_from_json(const nlohmann::json& doc) {
  using detail::read_scalar;
  using detail::require;
  if (!doc.is_object()) throw SchemaError("", "problem document must be an object");
  detail::reject_unknown(doc, {"mu", "nu", "a", "b", "c", "d", "nonlocal", "f", "rho", "p", "solver", "reported"}, "");

  ProblemFile pf;
  ProblemSpec& s = pf.spec;
  const double mu = read_scalar(require(doc, "mu", "mu"), "mu");
  const double nu = read_scalar(require(doc, "nu", "nu"), "nu");
  if (!(mu > 0.0 && mu < 1.0)) throw SchemaError("mu", "must lie in (0, 1)");
  if (!(nu >= 0.0 && nu <= 1.0)) throw SchemaError("nu", "must lie in [0, 1]");
  s.order = FracOrder::make(mu, nu);
  s.a = read_scalar(require(doc, "a", "a"), "a");
  s.b = read_scalar(require(doc, "b", "b"), "b");
  if (!(s.a < s.b)) throw SchemaError("b", "must exceed a");
  s.c = read_scalar(require(doc, "c", "c"), "c");
  s.d = read_scalar(require(doc, "d", "d"), "d");

  if (auto it = doc.find("nonlocal"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("nonlocal", "expected a list");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string prefix = "nonlocal[" + std::to_string(k) + "]";
      const auto& item = (*it)[k];
      if (!item.is_object()) throw SchemaError(prefix, "expected an object with lambda and tau");
      detail::reject_unknown(item, {"lambda", "tau"}, prefix);
      NonlocalTerm term;
      term.lambda = read_scalar(require(item, "lambda", prefix + ".lambda"), prefix + ".lambda");
      term.tau = read_scalar(require(item, "tau", prefix + ".tau"), prefix + ".tau");
      if (!(term.tau > s.a && term.tau <= s.b)) throw SchemaError(prefix + ".tau", "tau outside (a, b]");
      s.nonlocal.push_back(term);
    }
  }

  s.f = detail::read_expr(require(doc, "f", "f"), "f");
  s.rho = detail::read_expr(require(doc, "rho", "rho"), "rho");
  if (uses(s.rho, Var::z)) throw SchemaError("rho", "growth bound must depend on t only");
  s.p = read_scalar(require(doc, "p", "p"), "p");
  if (!(s.p > 0.0)) throw SchemaError("p", "exponent must be positive");

  if (auto it = doc.find("solver"); it != doc.end()) {
    if (!it->is_object()) throw SchemaError("solver", "expected an object");
    detail::reject_unknown(*it, {"n_base", "grading", "tol", "max_iter", "damping"}, "solver");
    SolverOverrides& o = pf.solver;
    if (it->contains("n_base")) {
      o.n_base = detail::read_int((*it)["n_base"], "solver.n_base");
      if (*o.n_base < 8) throw SchemaError("solver.n_base", "must be at least 8");
    }
    if (it->contains("grading")) {
      o.grading = read_scalar((*it)["grading"], "solver.grading");
      if (!(*o.grading >= 1.0)) throw SchemaError("solver.grading", "must be at least 1");
    }
    if (it->contains("tol")) {
      o.tol = read_scalar((*it)["tol"], "solver.tol");
      if (!(*o.tol > 0.0)) throw SchemaError("solver.tol", "must be positive");
    }
    if (it->contains("max_iter")) {
      o.max_iter = detail::read_int((*it)["max_iter"], "solver.max_iter");
      if (*o.max_iter < 1) throw SchemaError("solver.max_iter", "must be positive");
    }
    if (it->contains("damping")) {
      o.damping = read_scalar((*it)["damping"], "solver.damping");
      if (!(*o.damping > 0.0 && *o.damping <= 1.0)) throw SchemaError("solver.damping", "must lie in (0, 1]");
    }
  }

  if (auto it = doc.find("reported"); it != doc.end()) {
    if (!it->is_object()) throw SchemaError("reported", "expected an object");
    detail::reject_unknown(*it, {"q", "rho_norm", "G", "L_star"}, "reported");
    ReportedValues& r = pf.reported;
    if (it->contains("q")) r.q = read_scalar((*it)["q"], "reported.q");
    if (it->contains("rho_norm")) r.rho_norm = read_scalar((*it)["rho_norm"], "reported.rho_norm");
    if (it->contains("G")) r.G = read_scalar((*it)["G"], "reported.G");
    if (it->contains("L_star")) r.L_star = read_scalar((*it)["L_star"], "reported.L_star");
  }
  return pf;
}

inline ProblemFile problem_from_string(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", std::string("malformed document: ") + e.what());
  }
  return problem_from_json(doc);
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline ProblemFile load_problem_file(const std::filesystem::path& path) {
  return problem_from_string(read_text_file(path));
}

inline ProblemSpec load_problem(const std::filesystem::path& path) { return load_problem_file(path).spec; }

/// Writes every scalar as a shortest round-trip number and expressions in
/// their fully parenthesized form, so that loading the result reproduces the
/// spec field for field.
inline nlohmann::ordered_json serialize(const ProblemFile& pf) {
  const ProblemSpec& s = pf.spec;
  nlohmann::ordered_json doc;
  doc["mu"] = s.order.mu;
  doc["nu"] = s.order.nu;
  doc["a"] = s.a;
  doc["b"] = s.b;
  doc["c"] = s.c;
  doc["d"] = s.d;
  doc["nonlocal"] = nlohmann::ordered_json::array();
  for (const auto& term : s.nonlocal) doc["nonlocal"].push_back({{"lambda", term.lambda}, {"tau", term.tau}});
  doc["f"] = to_string(s.f);
  doc["rho"] = to_string(s.rho);
  doc["p"] = s.p;
  const SolverOverrides& o = pf.solver;
  if (o != SolverOverrides{}) {
    auto& blk = doc["solver"];
    blk = nlohmann::ordered_json::object();
    if (o.n_base) blk["n_base"] = *o.n_base;
    if (o.grading) blk["grading"] = *o.grading;
    if (o.tol) blk["tol"] = *o.tol;
    if (o.max_iter) blk["max_iter"] = *o.max_iter;
    if (o.damping) blk["damping"] = *o.damping;
  }
  const ReportedValues& r = pf.reported;
  if (!r.empty()) {
    auto& blk = doc["reported"];
    blk = nlohmann::ordered_json::object();
    if (r.q) blk["q"] = *r.q;
    if (r.rho_norm) blk["rho_norm"] = *r.rho_norm;
    if (r.G) blk["G"] = *r.G;
    if (r.L_star) blk["L_star"] = *r.L_star;
  }
  return doc;
}

inline nlohmann::ordered_json serialize(const ProblemSpec& spec) { return serialize(ProblemFile{spec, {}, {}}); }

}  // namespace hilfer
