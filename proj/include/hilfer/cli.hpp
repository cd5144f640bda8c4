#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hilfer/errors.hpp"
#include "hilfer/existence.hpp"
#include "hilfer/problem_io.hpp"
#include "hilfer/solver.hpp"

namespace hilfer::cli {

using Json = nlohmann::ordered_json;

/// Process exit codes, one per outcome class.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kViolated = 2,
  kInadmissible = 3,
  kNoConvergence = 4,
  kVerifyFailed = 5,
};

struct Options {
  std::optional<int> n;
  std::optional<double> grade;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<double> damping;
  bool sweep_p = false;
  bool paper_literal = false;
  double bc_tol = 1e-5;
  double ode_tol = 5e-2;
};

struct CommandResult {
  int exit_code = kOk;
  Json report = Json::object();
  /// Solution table text; empty when the command produces none.
  std::string table;
};

/// The bundled nonlocal example, identical to problems/nonlocal_example.json.
inline constexpr std::string_view kExampleProblem = R"json({
  "mu": "1/3",
  "nu": "1/4",
  "a": 0,
  "b": 1,
  "c": "1/4",
  "d": "3/4",
  "nonlocal": [{"lambda": "2/5", "tau": "2/3"}],
  "f": "(1/16)*t*sin(abs(z))",
  "rho": "t/16",
  "p": "1/2",
  "reported": {"q": "1/2", "rho_norm": "1/48", "G": "0.03", "L_star": "0.14"}
}
)json";

inline ProblemFile example_problem() { return problem_from_string(kExampleProblem); }

/// Defaults, then the file's solver block, then command-line flags.
inline SolveConfig make_config(const ProblemFile& pf, const Options& opts) {
  SolveConfig c;
  const SolverOverrides& o = pf.solver;
  if (o.n_base) c.n_base = *o.n_base;
  if (o.grading) c.grading = *o.grading;
  if (o.tol) c.tol = *o.tol;
  if (o.max_iter) c.max_iter = *o.max_iter;
  if (o.damping) c.damping = *o.damping;
  if (opts.n) c.n_base = *opts.n;
  if (opts.grade) c.grading = *opts.grade;
  if (opts.tol) c.tol = *opts.tol;
  if (opts.max_iter) c.max_iter = *opts.max_iter;
  if (opts.damping) c.damping = *opts.damping;
  return c;
}

// ---------------------------------------------------------------------------
// Solution tables

/// "t,z,w" rows in shortest round-trip decimal. z at t = a is written as
/// "inf" (or "-inf") when the solution is singular there.
inline std::string format_solution_table(const WeightedGrid& g) {
  std::string out = "t,z,w\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double z = g.z(i);
    std::string zs = std::isinf(z) ? (z > 0 ? "inf" : "-inf") : format_double(z);
    out += format_double(g.mesh()[i]) + "," + zs + "," + format_double(g.w(i)) + "\n";
  }
  return out;
}

struct SolutionTable {
  std::vector<double> t;
  std::vector<double> w;
};

inline double parse_table_number(std::string_view cell, std::size_t line) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw IoError("solution table line " + std::to_string(line) + ": bad number '" + std::string(cell) + "'");
  }
  return v;
}

/// Reads a "t,z,w" table; the z column is informational and not parsed.
inline SolutionTable parse_solution_table(std::string_view text) {
  SolutionTable tab;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "t,z,w") throw IoError("solution table: expected header 't,z,w'");
      header_seen = true;
      continue;
    }
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      throw IoError("solution table line " + std::to_string(line_no) + ": expected three columns");
    }
    tab.t.push_back(parse_table_number(line.substr(0, c1), line_no));
    tab.w.push_back(parse_table_number(line.substr(c2 + 1), line_no));
  }
  if (!header_seen) throw IoError("solution table is empty");
  return tab;
}

/// Places a table on the problem mesh: same node count, nodes within 1e-12.
inline WeightedGrid grid_from_table(const SolutionTable& tab, const GradedMesh& mesh, double gamma_w) {
  if (tab.t.size() != mesh.size()) {
    throw MeshMismatchError("solution table has " + std::to_string(tab.t.size()) + " rows, mesh has " +
                            std::to_string(mesh.size()) + " nodes");
  }
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    if (!(std::abs(tab.t[i] - mesh[i]) <= 1e-12)) {
      throw MeshMismatchError("solution table node " + std::to_string(i) + " (t = " + format_double(tab.t[i]) +
                              ") is not mesh node " + format_double(mesh[i]));
    }
  }
  return WeightedGrid(mesh, gamma_w, tab.w);
}

// ---------------------------------------------------------------------------
// Report documents

inline Json optional_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json certificate_document(const DerivedParams& params, const ExistenceReport& r) {
  Json doc;
  doc["gamma"] = params.gamma;
  doc["A"] = params.A;
  doc["denom"] = params.denom;
  doc["p"] = r.p;
  doc["q"] = number_or_null(r.q);
  doc["lambda"] = optional_number(r.lambda_const);
  doc["delta"] = optional_number(r.delta_const);
  doc["rho_norm"] = r.rho_norm;
  doc["G"] = optional_number(r.G);
  doc["L_star"] = optional_number(r.L_star);
  Json terms;
  terms["G"] = r.terms_G ? Json(*r.terms_G) : Json(nullptr);
  terms["L_star"] = r.terms_L ? Json(*r.terms_L) : Json(nullptr);
  doc["terms"] = terms;
  doc["verdict"] = std::string(to_string(r.verdict));
  doc["admissible"] = r.admissible;
  doc["violations"] = r.violations;
  doc["L_star_literal"] = optional_number(r.L_star_literal);
  doc["notes"] = Json::array(
      {"L_star uses Gamma(1-gamma+mu) in its second term; L_star_literal evaluates that term with "
       "Gamma(mu-gamma) instead (null at a pole)",
       "G groups the boundary and integral contributions as terms.G[0] + terms.G[1] + terms.G[2]"});
  return doc;
}

inline Json sweep_summary(const SweepResult& sw) {
  Json arr = Json::array();
  for (const auto& c : sw.candidates) {
    Json item;
    item["p"] = c.p;
    item["G"] = optional_number(c.G);
    item["L_star"] = optional_number(c.L_star);
    item["verdict"] = std::string(to_string(c.verdict));
    arr.push_back(item);
  }
  return arr;
}

inline Json discrepancy(std::string_view name, double reported, double computed) {
  Json item;
  item["quantity"] = std::string(name);
  item["reported"] = reported;
  item["computed"] = number_or_null(computed);
  item["relative_difference"] =
      number_or_null(reported != 0.0 ? std::abs(computed - reported) / std::abs(reported) : std::abs(computed));
  return item;
}

// Literal mode: compares the file's reported values with the computed ones
// and explains why an inadmissible exponent cannot be trusted.
inline Json literal_discrepancies(const ProblemFile& pf, const DerivedParams& params, const ExistenceReport& r) {
  Json out = Json::array();
  const ReportedValues& rep = pf.reported;
  if (rep.q) {
    Json item = discrepancy("q", *rep.q, r.q);
    item["note"] = "1/p + 1/q = " + format_double(1.0 / r.p + 1.0 / *rep.q) + " with the reported q; the conjugate of p = " +
                   format_double(r.p) + " is q = " + format_double(r.q);
    out.push_back(item);
  }
  if (rep.rho_norm) out.push_back(discrepancy("rho_norm", *rep.rho_norm, r.rho_norm));
  if (rep.G) out.push_back(discrepancy("G", *rep.G, r.G.value_or(std::numeric_limits<double>::quiet_NaN())));
  if (rep.L_star) out.push_back(discrepancy("L_star", *rep.L_star, r.L_star.value_or(std::numeric_limits<double>::quiet_NaN())));
  if (!r.admissible && (rep.G || rep.L_star)) {
    const SweepResult sw = sweep(pf.spec, params);
    constexpr double inf = std::numeric_limits<double>::infinity();
    double g_lo = inf, g_hi = -inf, l_lo = inf, l_hi = -inf;
    for (const auto& c : sw.candidates) {
      if (!c.admissible) continue;
      g_lo = std::min(g_lo, *c.G);
      g_hi = std::max(g_hi, *c.G);
      l_lo = std::min(l_lo, *c.L_star);
      l_hi = std::max(l_hi, *c.L_star);
    }
    Json item;
    item["quantity"] = "admissible_sweep";
    item["note"] = "reported values rest on the inadmissible p = " + format_double(r.p) +
                   "; admissible exponents give the ranges below";
    item["G_range"] = Json::array({number_or_null(g_lo), number_or_null(g_hi)});
    item["L_star_range"] = Json::array({number_or_null(l_lo), number_or_null(l_hi)});
    out.push_back(item);
  }
  return out;
}

inline int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::satisfied: return kOk;
    case Verdict::violated: return kViolated;
    case Verdict::inadmissible: return kInadmissible;
  }
  return kInadmissible;
}

inline Json solve_document(const DerivedParams& params, const SolveReport& r, bool finished) {
  Json doc;
  doc["gamma"] = params.gamma;
  doc["A"] = params.A;
  doc["denom"] = params.denom;
  doc["n_nodes"] = r.solution.size();
  doc["iterations"] = r.iterations;
  doc["converged"] = r.converged;
  doc["damping"] = r.damping;
  Json hist = Json::array();
  for (double h : r.history) hist.push_back(number_or_null(h));
  doc["history"] = hist;
  doc["init_coeff"] = finished ? Json(r.init_coeff) : Json(nullptr);
  doc["residual_bc"] = finished ? number_or_null(r.residual_bc) : Json(nullptr);
  doc["residual_ode"] = finished ? number_or_null(r.residual_ode) : Json(nullptr);
  return doc;
}

inline CommandResult error_result(int code, const std::exception& e) {
  CommandResult res;
  res.exit_code = code;
  res.report["error"] = e.what();
  return res;
}

// Maps failures to exit codes; anything not classified is a usage/input error.
template <class F>
CommandResult guarded(F&& body) {
  try {
    return body();
  } catch (const SingularProblemError& e) {
    CommandResult res = error_result(kInadmissible, e);
    res.report["verdict"] = "inadmissible";
    return res;
  } catch (const Error& e) {
    return error_result(kUsage, e);
  } catch (const nlohmann::json::exception& e) {
    return error_result(kUsage, e);
  }
}

// ---------------------------------------------------------------------------
// Subcommands

inline CommandResult run_check(const ProblemFile& pf, const Options& opts) {
  return guarded([&] {
    if (opts.sweep_p && opts.paper_literal) throw Error("--sweep-p and --paper-literal are mutually exclusive");
    const DerivedParams params = derive_params(pf.spec);
    CommandResult res;
    if (opts.sweep_p) {
      const SweepResult sw = sweep(pf.spec, params);
      const ExistenceReport& chosen = sw.best ? sw.candidates[*sw.best] : sw.candidates.front();
      res.report = certificate_document(params, chosen);
      res.report["sweep"] = sweep_summary(sw);
      res.exit_code = verdict_exit(chosen.verdict);
      return res;
    }
    const ExistenceReport r = certificate(pf.spec, params);
    res.report = certificate_document(params, r);
    if (opts.paper_literal) res.report["discrepancies"] = literal_discrepancies(pf, params, r);
    res.exit_code = verdict_exit(r.verdict);
    return res;
  });
}

inline CommandResult run_solve(const ProblemFile& pf, const Options& opts) {
  return guarded([&] {
    const DerivedParams params = derive_params(pf.spec);
    const SolveConfig config = make_config(pf, opts);
    CommandResult res;
    try {
      const SolveReport r = solve_picard(pf.spec, config);
      res.report = solve_document(params, r, true);
      res.table = format_solution_table(r.solution);
    } catch (const NoConvergenceError& e) {
      res.exit_code = kNoConvergence;
      res.report = solve_document(params, e.report(), false);
      res.report["error"] = e.what();
      res.table = format_solution_table(e.report().solution);
    }
    return res;
  });
}

inline CommandResult run_verify(const ProblemFile& pf, std::string_view table_text, const Options& opts) {
  return guarded([&] {
    const DerivedParams params = derive_params(pf.spec);
    const SolveConfig config = make_config(pf, opts);
    const GradedMesh mesh = problem_mesh(pf.spec, config);
    const WeightedGrid z = grid_from_table(parse_solution_table(table_text), mesh, params.gamma);
    const double bc = verify_bc(pf.spec, params, z);
    const double ode = verify_ode(pf.spec, z, default_check_nodes(mesh, config.ode_skip_fraction));
    const bool passed = bc <= opts.bc_tol && ode <= opts.ode_tol;
    CommandResult res;
    res.report["residual_bc"] = number_or_null(bc);
    res.report["residual_ode"] = number_or_null(ode);
    res.report["bc_tol"] = opts.bc_tol;
    res.report["ode_tol"] = opts.ode_tol;
    res.report["passed"] = passed;
    res.exit_code = passed ? kOk : kVerifyFailed;
    return res;
  });
}

/// Certificate with the exponent sweep, then a solve, on the bundled example
/// (or on the given problem).
inline CommandResult run_example(const Options& opts, const std::optional<ProblemFile>& problem = std::nullopt) {
  const ProblemFile pf = problem ? *problem : example_problem();
  Options check_opts = opts;
  check_opts.sweep_p = true;
  check_opts.paper_literal = false;
  CommandResult check = run_check(pf, check_opts);
  CommandResult res;
  res.report["check"] = check.report;
  if (check.exit_code != kOk) {
    res.exit_code = check.exit_code;
    return res;
  }
  CommandResult solve = run_solve(pf, opts);
  res.report["solve"] = solve.report;
  res.table = std::move(solve.table);
  res.exit_code = solve.exit_code;
  return res;
}

// ---------------------------------------------------------------------------
// Command-line entry point

inline void emit(const CommandResult& res, const std::string& report_path, const std::string& table_path,
                 std::ostream& out) {
  const std::string text = res.report.dump(2) + "\n";
  if (report_path.empty()) {
    out << text;
  } else {
    write_text_file(report_path, text);
  }
  if (!table_path.empty() && !res.table.empty()) write_text_file(table_path, res.table);
}

/// Parses arguments, runs one subcommand, writes its outputs and returns
/// the exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hilfer fractional boundary value problems with nonlocal conditions", "hilfer"};
  app.require_subcommand(1);

  Options opts;
  std::string problem_path;
  std::string table_path;
  std::string out_path;
  std::string report_path;

  auto add_solver_flags = [&](CLI::App* sub) {
    sub->add_option("--n", opts.n, "graded mesh base node count")->check(CLI::Range(8, 1 << 20));
    sub->add_option("--grade", opts.grade, "mesh grading exponent (default max(1, 2/gamma))")
        ->check(CLI::Range(1.0, 1e6));
  };
  auto add_iteration_flags = [&](CLI::App* sub) {
    sub->add_option("--tol", opts.tol, "stopping tolerance in the weighted norm")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", opts.max_iter, "iteration limit")->check(CLI::Range(1, 1 << 30));
    sub->add_option("--damping", opts.damping, "relaxation factor in (0, 1]")
        ->check(CLI::PositiveNumber & CLI::Range(0.0, 1.0));
  };

  CLI::App* check = app.add_subcommand("check", "evaluate the existence certificate");
  check->add_option("problem", problem_path, "problem file")->required();
  check->add_flag("--sweep-p", opts.sweep_p, "pick the best exponent from the admissible sweep");
  check->add_flag("--paper-literal", opts.paper_literal, "use the file's exponent and compare reported values");
  check->add_option("--report", report_path, "write the report here instead of stdout");

  CLI::App* solve = app.add_subcommand("solve", "solve the boundary value problem");
  solve->add_option("problem", problem_path, "problem file")->required();
  add_solver_flags(solve);
  add_iteration_flags(solve);
  solve->add_option("--out", out_path, "write the t,z,w table here");
  solve->add_option("--report", report_path, "write the run report here instead of stdout");

  CLI::App* verify = app.add_subcommand("verify", "recompute residuals of a solution table");
  verify->add_option("problem", problem_path, "problem file")->required();
  verify->add_option("table", table_path, "t,z,w table")->required();
  add_solver_flags(verify);
  verify->add_option("--bc-tol", opts.bc_tol, "boundary residual tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--ode-tol", opts.ode_tol, "equation residual tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--report", report_path, "write the report here instead of stdout");

  CLI::App* example = app.add_subcommand("example", "run check and solve on the bundled example");
  add_solver_flags(example);
  add_iteration_flags(example);
  example->add_option("--out", out_path, "write the t,z,w table here");
  example->add_option("--report", report_path, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    CommandResult res;
    if (*example) {
      res = run_example(opts);
    } else {
      const ProblemFile pf = load_problem_file(problem_path);
      if (*check) {
        res = run_check(pf, opts);
      } else if (*solve) {
        res = run_solve(pf, opts);
      } else {
        res = run_verify(pf, read_text_file(table_path), opts);
      }
    }
    if (res.report.contains("error")) err << "error: " << res.report["error"].get<std::string>() << "\n";
    emit(res, report_path, out_path, out);
    return res.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace hilfer::cli
