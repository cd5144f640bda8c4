#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hilfer/cli.hpp"

using namespace hilfer;
using namespace hilfer::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kSourceDir = HILFER_SOURCE_DIR;
const fs::path kBundled = kSourceDir / "problems" / "nonlocal_example.json";

ProblemFile with_json_edit(const std::string& key, const nlohmann::json& value) {
  nlohmann::json doc = nlohmann::json::parse(kExampleProblem);
  doc[key] = value;
  return problem_from_json(doc);
}

// Rewrites every number to 12 significant digits so that golden files are
// insensitive to last-bit differences across compilers.
Json rounded(const Json& j) {
  if (j.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", j.get<double>());
    return Json::parse(buf);
  }
  if (j.is_array() || j.is_object()) {
    Json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) *it = rounded(*it);
    return out;
  }
  return j;
}

void expect_golden(const std::string& name, const Json& report) {
  const fs::path path = kSourceDir / "tests" / "golden" / name;
  const std::string text = rounded(report).dump(2) + "\n";
  if (std::getenv("HILFER_UPDATE_GOLDEN") != nullptr) {
    write_text_file(path, text);
    return;
  }
  ASSERT_TRUE(fs::exists(path)) << "missing golden file " << path << " (set HILFER_UPDATE_GOLDEN=1 to record)";
  EXPECT_EQ(read_text_file(path), text) << "golden mismatch for " << name;
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("hilfer_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

int run_tool(const std::string& args) {
  const std::string cmd = std::string(HILFER_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_problem(const fs::path& path, const ProblemFile& pf) { write_text_file(path, serialize(pf).dump(2)); }

}  // namespace

TEST(RunCheck, SweepSatisfied) {
  Options o;
  o.sweep_p = true;
  const CommandResult r = run_check(example_problem(), o);
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_EQ(r.report["verdict"], "satisfied");
  EXPECT_EQ(r.report["p"], 8.0);
  EXPECT_EQ(r.report["sweep"].size(), 4u);
}

TEST(RunCheck, ReportKeyOrder) {
  Options o;
  o.sweep_p = true;
  const CommandResult r = run_check(example_problem(), o);
  std::vector<std::string> keys;
  for (const auto& [k, v] : r.report.items()) keys.push_back(k);
  const std::vector<std::string> expected = {"gamma", "A",       "denom",   "p",        "q",          "lambda",
                                             "delta", "rho_norm", "G",       "L_star",   "terms",      "verdict",
                                             "admissible", "violations", "L_star_literal", "notes", "sweep"};
  EXPECT_EQ(keys, expected);
}

TEST(RunCheck, LiteralExponentInadmissible) {
  Options o;
  o.paper_literal = true;
  const CommandResult r = run_check(example_problem(), o);
  EXPECT_EQ(r.exit_code, kInadmissible);
  EXPECT_EQ(r.report["verdict"], "inadmissible");
  const Json& disc = r.report["discrepancies"];
  bool saw_q = false, saw_rho = false, saw_sweep = false;
  for (const auto& item : disc) {
    if (item["quantity"] == "q") {
      saw_q = true;
      EXPECT_EQ(item["reported"], 0.5);
      EXPECT_EQ(item["computed"], -1.0);
    }
    if (item["quantity"] == "rho_norm") {
      saw_rho = true;
      EXPECT_DOUBLE_EQ(item["reported"].get<double>(), 1.0 / 48.0);
      EXPECT_NEAR(item["computed"].get<double>(), 1.0 / 36.0, 1e-12);
    }
    if (item["quantity"] == "admissible_sweep") {
      saw_sweep = true;
      // The reported G = 0.03 lies below every admissible value.
      EXPECT_GT(item["G_range"][0].get<double>(), 0.03);
    }
  }
  EXPECT_TRUE(saw_q && saw_rho && saw_sweep);
}

TEST(RunCheck, FlagsAreExclusive) {
  Options o;
  o.paper_literal = true;
  o.sweep_p = true;
  EXPECT_EQ(run_check(example_problem(), o).exit_code, kUsage);
}

TEST(RunCheck, ScaledGrowthBoundViolated) {
  Options o;
  o.sweep_p = true;
  const CommandResult r = run_check(with_json_edit("rho", "1000*(t/16)"), o);
  EXPECT_EQ(r.exit_code, kViolated);
  EXPECT_EQ(r.report["verdict"], "violated");
}

TEST(RunSolve, ExampleConverges) {
  const CommandResult r = run_solve(example_problem(), {});
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_TRUE(r.report["converged"].get<bool>());
  EXPECT_LE(r.report["residual_bc"].get<double>(), 1e-6);
  EXPECT_EQ(r.table.substr(0, 6), "t,z,w\n");
}

TEST(RunSolve, ZeroForcingGivesZeroColumn) {
  const CommandResult r = run_solve(with_json_edit("f", "0"), {});
  ASSERT_EQ(r.exit_code, kOk);
  const auto tab = parse_solution_table(r.table);
  for (double w : tab.w) EXPECT_EQ(w, 0.0);
}

TEST(RunSolve, IterationLimitGivesPartialReport) {
  Options o;
  o.max_iter = 1;
  const CommandResult r = run_solve(with_json_edit("f", "1+(1/16)*t*sin(abs(z))"), o);
  EXPECT_EQ(r.exit_code, kNoConvergence);
  EXPECT_FALSE(r.report["converged"].get<bool>());
  EXPECT_TRUE(r.report["residual_bc"].is_null());
  EXPECT_EQ(r.report["history"].size(), 1u);
  EXPECT_FALSE(r.table.empty());
}

TEST(RunVerify, RoundTripPasses) {
  const ProblemFile pf = with_json_edit("f", "1+(1/16)*t*sin(abs(z))");
  const CommandResult solved = run_solve(pf, {});
  ASSERT_EQ(solved.exit_code, kOk);
  const CommandResult r = run_verify(pf, solved.table, {});
  EXPECT_EQ(r.exit_code, kOk) << r.report.dump();
  EXPECT_TRUE(r.report["passed"].get<bool>());
}

TEST(RunVerify, PerturbedTableFails) {
  const ProblemFile pf = with_json_edit("f", "1+(1/16)*t*sin(abs(z))");
  const CommandResult solved = run_solve(pf, {});
  const auto tab = parse_solution_table(solved.table);
  const DerivedParams dp = derive_params(pf.spec);
  std::vector<double> w = tab.w;
  for (double& v : w) v += 0.1;
  const GradedMesh mesh = problem_mesh(pf.spec, make_config(pf, {}));
  const std::string perturbed = format_solution_table(WeightedGrid(mesh, dp.gamma, w));
  const CommandResult r = run_verify(pf, perturbed, {});
  EXPECT_EQ(r.exit_code, kVerifyFailed);
  EXPECT_GT(r.report["residual_bc"].get<double>(), 0.0);
}

TEST(RunVerify, TrivialSolutionPasses) {
  const ProblemFile pf = with_json_edit("f", "0");
  const CommandResult solved = run_solve(pf, {});
  EXPECT_EQ(run_verify(pf, solved.table, {}).exit_code, kOk);
}

TEST(RunVerify, MeshMismatchIsAnInputError) {
  const ProblemFile pf = example_problem();
  Options coarse;
  coarse.n = 64;
  const CommandResult solved = run_solve(pf, coarse);
  EXPECT_EQ(run_verify(pf, solved.table, {}).exit_code, kUsage);
  EXPECT_EQ(run_verify(pf, "x,y\n1,2\n", {}).exit_code, kUsage);
}

TEST(RunExample, Succeeds) {
  const CommandResult r = run_example({});
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_TRUE(r.report.contains("check"));
  EXPECT_TRUE(r.report.contains("solve"));
}

TEST(RunExample, CoarseMeshSucceeds) {
  Options o;
  o.n = 64;
  EXPECT_EQ(run_example(o).exit_code, kOk);
}

TEST(RunExample, SingularVariantRejected) {
  ProblemFile pf = example_problem();
  const DerivedParams dp = derive_params(pf.spec);
  pf.spec.d = dp.A - pf.spec.c;
  const CommandResult r = run_example({}, pf);
  EXPECT_EQ(r.exit_code, kInadmissible);
  EXPECT_TRUE(r.report["check"].contains("error"));
}

TEST(Golden, CheckSweep) {
  Options o;
  o.sweep_p = true;
  expect_golden("check_sweep.json", run_check(example_problem(), o).report);
}

TEST(Golden, CheckLiteral) {
  Options o;
  o.paper_literal = true;
  expect_golden("check_literal.json", run_check(example_problem(), o).report);
}

TEST(Golden, SolveForced) {
  Options o;
  o.n = 64;
  expect_golden("solve_forced.json", run_solve(with_json_edit("f", "1+(1/16)*t*sin(abs(z))"), o).report);
}

TEST(RunCli, HelpAndBadFlags) {
  std::ostringstream out, err;
  const char* help[] = {"hilfer", "--help"};
  EXPECT_EQ(run_cli(2, help, out, err), kOk);
  const char* none[] = {"hilfer"};
  EXPECT_EQ(run_cli(1, none, out, err), kUsage);
  const char* bad[] = {"hilfer", "solve", "--n", "3", "x.json"};
  EXPECT_EQ(run_cli(5, bad, out, err), kUsage);
}

TEST(ExitCodeMatrix, EndToEnd) {
  TempDir dir;
  const fs::path violated = dir / "violated.json";
  const fs::path forced = dir / "forced.json";
  const fs::path singular = dir / "singular.json";
  const fs::path broken = dir / "broken.json";
  write_problem(violated, with_json_edit("rho", "1000*(t/16)"));
  write_problem(forced, with_json_edit("f", "1+(1/16)*t*sin(abs(z))"));
  {
    nlohmann::json doc = nlohmann::json::parse(kExampleProblem);
    doc["c"] = "1/4";
    doc["d"] = format_double(derive_params(example_problem().spec).A - 0.25);
    write_text_file(singular, doc.dump());
  }
  write_text_file(broken, "{\"mu\": ");

  const std::string b = kBundled.string();
  EXPECT_EQ(run_tool("check --sweep-p " + b), 0);
  EXPECT_EQ(run_tool("example --n 64"), 0);
  EXPECT_EQ(run_tool("check"), 1);
  EXPECT_EQ(run_tool("check /nonexistent.json"), 1);
  EXPECT_EQ(run_tool("check " + broken.string()), 1);
  EXPECT_EQ(run_tool("frobnicate"), 1);
  EXPECT_EQ(run_tool("check --sweep-p " + violated.string()), 2);
  EXPECT_EQ(run_tool("check --paper-literal " + b), 3);
  EXPECT_EQ(run_tool("check " + b), 3);
  EXPECT_EQ(run_tool("solve " + singular.string()), 3);
  EXPECT_EQ(run_tool("solve --max-iter 1 " + forced.string()), 4);

  const fs::path table = dir / "forced.csv";
  const fs::path report = dir / "report.json";
  EXPECT_EQ(run_tool("solve --n 64 " + forced.string() + " --out " + table.string() + " --report " + report.string()),
            0);
  ASSERT_TRUE(fs::exists(table));
  EXPECT_TRUE(nlohmann::json::parse(read_text_file(report))["converged"].get<bool>());
  EXPECT_EQ(run_tool("verify --n 64 " + forced.string() + " " + table.string()), 0);
  EXPECT_EQ(run_tool("verify " + forced.string() + " " + table.string()), 1);

  const auto tab = parse_solution_table(read_text_file(table));
  std::string shifted = "t,z,w\n";
  for (std::size_t i = 0; i < tab.t.size(); ++i) {
    shifted += format_double(tab.t[i]) + ",0," + format_double(tab.w[i] + 0.1) + "\n";
  }
  const fs::path bad_table = dir / "shifted.csv";
  write_text_file(bad_table, shifted);
  EXPECT_EQ(run_tool("verify --n 64 " + forced.string() + " " + bad_table.string()), 5);
}
