#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "hilfer/cli.hpp"
#include "hilfer/problem_io.hpp"

using namespace hilfer;
using nlohmann::json;

namespace {

const std::filesystem::path kBundled = std::filesystem::path(HILFER_SOURCE_DIR) / "problems" / "nonlocal_example.json";

json bundled_json() { return json::parse(read_text_file(kBundled)); }

std::string schema_key(const json& doc) {
  try {
    problem_from_json(doc);
  } catch (const SchemaError& e) {
    return e.key_path();
  }
  return "<no error>";
}

}  // namespace

TEST(LoadProblem, BundledExample) {
  const ProblemFile pf = load_problem_file(kBundled);
  EXPECT_EQ(pf.spec.order.mu, 1.0 / 3.0);
  EXPECT_EQ(pf.spec.order.nu, 0.25);
  EXPECT_EQ(pf.spec.order.gamma, 0.5);
  ASSERT_EQ(pf.spec.nonlocal.size(), 1u);
  EXPECT_EQ(pf.spec.nonlocal[0].lambda, 0.4);
  EXPECT_EQ(pf.spec.nonlocal[0].tau, 2.0 / 3.0);
  EXPECT_EQ(pf.spec.p, 0.5);
  EXPECT_EQ(*pf.reported.rho_norm, 1.0 / 48.0);
}

TEST(LoadProblem, EmbeddedExampleMatchesBundledFile) {
  EXPECT_EQ(json::parse(cli::kExampleProblem), bundled_json());
  EXPECT_EQ(cli::example_problem().spec, load_problem(kBundled));
}

TEST(LoadProblem, MissingKeyNamed) {
  json doc = bundled_json();
  doc.erase("mu");
  EXPECT_EQ(schema_key(doc), "mu");
}

TEST(LoadProblem, TauOutsideInterval) {
  json doc = bundled_json();
  doc["nonlocal"][0]["tau"] = 1.5;
  EXPECT_EQ(schema_key(doc), "nonlocal[0].tau");
  doc["nonlocal"][0]["tau"] = 0;
  EXPECT_EQ(schema_key(doc), "nonlocal[0].tau");
}

TEST(LoadProblem, NestedKeyPaths) {
  json doc = bundled_json();
  doc["nonlocal"][0].erase("lambda");
  EXPECT_EQ(schema_key(doc), "nonlocal[0].lambda");
  doc = bundled_json();
  doc["solver"] = {{"n_base", 2}};
  EXPECT_EQ(schema_key(doc), "solver.n_base");
  doc = bundled_json();
  doc["solver"] = {{"tolerance", 1e-6}};
  EXPECT_EQ(schema_key(doc), "solver.tolerance");
}

TEST(LoadProblem, UnknownTopLevelKey) {
  json doc = bundled_json();
  doc["extra"] = 1;
  EXPECT_EQ(schema_key(doc), "extra");
}

TEST(LoadProblem, ScalarsMustBeConstant) {
  json doc = bundled_json();
  doc["c"] = "t/4";
  EXPECT_EQ(schema_key(doc), "c");
  doc = bundled_json();
  doc["d"] = "1/0";
  EXPECT_EQ(schema_key(doc), "d");
}

TEST(LoadProblem, OrderRanges) {
  json doc = bundled_json();
  doc["mu"] = 1;
  EXPECT_EQ(schema_key(doc), "mu");
  doc = bundled_json();
  doc["nu"] = "-1/4";
  EXPECT_EQ(schema_key(doc), "nu");
  doc = bundled_json();
  doc["b"] = 0;
  EXPECT_EQ(schema_key(doc), "b");
}

TEST(LoadProblem, GrowthBoundMustNotUseState) {
  json doc = bundled_json();
  doc["rho"] = "t*z";
  EXPECT_EQ(schema_key(doc), "rho");
}

TEST(LoadProblem, ExpressionErrorsCarryOffset) {
  json doc = bundled_json();
  doc["f"] = "t*sin(";
  try {
    problem_from_json(doc);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 6u);
  }
}

TEST(LoadProblem, MalformedDocument) {
  EXPECT_THROW(problem_from_string("{\"mu\": "), SchemaError);
  EXPECT_THROW(problem_from_string("[1, 2]"), SchemaError);
}

TEST(LoadProblem, MissingFile) {
  EXPECT_THROW(load_problem_file("/nonexistent/problem.json"), IoError);
}

TEST(SerializeProperty, RoundTripIsIdentity) {
  ProblemFile pf = load_problem_file(kBundled);
  pf.solver.n_base = 256;
  pf.solver.damping = 0.5;
  ProblemFile again = problem_from_string(serialize(pf).dump());
  EXPECT_EQ(again.spec, pf.spec);
  EXPECT_EQ(again.solver, pf.solver);
  EXPECT_EQ(again.reported, pf.reported);

  ProblemSpec s = pf.spec;
  s.f = parse("-2*t + exp(-z)/3");
  s.rho = parse("-(1/7)*t^2");
  s.nonlocal.push_back({-0.125, 1.0});
  s.c = -0.1;
  EXPECT_EQ(problem_from_string(serialize(s).dump()).spec, s);
}

TEST(SerializeProperty, NumericExpressionsRoundTrip) {
  json doc = bundled_json();
  doc["f"] = -2.5;
  doc["rho"] = 3;
  const ProblemFile pf = problem_from_json(doc);
  EXPECT_EQ(problem_from_string(serialize(pf).dump()).spec, pf.spec);
}
