#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hilfer/errors.hpp"
#include "hilfer/expr.hpp"
#include "hilfer/fraccalc.hpp"
#include "hilfer/mesh.hpp"
#include "hilfer/specfun.hpp"

namespace hilfer {

/// One term lambda * z(tau) of the nonlocal condition.
struct NonlocalTerm {
  double lambda = 0.0;
  double tau = 0.0;

  friend bool operator==(const NonlocalTerm&, const NonlocalTerm&) = default;
};

/// Hilfer BVP  D^{mu,nu} z = f(t, z) on (a, b] with
/// c I^{1-gamma} z(a+) + d I^{1-gamma} z(b-) = sum_k lambda_k z(tau_k).
/// rho and p describe the growth bound |f(t, z)| <= rho(t).
struct ProblemSpec {
  FracOrder order;
  double a = 0.0;
  double b = 1.0;
  double c = 1.0;
  double d = 0.0;
  std::vector<NonlocalTerm> nonlocal;
  Expr f = Expr::number(0.0);
  Expr rho = Expr::number(0.0);
  double p = 2.0;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

struct DerivedParams {
  double gamma = 1.0;
  double A = 0.0;
  double denom = 1.0;
};

struct SolveConfig {
  int n_base = 512;
  /// Mesh grading exponent; unset means max(1, 2/gamma).
  std::optional<double> grading;
  double tol = 1e-8;
  int max_iter = 100;
  double damping = 1.0;
  /// verify_ode skips nodes with index below n_base * this fraction.
  double ode_skip_fraction = 0.125;

  double grading_for(double gamma) const { return grading.value_or(std::max(1.0, 2.0 / gamma)); }
};

struct SolveReport {
  WeightedGrid solution;
  double init_coeff = 0.0;
  int iterations = 0;
  std::vector<double> history;
  double residual_bc = 0.0;
  double residual_ode = 0.0;
  bool converged = false;
  /// Damping actually in effect when the iteration stopped.
  double damping = 1.0;
};

/// Picard iteration hit max_iter; the report is kept for diagnostics.
class NoConvergenceError : public Error {
 public:
  explicit NoConvergenceError(SolveReport report)
      : Error("Picard iteration did not converge in " + std::to_string(report.iterations) + " iterations"),
        report_(std::move(report)) {}

  const SolveReport& report() const noexcept { return report_; }

 private:
  SolveReport report_;
};

inline constexpr double kSingularThreshold = 1e-10;

inline void validate(const ProblemSpec& spec) {
  if (!(spec.a < spec.b) || !std::isfinite(spec.a) || !std::isfinite(spec.b)) {
    throw DomainError("problem: need finite a < b");
  }
  for (const auto& term : spec.nonlocal) {
    if (!(term.tau > spec.a && term.tau <= spec.b)) throw DomainError("problem: tau must lie in (a, b]");
  }
}

/// gamma, A = sum_k lambda_k (tau_k - a)^(gamma-1) / Gamma(gamma), and
/// denom = c + d - A. Throws SingularProblemError when denom is negligible.
inline DerivedParams derive_params(const ProblemSpec& spec) {
  validate(spec);
  DerivedParams dp;
  dp.gamma = spec.order.gamma;
  const double g = gamma(dp.gamma);
  for (const auto& term : spec.nonlocal) dp.A += term.lambda * std::pow(term.tau - spec.a, dp.gamma - 1.0) / g;
  dp.denom = spec.c + spec.d - dp.A;
  const double scale = std::abs(spec.c) + std::abs(spec.d) + std::abs(dp.A);
  if (!(std::abs(dp.denom) > kSingularThreshold * scale)) {
    throw SingularProblemError("c + d - A = " + format_double(dp.denom) + " vanishes; the problem is singular");
  }
  return dp;
}

/// Mesh used for a problem: graded skeleton plus every tau_k.
inline GradedMesh problem_mesh(const ProblemSpec& spec, const SolveConfig& config) {
  if (config.n_base < 8) throw DomainError("solver: n_base must be at least 8");
  std::vector<double> extra;
  for (const auto& term : spec.nonlocal) extra.push_back(term.tau);
  return build_mesh(spec.a, spec.b, config.n_base, config.grading_for(spec.order.gamma), extra);
}

/// Composite integrand s -> f(s, z(s)) sampled at the nodes, plus the
/// first-cell model f(s_m, (s_m - a)^(gamma-1) w(a)) at the midpoint of
/// [a, t1]. The node-0 sample is not used.
struct CompositeSamples {
  std::vector<double> values;
  double first_cell = 0.0;

  SampledIntegrand integrand() const { return {values, first_cell}; }
};

inline CompositeSamples sample_rhs(const ProblemSpec& spec, const WeightedGrid& z) {
  const GradedMesh& mesh = z.mesh();
  CompositeSamples out;
  out.values.assign(mesh.size(), 0.0);
  for (std::size_t i = 1; i < mesh.size(); ++i) out.values[i] = eval(spec.f, mesh[i], z.z(i));
  const double sm = 0.5 * (mesh[0] + mesh[1]);
  out.first_cell = eval(spec.f, sm, std::pow(sm - mesh.a(), z.gamma() - 1.0) * z.w(0));
  out.values[0] = out.first_cell;
  return out;
}

namespace detail {

// Quadrature operators a solve needs on its mesh: I^mu at every node and
// I^(1-gamma+mu) at b.
struct SolverOperators {
  RlWeights forward;
  RlWeights at_b;
  std::vector<std::size_t> tau_nodes;

  SolverOperators(const ProblemSpec& spec, const GradedMesh& mesh)
      : forward(mesh, spec.order.mu), at_b(make_at_b(spec, mesh)) {
    for (const auto& term : spec.nonlocal) tau_nodes.push_back(mesh.node_index(term.tau));
  }

  static RlWeights make_at_b(const ProblemSpec& spec, const GradedMesh& mesh) {
    const std::size_t last = mesh.last();
    return RlWeights(mesh, 1.0 - spec.order.gamma + spec.order.mu, std::span<const std::size_t>(&last, 1));
  }
};

inline double initial_coefficient(const ProblemSpec& spec, const DerivedParams& params,
                                  const SolverOperators& ops, const SampledIntegrand& rhs,
                                  std::size_t last) {
  double sum = 0.0;
  for (std::size_t k = 0; k < spec.nonlocal.size(); ++k) {
    sum += spec.nonlocal[k].lambda * ops.forward.apply(rhs, ops.tau_nodes[k]);
  }
  const double tail = spec.d == 0.0 ? 0.0 : spec.d * ops.at_b.apply(rhs, last);
  return (sum - tail) / params.denom;
}

inline WeightedGrid apply_T(const ProblemSpec& spec, const DerivedParams& params, const SolverOperators& ops,
                            const WeightedGrid& z, double* init_coeff_out = nullptr) {
  const GradedMesh& mesh = z.mesh();
  const CompositeSamples samples = sample_rhs(spec, z);
  const SampledIntegrand rhs = samples.integrand();
  const double init = initial_coefficient(spec, params, ops, rhs, mesh.last());
  if (init_coeff_out) *init_coeff_out = init;
  const double gamma_w = params.gamma;
  std::vector<double> w(mesh.size());
  w[0] = init / gamma(gamma_w);
  for (std::size_t i = 1; i < mesh.size(); ++i) {
    w[i] = w[0] + std::pow(mesh[i] - mesh.a(), 1.0 - gamma_w) * ops.forward.apply(rhs, i);
  }
  return WeightedGrid(mesh, gamma_w, std::move(w));
}

inline double weighted_distance(const WeightedGrid& x, const WeightedGrid& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x.w(i) - y.w(i)));
  return m;
}

}  // namespace detail

/// I^{1-gamma} z(a+) recovered from the boundary condition:
/// [sum_k lambda_k I^mu f(tau_k) - d I^{1-gamma+mu} f(b)] / (c + d - A).
inline double initial_coefficient(const ProblemSpec& spec, const DerivedParams& params, const WeightedGrid& z) {
  const detail::SolverOperators ops(spec, z.mesh());
  const CompositeSamples samples = sample_rhs(spec, z);
  return detail::initial_coefficient(spec, params, ops, samples.integrand(), z.mesh().last());
}

/// Fixed-point operator of the equivalent integral equation, in weighted form.
inline WeightedGrid apply_T(const ProblemSpec& spec, const DerivedParams& params, const WeightedGrid& z) {
  const detail::SolverOperators ops(spec, z.mesh());
  return detail::apply_T(spec, params, ops, z);
}

/// |c Gamma(gamma) w(a) + d (Gamma(gamma) w(a) + I^{1-gamma+mu} f(b)) - sum_k lambda_k z(tau_k)|.
inline double verify_bc(const ProblemSpec& spec, const DerivedParams& params, const WeightedGrid& z) {
  const GradedMesh& mesh = z.mesh();
  const double at_a = gamma(params.gamma) * z.w(0);
  double at_b = at_a;
  if (spec.d != 0.0) {
    const CompositeSamples samples = sample_rhs(spec, z);
    const double beta_order = 1.0 - params.gamma + spec.order.mu;
    at_b += rl_integral_quad(mesh, samples.integrand(), beta_order, mesh.b());
  }
  double rhs = 0.0;
  for (const auto& term : spec.nonlocal) rhs += term.lambda * z.z(mesh.node_index(term.tau));
  return std::abs(spec.c * at_a + spec.d * at_b - rhs);
}

/// Default verify_ode nodes: indices from n_base * skip_fraction up to the
/// last interior node.
inline std::vector<std::size_t> default_check_nodes(const GradedMesh& mesh, double skip_fraction = 0.125) {
  const auto first = std::max<std::size_t>(1, static_cast<std::size_t>(mesh.n_base() * skip_fraction));
  std::vector<std::size_t> nodes;
  for (std::size_t i = first; i < mesh.last(); ++i) nodes.push_back(i);
  return nodes;
}

/// max over check nodes of (t-a)^(1-gamma) |D^{mu,nu} z(t) - f(t, z(t))|.
inline double verify_ode(const ProblemSpec& spec, const WeightedGrid& z, std::span<const std::size_t> check_nodes) {
  const GradedMesh& mesh = z.mesh();
  const std::vector<double> deriv = hilfer_derivative_table(z, spec.order);
  double worst = 0.0;
  for (std::size_t i : check_nodes) {
    if (i == 0 || i >= mesh.last()) throw DomainError("verify_ode: check nodes must be interior");
    const double r = std::abs(deriv[i] - eval(spec.f, mesh[i], z.z(i)));
    worst = std::max(worst, std::pow(mesh[i] - mesh.a(), 1.0 - z.gamma()) * r);
  }
  return worst;
}

inline double verify_ode(const ProblemSpec& spec, const WeightedGrid& z) {
  const auto nodes = default_check_nodes(z.mesh());
  return verify_ode(spec, z, nodes);
}

namespace detail {

// Damped Picard loop shared by the BVP and IVP solvers. step(z) applies the
// fixed-point map; the iteration starts from z = 0.
template <class Step>
SolveReport picard(const GradedMesh& mesh, double gamma_w, const SolveConfig& config, Step&& step) {
  if (!(config.tol > 0.0)) throw DomainError("solver: tol must be positive");
  if (!(config.damping > 0.0 && config.damping <= 1.0)) throw DomainError("solver: damping must lie in (0, 1]");
  if (config.max_iter < 1) throw DomainError("solver: max_iter must be positive");

  WeightedGrid z(mesh, gamma_w, std::vector<double>(mesh.size(), 0.0));
  SolveReport report{z, 0.0, 0, {}, 0.0, 0.0, false, config.damping};
  double damping = config.damping;
  int halvings = 0;
  int rising = 0;
  while (report.iterations < config.max_iter) {
    WeightedGrid tz = step(z, report.init_coeff);
    if (damping != 1.0) {
      std::vector<double> w(mesh.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1.0 - damping) * z.w(i) + damping * tz.w(i);
      tz = WeightedGrid(mesh, gamma_w, std::move(w));
    }
    const double diff = weighted_distance(tz, z);
    ++report.iterations;
    if (!report.history.empty() && diff > report.history.back()) {
      ++rising;
    } else {
      rising = 0;
    }
    report.history.push_back(diff);
    z = std::move(tz);
    if (!std::isfinite(diff)) break;
    if (diff <= config.tol) {
      report.converged = true;
      break;
    }
    if (rising >= 5 && halvings < 3) {
      damping *= 0.5;
      ++halvings;
      rising = 0;
    }
  }
  report.solution = std::move(z);
  report.damping = damping;
  return report;
}

}  // namespace detail

/// Solves the BVP by damped Picard iteration on the integral equation from
/// z = 0, then fills the residuals. Throws NoConvergenceError (carrying the
/// report) if the tolerance is not met within max_iter.
inline SolveReport solve_picard(const ProblemSpec& spec, const SolveConfig& config = {}) {
  const DerivedParams params = derive_params(spec);
  const GradedMesh mesh = problem_mesh(spec, config);
  const detail::SolverOperators ops(spec, mesh);
  auto step = [&](const WeightedGrid& z, double& init) { return detail::apply_T(spec, params, ops, z, &init); };
  SolveReport report = detail::picard(mesh, params.gamma, config, step);
  if (!report.converged) throw NoConvergenceError(std::move(report));
  // The stored coefficient belongs to the last T application; recompute it
  // for the accepted iterate.
  report.init_coeff = detail::initial_coefficient(spec, params, ops, sample_rhs(spec, report.solution).integrand(),
                                                  mesh.last());
  report.residual_bc = verify_bc(spec, params, report.solution);
  report.residual_ode = verify_ode(spec, report.solution, default_check_nodes(mesh, config.ode_skip_fraction));
  return report;
}

/// Solves z(t) = z_a/Gamma(gamma) (t-a)^(gamma-1) + I^mu f(t, z(t)) with the same
/// mesh and Picard machinery as solve_picard.
inline WeightedGrid solve_volterra_ivp(const ProblemSpec& spec, double z_a, const SolveConfig& config = {}) {
  validate(spec);
  if (!std::isfinite(z_a)) throw DomainError("solve_volterra_ivp: z_a must be finite");
  const GradedMesh mesh = problem_mesh(spec, config);
  const double gamma_w = spec.order.gamma;
  const RlWeights forward(mesh, spec.order.mu);
  const double w_a = z_a / gamma(gamma_w);
  auto step = [&](const WeightedGrid& z, double& init) {
    init = z_a;
    const CompositeSamples samples = sample_rhs(spec, z);
    const SampledIntegrand rhs = samples.integrand();
    std::vector<double> w(mesh.size());
    w[0] = w_a;
    for (std::size_t i = 1; i < mesh.size(); ++i) {
      w[i] = w_a + std::pow(mesh[i] - mesh.a(), 1.0 - gamma_w) * forward.apply(rhs, i);
    }
    return WeightedGrid(mesh, gamma_w, std::move(w));
  };
  SolveReport report = detail::picard(mesh, gamma_w, config, step);
  if (!report.converged) throw NoConvergenceError(std::move(report));
  return std::move(report.solution);
}

}  // namespace hilfer
