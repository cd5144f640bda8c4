#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hilfer/errors.hpp"
#include "hilfer/mesh.hpp"
#include "hilfer/quadrature.hpp"
#include "hilfer/specfun.hpp"

namespace hilfer {

/// Closed-form RL integral of a power: I^mu (t-a)^(delta-1) evaluated at t.
inline double rl_integral_monomial(double mu, double delta, double a, double t) {
  if (!(t > a)) throw DomainError("rl_integral_monomial: need t > a");
  if (!(mu >= 0.0)) throw DomainError("rl_integral_monomial: need mu >= 0");
  if (!(delta > 0.0)) throw DomainError("rl_integral_monomial: need delta > 0");
  if (mu == 0.0) return std::pow(t - a, delta - 1.0);
  return gamma(delta) / gamma(delta + mu) * std::pow(t - a, delta + mu - 1.0);
}

/// Node samples of a bounded integrand. When first_cell is set, the first
/// subinterval [t0, t1] uses that constant instead of the linear interpolant
/// of values[0], values[1] (values[0] may then be non-finite).
struct SampledIntegrand {
  std::span<const double> values;
  std::optional<double> first_cell;
};

namespace detail {

inline constexpr double kExponentTolerance = 1e-12;

// Product-integration weights for one target node n. tail[j] collects the
// contributions of cells 1..n-1 to node j; cell 0 is kept apart so that it
// can be swapped for a one-point rule.
struct QuadRow {
  std::vector<double> tail;
  double c0_left = 0.0;
  double c0_right = 0.0;
  double c0_point = 0.0;
};

inline void check_order(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("RL integral order must lie in (0, 1], got " + std::to_string(alpha));
  }
}

inline QuadRow plain_row(const GradedMesh& mesh, double alpha, std::size_t n) {
  QuadRow row;
  row.tail.assign(n + 1, 0.0);
  if (n == 0) return row;
  const double inv_gamma = 1.0 / gamma(alpha);
  const auto& x = mesh.nodes();
  const double t = x[n];
  for (std::size_t j = 1; j < n; ++j) {
    const CellWeights cw = kernel_cell(t, x[j], x[j + 1], alpha);
    row.tail[j] += cw.left * inv_gamma;
    row.tail[j + 1] += cw.right * inv_gamma;
  }
  const CellWeights c0 = kernel_cell(t, x[0], x[1], alpha);
  row.c0_left = c0.left * inv_gamma;
  row.c0_right = c0.right * inv_gamma;
  row.c0_point = kernel_moment0(t, x[0], x[1], alpha) * inv_gamma;
  return row;
}

// Weights of I^alpha[(s-a)^(gamma-1) w(s)] at node n against w-values.
inline std::vector<double> weighted_row(const GradedMesh& mesh, double alpha, double gamma_w, std::size_t n) {
  std::vector<double> row(n + 1, 0.0);
  if (n == 0) return row;
  const double inv_gamma = 1.0 / gamma(alpha);
  const auto& x = mesh.nodes();
  const double t = x[n];
  for (std::size_t j = 0; j < n; ++j) {
    const CellWeights cw = weighted_cell(mesh.a(), t, x[j], x[j + 1], alpha, gamma_w);
    row[j] += cw.left * inv_gamma;
    row[j + 1] += cw.right * inv_gamma;
  }
  return row;
}

inline double apply_row(const QuadRow& row, const SampledIntegrand& phi) {
  double sum = 0.0;
  for (std::size_t j = 1; j < row.tail.size(); ++j) sum += row.tail[j] * phi.values[j];
  if (row.tail.size() < 2) return 0.0;
  if (phi.first_cell) return sum + row.c0_point * *phi.first_cell;
  return sum + row.c0_left * phi.values[0] + row.c0_right * phi.values[1];
}

inline double dot(std::span<const double> weights, std::span<const double> values) {
  double sum = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) sum += weights[j] * values[j];
  return sum;
}

// Limit at t = a of I^alpha[(s-a)^(gamma-1) w(s)] for continuous w.
inline double weighted_limit_at_a(double alpha, double gamma_w, double w0) {
  if (w0 == 0.0) return 0.0;
  const double e = gamma_w + alpha - 1.0;
  if (e > kExponentTolerance) return 0.0;
  if (e >= -kExponentTolerance) return gamma(gamma_w) / gamma(gamma_w + alpha) * w0;
  return std::copysign(std::numeric_limits<double>::infinity(), w0);
}

inline void check_sizes(const GradedMesh& mesh, std::size_t count) {
  if (count != mesh.size()) throw DomainError("integrand needs one sample per mesh node");
}

// Derivative at x[k] of the quadratic through the three points starting at i0.
inline double lagrange3_slope(const std::vector<double>& x, std::size_t i0, std::size_t k, double v0,
                              double v1, double v2) {
  const double x0 = x[i0];
  const double x1 = x[i0 + 1];
  const double x2 = x[i0 + 2];
  const double t = x[k];
  const double l0 = ((t - x1) + (t - x2)) / ((x0 - x1) * (x0 - x2));
  const double l1 = ((t - x0) + (t - x2)) / ((x1 - x0) * (x1 - x2));
  const double l2 = ((t - x0) + (t - x1)) / ((x2 - x0) * (x2 - x1));
  return l0 * v0 + l1 * v1 + l2 * v2;
}

// Three-point derivative at node i of the node function get(j): centered in
// the interior, one-sided at the ends, and shifted forward when the left
// neighbour is not finite. Returns NaN where no finite stencil exists.
template <class Get>
double stencil_derivative(const GradedMesh& mesh, std::size_t i, Get&& get) {
  const std::size_t last = mesh.last();
  if (last < 2) throw DomainError("finite differences need at least three nodes");
  std::size_t i0 = i == 0 ? 0 : (i == last ? last - 2 : i - 1);
  if (!std::isfinite(get(i0))) {
    if (i == 0 || i + 2 > last) return std::numeric_limits<double>::quiet_NaN();
    i0 = i;
  }
  return lagrange3_slope(mesh.nodes(), i0, i, get(i0), get(i0 + 1), get(i0 + 2));
}

inline std::size_t interior_node(const GradedMesh& mesh, double t) {
  const std::size_t n = mesh.node_index(t);
  if (n == 0 || n == mesh.last()) {
    throw DomainError("derivative requested at boundary node t = " + std::to_string(t));
  }
  return n;
}

}  // namespace detail

/// (1/Gamma(mu)) int_a^t (t-s)^(mu-1) phi(s) ds for a bounded integrand given
/// by node samples, by product-trapezoid integration. t must be a mesh node.
inline double rl_integral_quad(const GradedMesh& mesh, const SampledIntegrand& phi, double mu, double t) {
  detail::check_order(mu);
  detail::check_sizes(mesh, phi.values.size());
  const std::size_t n = mesh.node_index(t);
  return detail::apply_row(detail::plain_row(mesh, mu, n), phi);
}

inline double rl_integral_quad(const GradedMesh& mesh, std::span<const double> phi, double mu, double t) {
  return rl_integral_quad(mesh, SampledIntegrand{phi, std::nullopt}, mu, t);
}

/// RL integral of z = (s-a)^(gamma-1) w(s) stored in a WeightedGrid. The weight
/// is integrated exactly against the kernel; w is interpolated linearly. At
/// t = a the analytic limit is returned (possibly infinite).
inline double rl_integral_quad(const WeightedGrid& g, double mu, double t) {
  detail::check_order(mu);
  const GradedMesh& mesh = g.mesh();
  const std::size_t n = mesh.node_index(t);
  if (n == 0) return detail::weighted_limit_at_a(mu, g.gamma(), g.w(0));
  if (g.gamma() == 1.0) return detail::apply_row(detail::plain_row(mesh, mu, n), {g.w(), std::nullopt});
  return detail::dot(detail::weighted_row(mesh, mu, g.gamma(), n), g.w());
}

/// rl_integral_quad at every node. Order 0 returns the samples unchanged.
inline std::vector<double> rl_integral_table(const GradedMesh& mesh, const SampledIntegrand& phi, double mu) {
  detail::check_sizes(mesh, phi.values.size());
  if (mu == 0.0) return {phi.values.begin(), phi.values.end()};
  detail::check_order(mu);
  std::vector<double> out(mesh.size(), 0.0);
  for (std::size_t n = 1; n < mesh.size(); ++n) out[n] = detail::apply_row(detail::plain_row(mesh, mu, n), phi);
  return out;
}

/// Weighted-grid table; entry 0 is the analytic limit at a. Order 0 returns z.
inline std::vector<double> rl_integral_table(const WeightedGrid& g, double mu) {
  std::vector<double> out(g.size());
  if (mu == 0.0) {
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g.z(i);
    return out;
  }
  detail::check_order(mu);
  if (g.gamma() == 1.0) return rl_integral_table(g.mesh(), SampledIntegrand{g.w(), std::nullopt}, mu);
  out[0] = detail::weighted_limit_at_a(mu, g.gamma(), g.w(0));
  for (std::size_t n = 1; n < g.size(); ++n) {
    out[n] = detail::dot(detail::weighted_row(g.mesh(), mu, g.gamma(), n), g.w());
  }
  return out;
}

/// I^mu z returned in weighted form. The result carries gamma + mu when that
/// is at most 1 (so its weighted value at a stays finite), and gamma + mu - 1
/// otherwise (then the weighted value at a is 0).
inline WeightedGrid rl_integral(const WeightedGrid& g, double mu) {
  if (mu == 0.0) return g;
  const std::vector<double> vals = rl_integral_table(g, mu);
  const double sum = g.gamma() + mu;
  const bool keeps_singularity = sum <= 1.0 + detail::kExponentTolerance;
  const double gamma_out = keeps_singularity ? std::min(sum, 1.0) : sum - 1.0;
  const GradedMesh& mesh = g.mesh();
  std::vector<double> w(g.size());
  w[0] = keeps_singularity ? gamma(g.gamma()) / gamma(g.gamma() + mu) * g.w(0) : 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) w[i] = std::pow(mesh[i] - mesh.a(), 1.0 - gamma_out) * vals[i];
  return WeightedGrid(mesh, gamma_out, std::move(w));
}

/// Precomputed product-integration weights of I^mu for a fixed mesh, for
/// repeated application to bounded integrands (the Picard loop).
class RlWeights {
 public:
  /// Rows for the given target nodes; default is every node.
  RlWeights(const GradedMesh& mesh, double mu, std::span<const std::size_t> targets = {}) : mu_(mu) {
    detail::check_order(mu);
    std::vector<std::size_t> all;
    if (targets.empty()) {
      all.resize(mesh.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      targets = all;
    }
    index_.assign(mesh.size(), kAbsent);
    for (std::size_t n : targets) {
      if (n >= mesh.size()) throw DomainError("RlWeights: target node out of range");
      if (index_[n] != kAbsent) continue;
      index_[n] = rows_.size();
      rows_.push_back(detail::plain_row(mesh, mu, n));
    }
  }

  double order() const { return mu_; }

  /// I^mu phi at node n.
  double apply(const SampledIntegrand& phi, std::size_t n) const {
    if (n >= index_.size() || index_[n] == kAbsent) throw DomainError("RlWeights: node has no precomputed row");
    return detail::apply_row(rows_[index_[n]], phi);
  }

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  double mu_;
  std::vector<std::size_t> index_;
  std::vector<detail::QuadRow> rows_;
};

/// Three-point finite-difference derivative of node values on a non-uniform
/// mesh. Entries with no finite stencil are NaN.
inline std::vector<double> nodal_derivative(const GradedMesh& mesh, std::span<const double> values) {
  detail::check_sizes(mesh, values.size());
  std::vector<double> out(values.size());
  auto get = [&](std::size_t j) { return values[j]; };
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::stencil_derivative(mesh, i, get);
  return out;
}

/// RL derivative D^mu g = d/dt I^(1-mu) g at an interior node.
inline double rl_derivative_num(const WeightedGrid& g, double mu, double t) {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("rl_derivative_num: mu must lie in (0, 1)");
  const std::size_t n = detail::interior_node(g.mesh(), t);
  const double inner = 1.0 - mu;
  std::vector<std::optional<double>> cache(g.size());
  auto get = [&](std::size_t j) {
    if (!cache[j]) cache[j] = rl_integral_quad(g, inner, g.mesh()[j]);
    return *cache[j];
  };
  return detail::stencil_derivative(g.mesh(), n, get);
}

/// Hilfer derivative I^(nu(1-mu)) d/dt I^((1-nu)(1-mu)) g at every node. The
/// entry at a is NaN: the composition has no meaningful value there.
inline std::vector<double> hilfer_derivative_table(const WeightedGrid& g, const FracOrder& order) {
  const GradedMesh& mesh = g.mesh();
  const std::vector<double> inner = rl_integral_table(g, order.inner_order());
  const std::vector<double> deriv = nodal_derivative(mesh, inner);
  const double outer = order.outer_order();
  std::vector<double> out;
  if (outer == 0.0) {
    out = deriv;
  } else {
    SampledIntegrand phi{deriv, std::nullopt};
    if (!std::isfinite(deriv[0])) phi.first_cell = deriv[1];
    out = rl_integral_table(mesh, phi, outer);
  }
  out[0] = std::numeric_limits<double>::quiet_NaN();
  return out;
}

/// Hilfer derivative at an interior node.
inline double hilfer_derivative_num(const WeightedGrid& g, const FracOrder& order, double t) {
  const std::size_t n = detail::interior_node(g.mesh(), t);
  if (order.outer_order() == 0.0) {
    const double inner = order.inner_order();
    std::vector<std::optional<double>> cache(g.size());
    auto get = [&](std::size_t j) {
      if (!cache[j]) cache[j] = rl_integral_quad(g, inner, g.mesh()[j]);
      return *cache[j];
    };
    return detail::stencil_derivative(g.mesh(), n, get);
  }
  return hilfer_derivative_table(g, order)[n];
}

}  // namespace hilfer
