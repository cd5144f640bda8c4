#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "hilfer/specfun.hpp"

namespace hilfer {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre nodes and weights by Newton iteration on P_n.
inline GaussRule make_gauss_rule(int n) {
  GaussRule r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double wt = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[static_cast<std::size_t>(i)] = -x;
    r.x[static_cast<std::size_t>(n - 1 - i)] = x;
    r.w[static_cast<std::size_t>(i)] = wt;
    r.w[static_cast<std::size_t>(n - 1 - i)] = wt;
  }
  return r;
}

inline const GaussRule& gauss_rule10() {
  static const GaussRule rule = make_gauss_rule(10);
  return rule;
}

inline const GaussRule& gauss_rule20() {
  static const GaussRule rule = make_gauss_rule(20);
  return rule;
}

namespace detail {

/// Weights of a linear interpolant on one cell [s0, s1]: the integral equals
/// left * phi(s0) + right * phi(s1).
struct CellWeights {
  double left = 0.0;
  double right = 0.0;
};

// (1+x)^beta - 1 - beta*x for x >= -1, without cancellation for small |x|.
inline double second_order_remainder(double beta, double x) {
  if (std::abs(x) < 0.125) {
    double coeff = 0.5 * beta * (beta - 1.0);
    double xk = x * x;
    double sum = coeff * xk;
    for (int k = 3; k < 200; ++k) {
      coeff *= (beta - k + 1.0) / k;
      xk *= x;
      const double term = coeff * xk;
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::expm1(beta * std::log1p(x)) - beta * x;
}

// int_{s0}^{s1} (t-s)^(alpha-1) {(s1-s)/h, (s-s0)/h} ds for s1 <= t.
// With u = t - s the moments are closed form; the remainder form keeps
// them accurate when the cell is short compared to its distance from t.
inline CellWeights kernel_cell(double t, double s0, double s1, double alpha) {
  const double h = s1 - s0;
  const double c = t - s1;
  const double d = t - s0;
  const double beta = alpha + 1.0;
  const double scale = 1.0 / (alpha * beta * h);
  CellWeights cw;
  cw.left = std::pow(d, beta) * second_order_remainder(beta, -h / d) * scale;
  cw.right = c > 0.0 ? std::pow(c, beta) * second_order_remainder(beta, h / c) * scale
                     : std::pow(h, beta) * scale;
  return cw;
}

// int_{s0}^{s1} (t-s)^(alpha-1) ds.
inline double kernel_moment0(double t, double s0, double s1, double alpha) {
  const double c = t - s1;
  const double d = t - s0;
  if (c <= 0.0) return std::pow(d, alpha) / alpha;
  return -std::pow(d, alpha) * std::expm1(alpha * std::log1p(-(s1 - s0) / d)) / alpha;
}

// Adaptive Gauss-Legendre over [lo, hi]; pieces are bisected until each is
// no longer than its distance to the singular points a and t.
template <class F>
void graded_gauss(double lo, double hi, double a, double t, F& accumulate, int depth = 0) {
  const double len = hi - lo;
  if (depth < 60 && (lo - a < len || t - hi < len)) {
    const double mid = 0.5 * (lo + hi);
    graded_gauss(lo, mid, a, t, accumulate, depth + 1);
    graded_gauss(mid, hi, a, t, accumulate, depth + 1);
    return;
  }
  const GaussRule& rule = gauss_rule10();
  const double half = 0.5 * len;
  const double centre = 0.5 * (lo + hi);
  for (std::size_t k = 0; k < rule.x.size(); ++k) {
    accumulate(centre + half * rule.x[k], half * rule.w[k]);
  }
}

// int_{s0}^{s1} (t-s)^(alpha-1) (s-a)^(gamma-1) {(s1-s)/h, (s-s0)/h} ds.
// The cells touching a or t reduce to (incomplete) Beta integrals; interior
// cells use graded Gauss-Legendre on the smooth-but-steep integrand.
inline CellWeights weighted_cell(double a, double t, double s0, double s1, double alpha, double gamma) {
  const double h = s1 - s0;
  const double span = t - a;
  const double e = alpha + gamma - 1.0;
  CellWeights cw;
  if (s0 <= a && s1 >= t) {
    const double scale = std::pow(h, e);
    cw.left = scale * beta(gamma, alpha + 1.0);
    cw.right = scale * beta(gamma + 1.0, alpha);
    return cw;
  }
  if (s0 <= a) {
    const double x1 = h / span;
    const double i0 = incomplete_beta(x1, gamma, alpha);
    const double i1 = incomplete_beta(x1, gamma + 1.0, alpha);
    const double scale = std::pow(span, e);
    cw.right = scale * i1 / x1;
    cw.left = scale * (i0 - i1 / x1);
    return cw;
  }
  if (s1 >= t) {
    const double y1 = h / span;
    const double j0 = incomplete_beta(y1, alpha, gamma);
    const double j1 = incomplete_beta(y1, alpha + 1.0, gamma);
    const double scale = std::pow(span, e);
    cw.left = scale * j1 / y1;
    cw.right = scale * (j0 - j1 / y1);
    return cw;
  }
  auto accumulate = [&](double s, double wt) {
    const double k = wt * std::pow(t - s, alpha - 1.0) * std::pow(s - a, gamma - 1.0);
    cw.left += k * (s1 - s) / h;
    cw.right += k * (s - s0) / h;
  };
  graded_gauss(s0, s1, a, t, accumulate);
  return cw;
}

}  // namespace detail
}  // namespace hilfer
