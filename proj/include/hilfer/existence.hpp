#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hilfer/errors.hpp"
#include "hilfer/expr.hpp"
#include "hilfer/quadrature.hpp"
#include "hilfer/solver.hpp"
#include "hilfer/specfun.hpp"

namespace hilfer {

enum class Verdict { satisfied, violated, inadmissible };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    case Verdict::inadmissible: return "inadmissible";
  }
  return "inadmissible";
}

struct HoelderConstants {
  double lambda = 0.0;
  double delta = 0.0;
};

/// Lambda = Gamma(q(mu-1)+1) Gamma(q(gamma-1)+1) / Gamma(q(mu+gamma-2)+2),
/// Delta  = Gamma(q(mu-gamma)+1) Gamma(q(gamma-1)+1) / Gamma(q(mu-1)+2).
/// Throws InadmissibleExponentError naming the first non-positive argument.
inline HoelderConstants hoelder_constants(double q, double mu, double gamma_) {
  const std::array<std::pair<const char*, double>, 5> args = {{
      {"q(mu-1)+1 > 0", q * (mu - 1.0) + 1.0},
      {"q(gamma-1)+1 > 0", q * (gamma_ - 1.0) + 1.0},
      {"q(mu+gamma-2)+2 > 0", q * (mu + gamma_ - 2.0) + 2.0},
      {"q(mu-gamma)+1 > 0", q * (mu - gamma_) + 1.0},
      {"q(mu-1)+2 > 0", q * (mu - 1.0) + 2.0},
  }};
  for (const auto& [name, value] : args) {
    if (!(value > 0.0)) {
      throw InadmissibleExponentError("exponent condition " + std::string(name) + " fails (value " +
                                      format_double(value) + ")");
    }
  }
  HoelderConstants hc;
  hc.lambda = gamma(args[0].second) * (gamma(args[1].second) / gamma(args[2].second));
  hc.delta = gamma(args[3].second) * (gamma(args[1].second) / gamma(args[4].second));
  return hc;
}

/// (int_a^b |rho(s)|^p ds)^(1/p) by adaptive Gauss-Legendre panels, halved
/// until the two-half estimate agrees to relative 1e-10. rho is evaluated at
/// interior points only, so an integrable endpoint singularity is tolerated.
inline double rho_lp_norm(const Expr& rho, double p, double a, double b) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("rho_lp_norm: p must be positive and finite");
  if (!(a < b)) throw DomainError("rho_lp_norm: need a < b");
  const GaussRule& rule = gauss_rule20();
  auto panel = [&](double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double s = 0.0;
    for (std::size_t k = 0; k < rule.x.size(); ++k) {
      s += rule.w[k] * std::pow(std::abs(eval(rho, mid + half * rule.x[k], 0.0)), p);
    }
    return s * half;
  };

  constexpr int kInitialPanels = 16;
  constexpr double kRelTol = 1e-10;
  const double width = (b - a) / kInitialPanels;
  std::vector<double> coarse(kInitialPanels);
  double estimate = 0.0;
  for (int i = 0; i < kInitialPanels; ++i) {
    coarse[static_cast<std::size_t>(i)] = panel(a + i * width, a + (i + 1) * width);
    estimate += coarse[static_cast<std::size_t>(i)];
  }
  if (estimate == 0.0) return 0.0;

  auto refine = [&](auto&& self, double lo, double hi, double whole, int depth) -> double {
    const double mid = 0.5 * (lo + hi);
    const double left = panel(lo, mid);
    const double right = panel(mid, hi);
    const double tol = kRelTol * std::abs(estimate) * (hi - lo) / (b - a);
    if (depth >= 50 || std::abs(left + right - whole) <= tol) return left + right;
    return self(self, lo, mid, left, depth + 1) + self(self, mid, hi, right, depth + 1);
  };
  double total = 0.0;
  for (int i = 0; i < kInitialPanels; ++i) {
    total += refine(refine, a + i * width, a + (i + 1) * width, coarse[static_cast<std::size_t>(i)], 0);
  }
  return std::pow(total, 1.0 / p);
}

/// Evaluated existence certificate for one Lebesgue exponent p.
struct ExistenceReport {
  double p = 0.0;
  double q = 0.0;
  std::optional<double> lambda_const;
  std::optional<double> delta_const;
  double rho_norm = 0.0;
  std::optional<double> G;
  std::optional<double> L_star;
  /// L* with Gamma(mu-gamma) in place of Gamma(1-gamma+mu); empty at a pole.
  std::optional<double> L_star_literal;
  std::optional<std::array<double, 3>> terms_G;
  std::optional<std::array<double, 3>> terms_L;
  bool admissible = false;
  std::vector<std::string> violations;
  Verdict verdict = Verdict::inadmissible;
};

/// Conjugate exponent p/(p-1); infinite at p = 1.
inline double conjugate_exponent(double p) {
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return p / (p - 1.0);
}

/// Evaluates the existence hypotheses for exponent p (spec.p is ignored).
inline ExistenceReport certificate(const ProblemSpec& spec, const DerivedParams& params, double p) {
  ExistenceReport r;
  r.p = p;
  r.q = conjugate_exponent(p);
  const double mu = spec.order.mu;
  const double g = params.gamma;

  if (!(p > 1.0)) r.violations.emplace_back("p > 1");
  if (!(p > 1.0 / mu)) r.violations.emplace_back("p > 1/mu");
  if (!(p > 1.0 / g)) r.violations.emplace_back("p > 1/gamma");
  const double q = r.q;
  if (std::isfinite(q)) {
    if (!(q * (mu - 1.0) + 1.0 > 0.0)) r.violations.emplace_back("q(mu-1)+1 > 0");
    if (!(q * (g - 1.0) + 1.0 > 0.0)) r.violations.emplace_back("q(gamma-1)+1 > 0");
    if (!(q * (mu - g) + 1.0 > 0.0)) r.violations.emplace_back("q(mu-gamma)+1 > 0");
  }

  r.rho_norm = rho_lp_norm(spec.rho, p, spec.a, spec.b);

  std::optional<HoelderConstants> hc;
  if (std::isfinite(q)) {
    try {
      hc = hoelder_constants(q, mu, g);
    } catch (const InadmissibleExponentError& e) {
      r.violations.emplace_back(e.what());
    } catch (const PoleError& e) {
      r.violations.emplace_back(e.what());
    }
  }

  if (hc) {
    r.lambda_const = hc->lambda;
    r.delta_const = hc->delta;
    const double len = spec.b - spec.a;
    const double inv_gg = 1.0 / gamma(g);
    const double abs_denom = std::abs(params.denom);
    const double lam_root = std::pow(hc->lambda, 1.0 / q);
    const double del_root = std::pow(hc->delta, 1.0 / q);
    const double len_mu = std::pow(len, mu);
    const double d_ratio = std::abs(spec.d / params.denom);
    const double m = static_cast<double>(spec.nonlocal.size());

    double sum_g = 0.0;
    double sum_l = 0.0;
    for (const auto& term : spec.nonlocal) {
      sum_g += std::abs(term.lambda) / gamma(mu) * std::pow(term.tau - spec.a, g + mu - 1.0);
      sum_l += std::abs(term.lambda) * std::pow(term.tau - spec.a, mu) / gamma(mu + 1.0);
    }
    const double rn = r.rho_norm;
    std::array<double, 3> tg = {
        inv_gg * (lam_root / abs_denom) * sum_g * rn,
        inv_gg * d_ratio * del_root / gamma(1.0 - g + mu) * len_mu * rn,
        lam_root / gamma(mu) * len_mu * rn,
    };
    std::array<double, 3> tl = {
        m * inv_gg * (std::pow(len, g - 1.0) / abs_denom) * sum_l * rn,
        inv_gg * d_ratio / gamma(1.0 - g + mu) * len_mu * rn,
        len_mu / gamma(mu + 1.0) * rn,
    };
    r.terms_G = tg;
    r.terms_L = tl;
    r.G = tg[0] + tg[1] + tg[2];
    r.L_star = tl[0] + tl[1] + tl[2];
    try {
      r.L_star_literal = tl[0] + inv_gg * d_ratio / gamma(mu - g) * len_mu * rn + tl[2];
    } catch (const PoleError&) {
      r.L_star_literal.reset();
    }
  }

  r.admissible = r.violations.empty() && hc.has_value();
  if (!r.admissible) {
    r.verdict = Verdict::inadmissible;
  } else {
    r.verdict = (*r.G < 1.0 && *r.L_star < 1.0) ? Verdict::satisfied : Verdict::violated;
  }
  return r;
}

inline ExistenceReport certificate(const ProblemSpec& spec, const DerivedParams& params) {
  return certificate(spec, params, spec.p);
}

/// Exponents tried by the admissible-p sweep.
inline constexpr std::array<double, 4> kSweepExponents = {4.0, 8.0, 16.0, 64.0};

struct SweepResult {
  std::vector<ExistenceReport> candidates;
  /// Index of the admissible candidate with the smallest max(G, L*).
  std::optional<std::size_t> best;
};

inline SweepResult sweep(const ProblemSpec& spec, const DerivedParams& params,
                         std::span<const double> exponents = kSweepExponents) {
  SweepResult out;
  double best_score = std::numeric_limits<double>::infinity();
  for (double p : exponents) {
    out.candidates.push_back(certificate(spec, params, p));
    const ExistenceReport& r = out.candidates.back();
    if (!r.admissible) continue;
    const double score = std::max(*r.G, *r.L_star);
    if (score < best_score) {
      best_score = score;
      out.best = out.candidates.size() - 1;
    }
  }
  return out;
}

}  // namespace hilfer
