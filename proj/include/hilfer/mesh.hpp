#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hilfer/errors.hpp"

namespace hilfer {

/// Fractional order pair (mu, nu) of the Hilfer derivative and the derived
/// gamma = mu + nu - mu*nu.
struct FracOrder {
  double mu = 0.5;
  double nu = 0.0;
  double gamma = 0.5;

  /// Validates mu in (0,1), nu in [0,1]. gamma is formed as
  /// 1 - (1-mu)(1-nu), with the endpoint cases nu = 0 and nu = 1 pinned to mu
  /// and 1 exactly.
  static FracOrder make(double mu, double nu) {
    if (!(mu > 0.0 && mu < 1.0)) throw DomainError("order mu must lie in (0, 1)");
    if (!(nu >= 0.0 && nu <= 1.0)) throw DomainError("type nu must lie in [0, 1]");
    double g = 1.0 - (1.0 - mu) * (1.0 - nu);
    if (nu == 0.0) g = mu;
    if (nu == 1.0) g = 1.0;
    return FracOrder{mu, nu, g};
  }

  /// Order of the inner integral, (1-nu)(1-mu) = 1 - gamma.
  double inner_order() const { return (1.0 - nu) * (1.0 - mu); }
  /// Order of the outer integral, nu(1-mu).
  double outer_order() const { return nu * (1.0 - mu); }

  friend bool operator==(const FracOrder&, const FracOrder&) = default;
};

/// Power-graded mesh on [a, b]: a + (b-a)(j/n_base)^r for j = 0..n_base, with
/// optional extra nodes merged in.
class GradedMesh {
 public:
  /// Nodes closer than this fraction of (b - a) are merged.
  static constexpr double kMergeTolerance = 1e-14;

  GradedMesh(double a, double b, int n_base, double grading, std::span<const double> extra_nodes = {})
      : a_(a), b_(b), grading_(grading), n_base_(n_base) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
      throw DomainError("mesh: need finite a < b");
    }
    if (n_base < 2) throw DomainError("mesh: n_base must be at least 2");
    if (!(grading >= 1.0) || !std::isfinite(grading)) throw DomainError("mesh: grading must be >= 1");

    const double len = b - a;
    nodes_.reserve(static_cast<std::size_t>(n_base) + 1 + extra_nodes.size());
    for (int j = 0; j < n_base; ++j) {
      nodes_.push_back(a + len * std::pow(static_cast<double>(j) / n_base, grading));
    }
    nodes_.push_back(b);

    const double tol = kMergeTolerance * len;
    for (double x : extra_nodes) {
      if (!(x > a && x <= b + tol)) {
        throw DomainError("mesh: extra node " + std::to_string(x) + " outside (a, b]");
      }
      auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
      const bool near_next = it != nodes_.end() && *it - x <= tol;
      const bool near_prev = it != nodes_.begin() && x - *(it - 1) <= tol;
      if (near_next || near_prev) continue;
      nodes_.insert(it, x);
    }
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double grading() const { return grading_; }
  int n_base() const { return n_base_; }
  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  /// Index of the last node (b).
  std::size_t last() const { return nodes_.size() - 1; }
  double operator[](std::size_t i) const { return nodes_[i]; }

  /// Index of the node equal to t (within the merge tolerance), if any.
  std::optional<std::size_t> find_node(double t) const {
    const double tol = kMergeTolerance * (b_ - a_);
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - tol);
    if (it != nodes_.end() && std::abs(*it - t) <= tol) {
      return static_cast<std::size_t>(it - nodes_.begin());
    }
    return std::nullopt;
  }

  std::size_t node_index(double t) const {
    if (auto i = find_node(t)) return *i;
    throw DomainError("t = " + std::to_string(t) + " is not a mesh node");
  }

  friend bool operator==(const GradedMesh&, const GradedMesh&) = default;

 private:
  double a_;
  double b_;
  double grading_;
  int n_base_;
  std::vector<double> nodes_;
};

inline GradedMesh build_mesh(double a, double b, int n_base, double grading,
                             std::span<const double> extra_nodes = {}) {
  return GradedMesh(a, b, n_base, grading, extra_nodes);
}

/// A function z on a mesh stored as w(t) = (t-a)^(1-gamma) z(t).
///
/// w is interpolated piecewise linearly between nodes; z may blow up like
/// (t-a)^(gamma-1) at the left endpoint while w(a) stays finite.
class WeightedGrid {
 public:
  WeightedGrid(GradedMesh mesh, double gamma, std::vector<double> w)
      : mesh_(std::move(mesh)), gamma_(gamma), w_(std::move(w)) {
    if (!(gamma_ > 0.0 && gamma_ <= 1.0)) throw DomainError("weighted grid: gamma must lie in (0, 1]");
    if (w_.size() != mesh_.size()) throw DomainError("weighted grid: one value per node required");
  }

  /// Samples w(t) at every node.
  template <class F>
  static WeightedGrid from_weighted(GradedMesh mesh, double gamma, F&& w_of_t) {
    std::vector<double> w(mesh.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = w_of_t(mesh[i]);
    return WeightedGrid(std::move(mesh), gamma, std::move(w));
  }

  /// Samples z(t) at nodes t > a and stores (t-a)^(1-gamma) z(t); the value
  /// at a is the supplied limit of the weighted function.
  template <class F>
  static WeightedGrid from_function(GradedMesh mesh, double gamma, F&& z_of_t, double w_at_a) {
    std::vector<double> w(mesh.size());
    w[0] = w_at_a;
    for (std::size_t i = 1; i < w.size(); ++i) {
      w[i] = std::pow(mesh[i] - mesh.a(), 1.0 - gamma) * z_of_t(mesh[i]);
    }
    return WeightedGrid(std::move(mesh), gamma, std::move(w));
  }

  const GradedMesh& mesh() const { return mesh_; }
  double gamma() const { return gamma_; }
  std::span<const double> w() const { return w_; }
  double w(std::size_t i) const { return w_[i]; }
  std::size_t size() const { return w_.size(); }

  /// z at node i. At the left endpoint this is w(a) when gamma = 1, signed
  /// infinity when gamma < 1 and w(a) != 0, and 0 otherwise.
  double z(std::size_t i) const {
    if (i == 0) {
      if (gamma_ == 1.0 || w_[0] == 0.0) return gamma_ == 1.0 ? w_[0] : 0.0;
      return std::copysign(std::numeric_limits<double>::infinity(), w_[0]);
    }
    return std::pow(mesh_[i] - mesh_.a(), gamma_ - 1.0) * w_[i];
  }

  /// Piecewise-linear interpolant of w.
  double w_at(double t) const {
    const auto& x = mesh_.nodes();
    if (t <= x.front()) return w_.front();
    if (t >= x.back()) return w_.back();
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - x.begin()) - 1;
    const double theta = (t - x[j]) / (x[j + 1] - x[j]);
    return (1.0 - theta) * w_[j] + theta * w_[j + 1];
  }

  /// z(t) = (t-a)^(gamma-1) w(t) for t > a.
  double z_at(double t) const { return std::pow(t - mesh_.a(), gamma_ - 1.0) * w_at(t); }

 private:
  GradedMesh mesh_;
  double gamma_;
  std::vector<double> w_;
};

/// Discrete C_{1-gamma} norm: max over nodes of |w|.
inline double weighted_norm(const WeightedGrid& g) {
  double m = 0.0;
  for (double v : g.w()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace hilfer
