#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kemweb/expr.hpp"
#include "kemweb/sampling.hpp"

namespace kemweb {

/// Diagonal pseudo-Riemannian metric g = diag(g_11, ..., g_nn) on a chart box.
///
/// The signs e_i are read off g_ii at the box center and H_i^2 = e_i g_ii.
/// Construction samples the box and rejects components that vanish or change
/// sign there. Christoffel symbols, their exact partial derivatives and the
/// first/second partials of log H_i^2 are built once as expressions and
/// compiled; instances are immutable and cheap to copy.
class OrthogonalMetric {
 public:
  OrthogonalMetric(std::vector<std::string> names, ChartBox box, std::vector<Expr> components,
                   const SampleOptions& check = {});

  std::size_t dim() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  CoordId coord(int i) const { return {i, names_.at(static_cast<std::size_t>(i))}; }
  Expr var(int i) const { return Expr::var(coord(i)); }
  const ChartBox& box() const { return box_; }

  const std::vector<Expr>& components() const { return g_; }
  const Expr& component(int i) const { return g_.at(static_cast<std::size_t>(i)); }
  int sign(int i) const { return signs_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& signs() const { return signs_; }

  /// H_i^2 = e_i g_ii, positive on the box.
  Expr scale_squared(int i) const;

  /// Symbolic Christoffel symbol of the second kind, Gamma^i_jk.
  const Expr& christoffel_expr(int i, int j, int k) const;

  /// Index of the first coordinate whose name matches, or -1.
  int index_of(const std::string& name) const;

  struct Compiled;
  const Compiled& compiled() const { return *compiled_; }

 private:
  std::vector<std::string> names_;
  ChartBox box_;
  std::vector<Expr> g_;
  std::vector<int> signs_;
  std::shared_ptr<const Compiled> compiled_;
};

/// Gamma^i_jk at one point, symmetric in (j, k).
class ChristoffelTable {
 public:
  ChristoffelTable() = default;
  ChristoffelTable(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {}

  std::size_t dim() const { return n_; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[(i * n_ + j) * n_ + k];
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Fully covariant curvature tensor and metric diagonal at one point.
///
/// R_abcd = <R(d_c, d_d) d_b, d_a> with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y],
/// so a unit sphere has R_1212 = g_11 g_22 > 0.
class RiemannTensor {
 public:
  RiemannTensor() = default;
  RiemannTensor(std::size_t n, std::vector<double> metric, std::vector<double> values)
      : n_(n), g_(std::move(metric)), values_(std::move(values)) {}

  std::size_t dim() const { return n_; }
  double operator()(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
    return values_[((a * n_ + b) * n_ + c) * n_ + d];
  }
  /// Diagonal metric component g_aa at the point.
  double g(std::size_t a) const { return g_[a]; }
  double max_abs() const;

  /// <X, Y> at the point.
  double inner(std::span<const double> x, std::span<const double> y) const;

  /// K(X, Y) = <R(X,Y)Y, X> / |X ^ Y|^2. Throws DegeneratePlane when the
  /// plane's Gram determinant is below `tol` relative to |X|^2 |Y|^2.
  double sectional(std::span<const double> x, std::span<const double> y, double tol = 1e-12) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> g_;
  std::vector<double> values_;
};

/// First and second partials of log H_i^2 at one point.
struct LogDerivatives {
  std::size_t n = 0;
  std::vector<double> h2;      // H_i^2
  std::vector<double> first;   // [i][j]   d_j log H_i^2
  std::vector<double> second;  // [i][j][k] d_j d_k log H_i^2

  double d(std::size_t i, std::size_t j) const { return first[i * n + j]; }
  double dd(std::size_t i, std::size_t j, std::size_t k) const { return second[(i * n + j) * n + k]; }
};

ChristoffelTable christoffel(const OrthogonalMetric& m, std::span<const double> p);
RiemannTensor riemann_tensor(const OrthogonalMetric& m, std::span<const double> p);
LogDerivatives log_derivatives(const OrthogonalMetric& m, std::span<const double> p);

/// Metric diagonal g_ii at a point.
std::vector<double> metric_values(const OrthogonalMetric& m, std::span<const double> p);

/// R_ijkl assembled from exact derivatives of the Christoffel expressions.
double riemann(const OrthogonalMetric& m, std::span<const double> p, int i, int j, int k, int l);

/// Closed form of R_jiik (i, j, k distinct) in terms of log H_i^2 derivatives.
double rjiik_closed_form(const OrthogonalMetric& m, std::span<const double> p, int i, int j, int k);

double sectional_curvature(const OrthogonalMetric& m, std::span<const double> p,
                           std::span<const double> x, std::span<const double> y,
                           double tol = 1e-12);

/// Returns kappa when R_ijkl = kappa (g_ik g_jl - g_il g_jk) holds within `tol`
/// (normalized by the square of the largest |g_ii|) at every regular point.
/// kappa is fitted from the first non-vanishing sectional component.
std::optional<double> constant_curvature_estimate(const OrthogonalMetric& m,
                                                  std::span<const Point> points, double tol = 1e-10);

/// Same, on regular sample points of the metric's box.
std::optional<double> constant_curvature_estimate(const OrthogonalMetric& m,
                                                  const SampleOptions& options);

}  // namespace kemweb
