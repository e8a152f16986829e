#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kemweb/errors.hpp"
#include "kemweb/metric.hpp"
#include "kemweb/sampling.hpp"

namespace kemweb {

/// Scale factors in sigma form: H_i^2 = Phi_i(x_i) prod_{j != i} F_ij with
/// pair factors F_ij = F_ji = sigma_ij(x_i) + sigma_ji(x_j).
///
/// sigma_ij is univariate in x_i and may be the zero constant. A pair whose two
/// sigmas are both the zero constant contributes F_ij = 1 (the factor is
/// absent), so the all-zero web is Cartesian space. Construction checks, on
/// sampled points, that every Phi_i and F_ij is non-vanishing and sign-constant
/// and that every H_i^2 is positive.
class SigmaWeb {
 public:
  /// `sigma` is row-major n x n; diagonal entries are ignored.
  SigmaWeb(std::vector<std::string> names, ChartBox box, std::vector<int> signs,
           std::vector<Expr> phi, std::vector<Expr> sigma, const SampleOptions& check = {});

  std::size_t dim() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const ChartBox& box() const { return box_; }
  int sign(std::size_t i) const { return signs_[i]; }
  const std::vector<int>& signs() const { return signs_; }
  const Expr& phi(std::size_t i) const { return phi_[i]; }
  const Expr& sigma(std::size_t i, std::size_t j) const { return sigma_[i * dim() + j]; }

  /// True unless both sigma_ij and sigma_ji are the zero constant.
  bool has_pair_factor(std::size_t i, std::size_t j) const;
  /// F_ij, or the constant 1 when the pair has no factor.
  Expr pair_factor(std::size_t i, std::size_t j) const;

  /// H_i^2 as an expression.
  Expr scale_squared(std::size_t i) const;
  int index_of(const std::string& name) const;

 private:
  std::vector<std::string> names_;
  ChartBox box_;
  std::vector<int> signs_;
  std::vector<Expr> phi_;
  std::vector<Expr> sigma_;
};

/// g_ii = e_i Phi_i prod_j F_ij.
OrthogonalMetric to_metric(const SigmaWeb& w, const SampleOptions& check = {});

/// Web on the listed coordinates (new index k is old coords[k]). Factors that
/// involve dropped coordinates are frozen at `frozen` (a full point of the
/// parent box) and absorbed into Phi.
SigmaWeb restrict_web(const SigmaWeb& w, std::span<const int> coords, std::span<const double> frozen);

/// Relabels coordinates: new index k is old perm[k].
SigmaWeb permute_web(const SigmaWeb& w, std::span<const int> perm);

/// D[i][j] = true iff sigma_ij is non-constant on the box.
class DependencyPattern {
 public:
  DependencyPattern() = default;
  explicit DependencyPattern(std::size_t n) : n_(n), d_(n * n, 0) {}

  std::size_t dim() const { return n_; }
  bool operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v) {
    if (i != j) d_[i * n_ + j] = v ? 1 : 0;
  }

  bool operator==(const DependencyPattern&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<char> d_;
};

DependencyPattern dependency_pattern(const SigmaWeb& w, const ConstancyTest& test = {});

/// Residuals of the three cyclic remain equations and the determinant
/// condition for one unordered triple i < j < k.
struct TripleResidual {
  int i = 0, j = 0, k = 0;
  double a = 0.0, b = 0.0, c = 0.0, det = 0.0;  // max normalized residuals
  double a_raw = 0.0, b_raw = 0.0, c_raw = 0.0, det_raw = 0.0;
  bool pass = true;
};

struct ResidualReport {
  std::vector<TripleResidual> triples;
  double max_normalized = 0.0;
  double max_abs = 0.0;
  bool pass = true;
  int samples = 0;
  double tol = 0.0;
};

/// Evaluates the remain system on every unordered triple (vacuous for n < 3).
ResidualReport residuals_remain(const SigmaWeb& w, const SampleOptions& options = {});

/// True iff each g_ii of `m` equals the web's g_ii times a positive constant.
bool validate_form(const OrthogonalMetric& m, const SigmaWeb& w, const SampleOptions& options = {});

/// The web does not satisfy the remain system.
class ResidualViolation : public Error {
 public:
  ResidualViolation(const std::string& what, ResidualReport report)
      : Error(what), report_(std::move(report)) {}
  const ResidualReport& report() const { return report_; }

 private:
  ResidualReport report_;
};

}  // namespace kemweb
