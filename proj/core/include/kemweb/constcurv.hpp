#pragma once

#include <optional>
#include <vector>

#include "kemweb/metric.hpp"
#include "kemweb/separability.hpp"

namespace kemweb {

/// g = g_base + sum_i rho_i^2 g_i. Each piece metric uses its own local
/// variables; rho_i is an expression over the base variables only.
struct Fiber {
  OrthogonalMetric metric;
  Expr rho;
};

class WarpedProductStructure {
 public:
  WarpedProductStructure(OrthogonalMetric base, std::vector<Fiber> fibers);

  const OrthogonalMetric& base() const { return base_; }
  const std::vector<Fiber>& fibers() const { return fibers_; }
  std::size_t base_dim() const { return base_.dim(); }
  /// First assembled index of fiber i.
  std::size_t offset(std::size_t i) const { return offsets_[i]; }

  /// The assembled metric on base coordinates followed by each fiber's.
  const OrthogonalMetric& assembled() const { return assembled_; }

 private:
  OrthogonalMetric base_;
  std::vector<Fiber> fibers_;
  std::vector<std::size_t> offsets_;
  OrthogonalMetric assembled_;
};

/// S^f_ij = d_i d_j f - Gamma^k_ij d_k f at a point, row-major n x n.
std::vector<double> hessian(const Expr& f, const OrthogonalMetric& m, std::span<const double> p);

/// -grad log rho_i in the assembled metric (contravariant components).
std::vector<double> mean_curvature_normal(const WarpedProductStructure& w, std::size_t fiber,
                                          std::span<const double> p);

/// Compares direct sectional curvatures of coordinate planes with the
/// warped-product formulas: base planes, mixed base/fiber planes, planes across
/// two fibers and planes within one fiber.
ConditionReport check_warped_curvature_formulas(const WarpedProductStructure& w,
                                                const SampleOptions& options = {});

/// Hessian condition S^rho + kappa rho g = 0 on the base, <grad log rho_i,
/// grad log rho_k> = -kappa across fibers, and base-constancy of the fiber
/// curvature kappa rho^2 + |grad rho|^2.
ConditionReport check_constant_curvature_conditions(const WarpedProductStructure& w, double kappa,
                                                    const SampleOptions& options = {});

/// One-dimensional base with metric eps dx^2 (eps = +-1): residuals of
/// rho_i'' + omega rho_i, (log rho_i)'(log rho_k)' + omega and
/// (sigma_i'/sigma_k')' with sigma = rho^2. omega is fitted by least squares
/// when absent; the fitted value is recorded in the notes.
ConditionReport kem_base1_check(const WarpedProductStructure& w, std::optional<double> omega = {},
                                const SampleOptions& options = {});

}  // namespace kemweb
