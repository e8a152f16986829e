#pragma once

#include <vector>

#include "kemweb/canonical.hpp"
#include "kemweb/separability.hpp"

namespace kemweb {

/// Symmetric rank-2 covariant field; symmetry is exact by storage.
class SymTensorField {
 public:
  SymTensorField() = default;
  explicit SymTensorField(std::size_t n) : n_(n), t_(n * (n + 1) / 2) {}

  std::size_t dim() const { return n_; }
  const Expr& operator()(std::size_t i, std::size_t j) const { return t_[slot(i, j)]; }
  void set(std::size_t i, std::size_t j, Expr e) { t_[slot(i, j)] = std::move(e); }

 private:
  std::size_t slot(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i + 1) / 2 + j;
  }
  std::size_t n_ = 0;
  std::vector<Expr> t_;
};

using Covector = std::vector<Expr>;

/// L = sum_a sigma_a d_a (x) dx_a + sum_I e_I sum_{i in I} d_i (x) dx_i, in the
/// coordinate layout of sckt_metric.
struct ConcircularTensor {
  std::size_t n = 0;
  std::vector<int> simple;             // M
  std::vector<Expr> eigen;             // sigma_a over global variables, per M entry
  std::vector<double> block_e;         // e_I
  std::vector<std::vector<int>> blocks;

  /// Mixed eigenvalue of coordinate i.
  Expr eigenvalue(std::size_t i) const;
};

/// Throws TrivialTensor when L would be a constant multiple of the identity.
ConcircularTensor build_ct(const SCKTData& d);

/// L_ij = lambda_i g_ii delta_ij.
SymTensorField covariant_form(const ConcircularTensor& ct, const OrthogonalMetric& m);

SymTensorField metric_tensor(const OrthogonalMetric& m);

/// nabla_k T_ij at a point, flat [k][i][j].
std::vector<double> covariant_derivative(const SymTensorField& t, const OrthogonalMetric& m,
                                         std::span<const double> p);

/// alpha_k = d_k (g^ij L_ij).
Covector alpha_from_trace(const SymTensorField& l, const OrthogonalMetric& m);

/// Residual nabla_k L_ij - (alpha_i g_jk + alpha_j g_ik) / 2 with alpha from
/// the trace identity.
ConditionReport verify_concircular(const SymTensorField& l, const OrthogonalMetric& m,
                                   const SampleOptions& options = {});

/// Same residual with a caller-supplied covector.
ConditionReport verify_concircular_against(const SymTensorField& l, const OrthogonalMetric& m,
                                           const Covector& alpha, const SampleOptions& options = {});

/// Residual (nabla_i K_jk + nabla_j K_ki + nabla_k K_ij) / 3.
ConditionReport verify_killing(const SymTensorField& k, const OrthogonalMetric& m,
                               const SampleOptions& options = {});

}  // namespace kemweb
