#pragma once

#include <string>
#include <vector>

#include "kemweb/web.hpp"

namespace kemweb {

/// One coordinate of the simple-eigenvalue part. `eigen` (sigma_a) and `phi`
/// are univariate in local variable 0 and are moved to the coordinate's slot
/// by the constructors.
struct BaseCoordinate {
  std::string name;
  Interval domain;
  int sign = 1;
  Expr eigen;
  Expr phi = Expr(1.0);
};

/// A constant-eigenvalue block: its own web scaled by prod_a (e - sigma_a).
struct ConstantBlock {
  double e = 0.0;
  SigmaWeb web;
};

/// A block of the irregular family, scaled by `sigma` (a function of the
/// single base coordinate, in local variable 0).
struct IrregularBlock {
  Expr sigma;
  SigmaWeb web;
};

/// Data of a concircular-induced metric: simple part M plus constant blocks.
///
/// The metric is g_aa = sign_a Phi_a prod_b (sigma_a - sigma_b) on M and
/// g_aa = sign_a prod_a (e - sigma_a) g^I_aa on a block. Constructors keep
/// these values but flip (Phi_i, sign_i) where the product is negative, so
/// every output web has H_i^2 > 0.
struct SCKTData {
  std::vector<BaseCoordinate> simple;
  std::vector<ConstantBlock> blocks;
};

/// One-dimensional web Phi dx^2 (phi in local variable 0).
SigmaWeb line_web(const std::string& name, Interval domain, int sign = 1, Expr phi = Expr(1.0));

/// H_a^2 = Phi_a prod_{b != a} (sigma_a - sigma_b). Encoded with
/// sigma_ab = sigma_a, sigma_ba = -sigma_b for a < b.
SigmaWeb irreducible_metric(const std::vector<BaseCoordinate>& coords);

/// Disjoint union of blocks; no cross-block factors.
SigmaWeb product_metric(const std::vector<SigmaWeb>& blocks);

/// Base coordinates first, then the blocks in order. Requires m >= 2.
/// Throws DuplicateE when two blocks share e.
SigmaWeb warped_product_metric(const std::vector<BaseCoordinate>& base,
                               const std::vector<ConstantBlock>& blocks);

/// g = Phi_1 dx_1^2 + sum_I sigma_I g_I. `base.eigen` is ignored.
SigmaWeb irregular_metric(const BaseCoordinate& base, const std::vector<IrregularBlock>& blocks);

/// General concircular-induced form; reduces to the product (M empty),
/// irreducible (no blocks) and warped/irregular cases.
SigmaWeb sckt_metric(const SCKTData& d);

}  // namespace kemweb
