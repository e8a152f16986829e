#pragma once

#include <string>
#include <vector>

#include "kemweb/web.hpp"

namespace kemweb {

/// i ~ j iff D[i][j], D[j][i], or some k has D[k][i] and D[k][j]; i ~ i.
bool connected(const DependencyPattern& d, std::size_t i, std::size_t j);

/// Reflexive, symmetric relation; transitive whenever closure_applied is false.
struct ConnectionRelation {
  std::size_t n = 0;
  std::vector<char> c;
  bool closure_applied = false;

  bool operator()(std::size_t i, std::size_t j) const { return c[i * n + j] != 0; }
};

struct EquivalenceClasses {
  ConnectionRelation relation;  // after transitive closure
  std::vector<std::vector<int>> classes;  // ascending members, ordered by first member
};

EquivalenceClasses equivalence_classes(const DependencyPattern& d);

/// M: coordinates i with D[i][j] for every j != i.
std::vector<int> connecting_set(const DependencyPattern& d);
/// S: coordinates i with D[i][j] or D[j][i] for every j != i.
std::vector<int> strong_set(const DependencyPattern& d);

enum class NodeKind { Irreducible, Product, WarpedProduct, IrregularM1, Leaf };

const char* node_kind_name(NodeKind kind);

/// One node of a classification. Coordinates are indices of the root web.
///
/// Product: children partition `coords`.
/// WarpedProduct, IrregularM1: `base` plus the children's coordinates
/// partition `coords`; child b has constant block_e[b] (warped) or block
/// function block_sigma[b] of the single base coordinate (irregular).
struct ClassificationNode {
  NodeKind kind = NodeKind::Leaf;
  std::vector<int> coords;
  std::vector<int> base;
  std::vector<double> block_e;
  std::vector<Expr> block_sigma;
  std::vector<ClassificationNode> children;
  bool concircular_compatible = false;
  std::vector<std::string> diagnostics;
};

struct ClassificationTree {
  ClassificationNode root;
  ResidualReport residuals;
  DependencyPattern pattern;
  EquivalenceClasses classes;
};

/// Recursive classification of a web whose remain system holds.
/// Throws ResidualViolation or InconsistentWeb.
ClassificationTree classify(const SigmaWeb& w, const SampleOptions& options = {});

/// True iff (s_I)' / (s_J)' is constant on the box for every pair of block
/// functions; points where a derivative vanishes are skipped.
bool detect_concircular_form(const std::vector<Expr>& block_sigma, const ChartBox& box,
                             const SampleOptions& options = {});

/// Sorted list of the leaf-level coordinate blocks below a node: a Leaf or
/// Irreducible node is one block, composite nodes contribute their base (if
/// any) as one block plus the blocks of their children.
std::vector<std::vector<int>> block_partition(const ClassificationNode& node);

}  // namespace kemweb
