#include "kemweb/classify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace kemweb {

bool connected(const DependencyPattern& d, std::size_t i, std::size_t j) {
  if (i == j) return true;
  if (d(i, j) || d(j, i)) return true;
  for (std::size_t k = 0; k < d.dim(); ++k) {
    if (k != i && k != j && d(k, i) && d(k, j)) return true;
  }
  return false;
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

EquivalenceClasses equivalence_classes(const DependencyPattern& d) {
  const std::size_t n = d.dim();
  std::vector<char> raw(n * n, 0);
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (connected(d, i, j)) {
        raw[i * n + j] = 1;
        parent[find_root(parent, i)] = find_root(parent, j);
      }
    }
  }

  EquivalenceClasses out;
  out.relation.n = n;
  out.relation.c.assign(n * n, 0);
  std::vector<int> class_of_root(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find_root(parent, i);
    if (class_of_root[r] < 0) {
      class_of_root[r] = static_cast<int>(out.classes.size());
      out.classes.emplace_back();
    }
    out.classes[static_cast<std::size_t>(class_of_root[r])].push_back(static_cast<int>(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool same = find_root(parent, i) == find_root(parent, j);
      out.relation.c[i * n + j] = same ? 1 : 0;
      if (same && !raw[i * n + j]) out.relation.closure_applied = true;
    }
  }
  return out;
}

std::vector<int> connecting_set(const DependencyPattern& d) {
  std::vector<int> m;
  for (std::size_t i = 0; i < d.dim(); ++i) {
    bool all = true;
    for (std::size_t j = 0; j < d.dim() && all; ++j) all = j == i || d(i, j);
    if (all) m.push_back(static_cast<int>(i));
  }
  return m;
}

std::vector<int> strong_set(const DependencyPattern& d) {
  std::vector<int> s;
  for (std::size_t i = 0; i < d.dim(); ++i) {
    bool all = true;
    for (std::size_t j = 0; j < d.dim() && all; ++j) all = j == i || d(i, j) || d(j, i);
    if (all) s.push_back(static_cast<int>(i));
  }
  return s;
}

const char* node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Irreducible: return "irreducible";
    case NodeKind::Product: return "product";
    case NodeKind::WarpedProduct: return "warped_product";
    case NodeKind::IrregularM1: return "irregular_m1";
    case NodeKind::Leaf: return "leaf";
  }
  return "unknown";
}

bool detect_concircular_form(const std::vector<Expr>& block_sigma, const ChartBox& box,
                             const SampleOptions& options) {
  if (block_sigma.size() < 2) return true;
  std::uint64_t vars = 0;
  for (const Expr& s : block_sigma) vars |= s.variables();
  if (std::popcount(vars) > 1) throw InvalidArgument("block functions must share a single variable");
  if (vars == 0) throw InvalidArgument("block functions must be non-constant");
  const int x = std::countr_zero(vars);

  std::vector<Expr> slopes;
  for (const Expr& s : block_sigma) slopes.push_back(differentiate(s, x));
  for (std::size_t a = 0; a < slopes.size(); ++a) {
    for (std::size_t b = a + 1; b < slopes.size(); ++b) {
      const Expr ratio = slopes[a] / slopes[b];
      const Expr dratio = differentiate(ratio, x);
      double max_ratio = 0.0;
      double max_slope = 0.0;
      for_each_regular_point(box, options.samples, options.seed, [&](std::span<const double> p) {
        const double r = evaluate(ratio, p);
        const double s = evaluate(dratio, p);
        max_ratio = std::max(max_ratio, std::abs(r));
        max_slope = std::max(max_slope, std::abs(s));
      });
      if (max_slope > options.tol * (1.0 + max_ratio)) return false;
    }
  }
  return true;
}

namespace {

class Classifier {
 public:
  Classifier(const SampleOptions& options, const ResidualReport& residuals)
      : options_(options), residuals_(residuals) {
    constancy_.samples = options.samples;
    constancy_.seed = options.seed;
  }

  // `root` maps local coordinate indices of `w` to root indices.
  ClassificationNode run(const SigmaWeb& w, const std::vector<int>& root) {
    const std::size_t n = w.dim();
    ClassificationNode node;
    node.coords = root;
    if (n == 1) {
      node.kind = NodeKind::Leaf;
      return node;
    }
    const DependencyPattern d = dependency_pattern(w, constancy_);
    if (n == 2) {
      if (d(0, 1) || d(1, 0)) {
        node.kind = NodeKind::Irreducible;
      } else {
        node.kind = NodeKind::Product;
        node.children.push_back(leaf(root[0]));
        node.children.push_back(leaf(root[1]));
      }
      return node;
    }

    const EquivalenceClasses ec = equivalence_classes(d);
    if (ec.relation.closure_applied) {
      node.diagnostics.push_back("connection relation needed transitive closure");
    }
    if (ec.classes.size() > 1) {
      node.kind = NodeKind::Product;
      for (const auto& cls : ec.classes) node.children.push_back(block(w, root, cls));
      return node;
    }

    const std::vector<int> m = connecting_set(d);
    if (m.empty()) {
      throw InconsistentWeb("connected web without a connecting coordinate");
    }
    if (m.size() == n) {
      node.kind = NodeKind::Irreducible;
      return node;
    }
    std::vector<int> rest;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(m.begin(), m.end(), static_cast<int>(i)) == m.end()) rest.push_back(static_cast<int>(i));
    }
    for (int a : m) node.base.push_back(root[static_cast<std::size_t>(a)]);
    const Point center = w.box().center();
    if (m.size() >= 2) {
      warped(w, root, d, m, rest, center, node);
    } else {
      irregular(w, root, d, m.front(), rest, center, node);
    }
    return node;
  }

 private:
  static ClassificationNode leaf(int coord) {
    ClassificationNode node;
    node.kind = NodeKind::Leaf;
    node.coords = {coord};
    return node;
  }

  ClassificationNode block(const SigmaWeb& w, const std::vector<int>& root, const std::vector<int>& cls) {
    if (cls.size() == 1) return leaf(root[static_cast<std::size_t>(cls.front())]);
    std::vector<int> child_root;
    for (int c : cls) child_root.push_back(root[static_cast<std::size_t>(c)]);
    // Pullback with the other coordinates frozen at the box center.
    return run(restrict_web(w, cls, w.box().center()), child_root);
  }

  void warped(const SigmaWeb& w, const std::vector<int>& root, const DependencyPattern& d,
              const std::vector<int>& m, const std::vector<int>& rest, const Point& center,
              ClassificationNode& node) {
    node.kind = NodeKind::WarpedProduct;
    std::vector<std::vector<int>> blocks;
    for (int alpha : rest) {
      const auto al = static_cast<std::size_t>(alpha);
      double e = 0.0;
      bool first = true;
      for (int a : m) {
        const auto aa = static_cast<std::size_t>(a);
        if (d(al, aa)) {
          throw ResidualViolation("sigma_" + w.names()[al] + w.names()[aa] +
                                      " is not constant for a non-connecting coordinate",
                                  residuals_);
        }
        const double value = evaluate(w.sigma(al, aa), center);
        if (first) {
          e = value;
          first = false;
        } else if (std::abs(value - e) > options_.tol * (1.0 + std::abs(e))) {
          throw ResidualViolation("constant e of " + w.names()[al] +
                                      " differs across connecting coordinates",
                                  residuals_);
        }
      }
      std::size_t b = 0;
      while (b < blocks.size() &&
             std::abs(node.block_e[b] - e) > options_.tol * (1.0 + std::abs(node.block_e[b]))) {
        ++b;
      }
      if (b == blocks.size()) {
        blocks.emplace_back();
        node.block_e.push_back(e);
      }
      blocks[b].push_back(alpha);
    }
    for (const auto& blk : blocks) node.children.push_back(block(w, root, blk));
    node.concircular_compatible = true;
  }

  void irregular(const SigmaWeb& w, const std::vector<int>& root, const DependencyPattern& d, int base,
                 const std::vector<int>& rest, const Point& center, ClassificationNode& node) {
    node.kind = NodeKind::IrregularM1;
    const auto b0 = static_cast<std::size_t>(base);
    DependencyPattern sub(rest.size());
    for (std::size_t a = 0; a < rest.size(); ++a) {
      for (std::size_t b = 0; b < rest.size(); ++b) {
        sub.set(a, b, d(static_cast<std::size_t>(rest[a]), static_cast<std::size_t>(rest[b])));
      }
    }
    const EquivalenceClasses comps = equivalence_classes(sub);
    std::vector<Expr> local_sigma;
    for (const auto& comp : comps.classes) {
      std::vector<int> blk;
      for (int c : comp) blk.push_back(rest[static_cast<std::size_t>(c)]);
      const auto alpha = static_cast<std::size_t>(blk.front());
      if (d(alpha, b0)) {
        node.diagnostics.push_back("sigma_" + w.names()[alpha] + w.names()[b0] +
                                   " is not constant; block function frozen at the box center");
      }
      std::vector<std::optional<Expr>> freeze(w.dim());
      freeze[alpha] = Expr(center[alpha]);
      const Expr s = substitute(w.pair_factor(b0, alpha), freeze);
      local_sigma.push_back(s);
      std::vector<int> mapping(root.begin(), root.end());
      node.block_sigma.push_back(reindex(s, mapping));
      node.children.push_back(block(w, root, blk));
    }
    node.concircular_compatible = detect_concircular_form(local_sigma, w.box(), options_);
    if (local_sigma.size() > 1) {
      node.diagnostics.push_back(
          "concircular compatibility decided by affine dependence of the block functions");
    }
  }

  SampleOptions options_;
  ConstancyTest constancy_;
  const ResidualReport& residuals_;
};

}  // namespace

ClassificationTree classify(const SigmaWeb& w, const SampleOptions& options) {
  ClassificationTree tree;
  tree.residuals = residuals_remain(w, options);
  if (!tree.residuals.pass) {
    throw ResidualViolation("web violates the remain equations", tree.residuals);
  }
  ConstancyTest constancy;
  constancy.samples = options.samples;
  constancy.seed = options.seed;
  tree.pattern = dependency_pattern(w, constancy);
  tree.classes = equivalence_classes(tree.pattern);
  std::vector<int> root(w.dim());
  std::iota(root.begin(), root.end(), 0);
  Classifier c(options, tree.residuals);
  tree.root = c.run(w, root);
  return tree;
}

std::vector<std::vector<int>> block_partition(const ClassificationNode& node) {
  std::vector<std::vector<int>> out;
  switch (node.kind) {
    case NodeKind::Leaf:
    case NodeKind::Irreducible: out.push_back(node.coords); break;
    case NodeKind::WarpedProduct:
    case NodeKind::IrregularM1: out.push_back(node.base); [[fallthrough]];
    case NodeKind::Product:
      for (const auto& child : node.children) {
        for (auto& b : block_partition(child)) out.push_back(std::move(b));
      }
      break;
  }
  for (auto& b : out) std::sort(b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace kemweb
