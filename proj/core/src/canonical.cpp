#include "kemweb/canonical.hpp"

#include <cmath>

namespace kemweb {

namespace {

// Moves an expression in local variable 0 to coordinate `index`.
Expr place(const Expr& e, int index, const std::string& name) {
  return substitute(e, {Expr::var(index, name)});
}

// Shifts every variable of a block expression by `offset`.
Expr shift(const Expr& e, int offset, const std::vector<std::string>& names) {
  std::vector<std::optional<Expr>> map;
  for (std::size_t j = 0; j < names.size(); ++j) map.emplace_back(Expr::var(offset + int(j), names[j]));
  return substitute(e, map);
}

// Flat builder for a web under construction.
struct Layout {
  std::vector<std::string> names;
  std::vector<Interval> domains;
  std::vector<int> signs;
  std::vector<Expr> phi;
  std::vector<std::vector<std::pair<std::size_t, Expr>>> sigma_rows;  // sparse (j, sigma_ij)

  std::size_t add(const std::string& name, Interval domain, int sign, Expr p) {
    names.push_back(name);
    domains.push_back(domain);
    signs.push_back(sign);
    phi.push_back(std::move(p));
    sigma_rows.emplace_back();
    return names.size() - 1;
  }

  // Appends a block web; returns its first index.
  std::size_t add_block(const SigmaWeb& w) {
    const std::size_t offset = names.size();
    for (std::size_t i = 0; i < w.dim(); ++i) {
      add(w.names()[i], w.box()[i], w.sign(i), shift(w.phi(i), int(offset), w.names()));
    }
    for (std::size_t i = 0; i < w.dim(); ++i) {
      for (std::size_t j = 0; j < w.dim(); ++j) {
        if (i != j && !w.sigma(i, j).is_zero()) {
          sigma_rows[offset + i].emplace_back(offset + j, shift(w.sigma(i, j), int(offset), w.names()));
        }
      }
    }
    return offset;
  }

  // A coordinate whose Phi_i prod_j F_ij is negative gets (-Phi_i, -e_i):
  // g_ii is unchanged and H_i^2 becomes positive.
  SigmaWeb build() const {
    const std::size_t n = names.size();
    std::vector<Expr> sigma(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& [j, s] : sigma_rows[i]) sigma[i * n + j] = s;
    }
    const ChartBox box(domains);
    const Point c = box.center();
    std::vector<int> e = signs;
    std::vector<Expr> p = phi;
    for (std::size_t i = 0; i < n; ++i) {
      double h2 = evaluate(phi[i], c);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || (sigma[i * n + j].is_zero() && sigma[j * n + i].is_zero())) continue;
        h2 *= evaluate(sigma[i * n + j], c) + evaluate(sigma[j * n + i], c);
      }
      if (h2 < 0.0) {
        e[i] = -e[i];
        p[i] = -p[i];
      }
    }
    return SigmaWeb(names, box, std::move(e), std::move(p), std::move(sigma));
  }
};

void require_eigen(const BaseCoordinate& c) {
  if (!c.eigen.mentions(0) || (c.eigen.variables() & ~std::uint64_t{1}) != 0) {
    throw InvalidArgument("eigenfunction of " + c.name + " must be a non-constant function of it");
  }
}

void require_distinct_e(const std::vector<double>& es) {
  for (std::size_t a = 0; a < es.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      if (std::abs(es[a] - es[b]) <= 1e-12 * (1.0 + std::abs(es[a]))) {
        throw DuplicateE("two constant blocks share e = " + format_number(es[a]));
      }
    }
  }
}

}  // namespace

SigmaWeb line_web(const std::string& name, Interval domain, int sign, Expr phi) {
  Layout l;
  l.add(name, domain, sign, place(phi, 0, name));
  return l.build();
}

SigmaWeb product_metric(const std::vector<SigmaWeb>& blocks) {
  if (blocks.empty()) throw InvalidArgument("product needs at least one block");
  Layout l;
  for (const SigmaWeb& b : blocks) l.add_block(b);
  return l.build();
}

SigmaWeb sckt_metric(const SCKTData& d) {
  const std::size_t m = d.simple.size();
  if (m == 0) {
    std::vector<SigmaWeb> webs;
    for (const ConstantBlock& b : d.blocks) webs.push_back(b.web);
    return product_metric(webs);
  }
  std::vector<double> es;
  for (const ConstantBlock& b : d.blocks) es.push_back(b.e);
  require_distinct_e(es);

  Layout l;
  std::vector<Expr> eig;
  for (std::size_t a = 0; a < m; ++a) {
    const BaseCoordinate& c = d.simple[a];
    require_eigen(c);
    eig.push_back(place(c.eigen, int(a), c.name));
    // (-1)^{#b<a} turns the ordered pair factors into prod_b (sigma_a - sigma_b).
    Expr p = place(c.phi, int(a), c.name);
    if (a % 2 == 1) p = -p;
    l.add(c.name, c.domain, c.sign, p);
  }
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      l.sigma_rows[a].emplace_back(b, eig[a]);
      l.sigma_rows[b].emplace_back(a, -eig[b]);
    }
  }
  for (const ConstantBlock& blk : d.blocks) {
    const std::size_t offset = l.add_block(blk.web);
    for (std::size_t k = 0; k < blk.web.dim(); ++k) {
      const std::size_t alpha = offset + k;
      for (std::size_t a = 0; a < m; ++a) {
        // F_{a alpha} = e_I - sigma_a; divided out of H_a^2 again below.
        l.sigma_rows[a].emplace_back(alpha, -eig[a]);
        l.sigma_rows[alpha].emplace_back(a, Expr(blk.e));
        l.phi[a] = l.phi[a] / (Expr(blk.e) - eig[a]);
      }
    }
  }
  return l.build();
}

SigmaWeb irreducible_metric(const std::vector<BaseCoordinate>& coords) {
  if (coords.size() < 2) throw InvalidArgument("irreducible metric needs at least two coordinates");
  return sckt_metric({coords, {}});
}

SigmaWeb warped_product_metric(const std::vector<BaseCoordinate>& base,
                               const std::vector<ConstantBlock>& blocks) {
  if (base.size() < 2) throw InvalidArgument("warped product needs at least two base coordinates");
  return sckt_metric({base, blocks});
}

SigmaWeb irregular_metric(const BaseCoordinate& base, const std::vector<IrregularBlock>& blocks) {
  Layout l;
  l.add(base.name, base.domain, base.sign, place(base.phi, 0, base.name));
  for (const IrregularBlock& blk : blocks) {
    if ((blk.sigma.variables() & ~std::uint64_t{1}) != 0 || !blk.sigma.mentions(0)) {
      throw InvalidArgument("block function must be a non-constant function of " + base.name);
    }
    const Expr s = place(blk.sigma, 0, base.name);
    const std::size_t offset = l.add_block(blk.web);
    for (std::size_t k = 0; k < blk.web.dim(); ++k) {
      l.sigma_rows[0].emplace_back(offset + k, s);
      l.phi[0] = l.phi[0] / s;
    }
  }
  return l.build();
}

}  // namespace kemweb
