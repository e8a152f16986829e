#include "generators.hpp"

#include <algorithm>
#include <numeric>

namespace kemweb::testing {

std::vector<std::string> coordinate_names(std::size_t first, std::size_t count) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < count; ++i) names.push_back("x" + std::to_string(first + i + 1));
  return names;
}

Interval random_domain(Rng& rng) {
  const double lo = rng.uniform(0.8, 1.4);
  return {lo, lo + rng.uniform(0.4, 0.8)};
}

Expr random_positive(Rng& rng, const Expr& x, int shape) {
  if (shape < 0) shape = rng.integer(0, 4);
  const double c = rng.uniform(0.5, 2.0);
  switch (shape) {
    case 0:
      return Expr(c) * (Expr(1.0) + Expr(rng.uniform(0.1, 1.0)) * pow(x, 2.0));
    case 1: {
      const double a = rng.uniform(0.2, 0.8) * (rng.coin() ? 1.0 : -1.0);
      return Expr(c) * exp(Expr(a) * x);
    }
    case 2:
      return Expr(c) * (Expr(2.0) + sin(Expr(rng.uniform(0.5, 2.0)) * x + Expr(rng.uniform(0.0, 3.0))));
    case 3:
      return Expr(c) * cosh(Expr(rng.uniform(0.3, 1.2)) * x);
    default:
      return Expr(c);
  }
}

Expr random_band(Rng& rng, const Expr& x, double lo) {
  // u + v w cos(.) >= 0.2 - 0.2 > 0 keeps it increasing.
  const double u = rng.uniform(0.2, 0.4);
  const double v = rng.uniform(0.0, 0.1);
  const double w = rng.uniform(0.5, 1.9);
  return Expr(lo) + Expr(u) * (x - Expr(1.0)) + Expr(v) * sin(Expr(w) * x + Expr(rng.uniform(0.0, 3.0)));
}

SigmaWeb random_line(Rng& rng, const std::string& name) {
  return line_web(name, random_domain(rng), 1, random_positive(rng, Expr::var(0, name)));
}

std::vector<BaseCoordinate> random_base(Rng& rng, const std::vector<std::string>& names) {
  std::vector<int> band(names.size());
  std::iota(band.begin(), band.end(), 0);
  std::shuffle(band.begin(), band.end(), rng.engine());
  std::vector<BaseCoordinate> out;
  for (std::size_t a = 0; a < names.size(); ++a) {
    const Expr x = Expr::var(0, names[a]);
    out.push_back({names[a], random_domain(rng), rng.coin(0.8) ? 1 : -1,
                   random_band(rng, x, 3.0 * band[a] + 0.6), random_positive(rng, x)});
  }
  return out;
}

SigmaWeb random_connected_block(Rng& rng, const std::vector<std::string>& names) {
  if (names.size() == 1) return random_line(rng, names[0]);
  return irreducible_metric(random_base(rng, names));
}

namespace {

std::vector<int> range(int first, int count) {
  std::vector<int> v(static_cast<std::size_t>(count));
  std::iota(v.begin(), v.end(), first);
  return v;
}

// Distinct constants in the gaps between and around bands 0..m-1.
std::vector<double> random_block_e(Rng& rng, std::size_t m, std::size_t count) {
  std::vector<double> es;
  while (es.size() < count) {
    const double e = 3.0 * rng.integer(0, int(m)) - 0.3 + 0.1 * rng.integer(0, 4);
    if (std::find(es.begin(), es.end(), e) == es.end()) es.push_back(e);
  }
  return es;
}

}  // namespace

FamilyInstance random_irreducible(Rng& rng) {
  const int n = rng.integer(2, 4);
  const auto base = random_base(rng, coordinate_names(0, n));
  return {"irreducible", irreducible_metric(base), NodeKind::Irreducible, {range(0, n)}, false,
          SCKTData{base, {}}};
}

FamilyInstance random_product(Rng& rng) {
  const int count = rng.integer(2, 3);
  std::vector<SigmaWeb> blocks;
  std::vector<std::vector<int>> partition;
  int next = 0;
  for (int b = 0; b < count; ++b) {
    const int size = rng.integer(1, 2);
    blocks.push_back(random_connected_block(rng, coordinate_names(next, size)));
    partition.push_back(range(next, size));
    next += size;
  }
  return {"product", product_metric(blocks), NodeKind::Product, partition, false, std::nullopt};
}

FamilyInstance random_warped(Rng& rng) {
  const int m = rng.integer(2, 3);
  const auto base = random_base(rng, coordinate_names(0, m));
  const int count = rng.integer(1, 2);
  const auto es = random_block_e(rng, m, count);
  std::vector<ConstantBlock> blocks;
  std::vector<std::vector<int>> partition{range(0, m)};
  int next = m;
  for (int b = 0; b < count; ++b) {
    const int size = rng.integer(1, 2);
    blocks.push_back({es[b], random_connected_block(rng, coordinate_names(next, size))});
    partition.push_back(range(next, size));
    next += size;
  }
  SCKTData data{base, blocks};
  return {"warped", warped_product_metric(base, blocks), NodeKind::WarpedProduct, partition, false, data};
}

FamilyInstance random_irregular(Rng& rng) {
  const auto names = coordinate_names(0, 1);
  const Expr x = Expr::var(0, names[0]);
  BaseCoordinate base{names[0], random_domain(rng), 1, Expr(), random_positive(rng, x)};
  const int count = rng.integer(1, 3);
  const bool affine = count == 1 || rng.coin();
  std::vector<int> shapes{0, 1, 2, 3};
  std::shuffle(shapes.begin(), shapes.end(), rng.engine());
  std::vector<IrregularBlock> blocks;
  std::vector<std::vector<int>> partition{{0}};
  const Expr first = random_positive(rng, x, shapes[0]);
  int next = 1;
  for (int b = 0; b < count; ++b) {
    Expr s = first;
    if (b > 0) {
      s = affine ? Expr(rng.uniform(0.5, 2.0)) * first + Expr(rng.uniform(0.0, 1.0))
                 : random_positive(rng, x, shapes[std::size_t(b)]);
    }
    const int size = rng.integer(1, 2);
    blocks.push_back({s, random_connected_block(rng, coordinate_names(next, size))});
    partition.push_back(range(next, size));
    next += size;
  }
  // Two coordinates are a single irreducible block whatever the family.
  if (next == 2) return {"irregular", irregular_metric(base, blocks), NodeKind::Irreducible, {{0, 1}}, false, std::nullopt};
  return {"irregular", irregular_metric(base, blocks), NodeKind::IrregularM1, partition, affine, std::nullopt};
}

FamilyInstance random_family(const std::string& family, Rng& rng) {
  if (family == "irreducible") return random_irreducible(rng);
  if (family == "product") return random_product(rng);
  if (family == "warped") return random_warped(rng);
  return random_irregular(rng);
}

SCKTData random_sckt(Rng& rng) {
  for (;;) {
    const int m = rng.integer(0, 3);
    const int count = rng.integer(0, 2);
    if (m + count == 0 || (m == 0 && count < 2)) continue;
    SCKTData d;
    d.simple = random_base(rng, coordinate_names(0, std::size_t(m)));
    const auto es = random_block_e(rng, std::size_t(m), std::size_t(count));
    int next = m;
    for (int b = 0; b < count && next < 5; ++b) {
      const int size = std::min(rng.integer(1, 2), 5 - next);
      d.blocks.push_back({es[std::size_t(b)], random_connected_block(rng, coordinate_names(next, size))});
      next += size;
    }
    if (m == 0 && d.blocks.size() < 2) continue;
    return d;
  }
}

OrthogonalMetric random_generic_metric(Rng& rng, std::size_t n, std::size_t first_name) {
  const auto names = coordinate_names(first_name, n);
  std::vector<Interval> domains;
  std::vector<Expr> g;
  for (std::size_t i = 0; i < n; ++i) domains.push_back(random_domain(rng));
  for (std::size_t i = 0; i < n; ++i) {
    Expr s(0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const Expr xj = Expr::var(int(j), names[j]);
      s = s + Expr(rng.uniform(-0.5, 0.5)) * sin(Expr(rng.uniform(0.5, 2.0)) * xj + Expr(rng.uniform(0.0, 3.0)));
      const std::size_t k = (j + 1) % n;
      s = s + Expr(rng.uniform(-0.3, 0.3)) * xj * Expr::var(int(k), names[k]);
    }
    g.push_back(Expr(rng.coin(0.8) ? 1.0 : -1.0) * exp(s));
  }
  return OrthogonalMetric(names, ChartBox(domains), g);
}

}  // namespace kemweb::testing
