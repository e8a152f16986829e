#include "kemweb/web.hpp"

#include <algorithm>
#include <cmath>

#include "kemweb/tape.hpp"

namespace kemweb {

namespace {

bool univariate_in(const Expr& e, std::size_t i) { return (e.variables() & ~(std::uint64_t{1} << i)) == 0; }

}  // namespace

SigmaWeb::SigmaWeb(std::vector<std::string> names, ChartBox box, std::vector<int> signs,
                   std::vector<Expr> phi, std::vector<Expr> sigma, const SampleOptions& check)
    : names_(std::move(names)),
      box_(std::move(box)),
      signs_(std::move(signs)),
      phi_(std::move(phi)),
      sigma_(std::move(sigma)) {
  const std::size_t n = names_.size();
  if (n < 1) throw InvalidArgument("web needs at least one coordinate");
  if (box_.dim() != n || signs_.size() != n || phi_.size() != n || sigma_.size() != n * n) {
    throw InvalidArgument("web data sizes do not match the number of coordinates");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) throw InvalidArgument("duplicate coordinate name " + names_[i]);
    }
    if (signs_[i] != 1 && signs_[i] != -1) throw InvalidArgument("signs must be +1 or -1");
    if (!univariate_in(phi_[i], i)) {
      throw InvalidArgument("phi_" + names_[i] + " must depend on " + names_[i] + " only");
    }
    sigma_[i * n + i] = Expr();
    for (std::size_t j = 0; j < n; ++j) {
      if (!univariate_in(sigma_[i * n + j], i)) {
        throw InvalidArgument("sigma_" + names_[i] + names_[j] + " must depend on " + names_[i] +
                              " only");
      }
    }
  }

  // Factors checked for non-vanishing and constant sign: Phi_i, F_ij (i < j).
  std::vector<Expr> outputs(phi_);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("phi_" + names_[i]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (has_pair_factor(i, j)) {
        outputs.push_back(pair_factor(i, j));
        labels.push_back("pair factor " + names_[i] + "," + names_[j]);
      }
    }
  }
  const std::size_t factor_count = outputs.size();
  for (std::size_t i = 0; i < n; ++i) outputs.push_back(scale_squared(i));
  const Tape tape(outputs);

  std::vector<double> v(outputs.size());
  std::vector<double> scratch;
  std::vector<int> factor_sign;
  for_each_regular_point(box_, check.samples, check.seed, [&](std::span<const double> p) {
    tape.evaluate(p, v, scratch);
    if (factor_sign.empty()) {
      for (std::size_t f = 0; f < factor_count; ++f) factor_sign.push_back(v[f] > 0.0 ? 1 : -1);
    }
    for (std::size_t f = 0; f < factor_count; ++f) {
      if (v[f] == 0.0 || (v[f] > 0.0 ? 1 : -1) != factor_sign[f]) {
        throw VanishingFactor(labels[f] + " vanishes or changes sign on the box");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(v[factor_count + i] > 0.0)) {
        throw InvalidArgument("H_" + names_[i] + "^2 must be positive on the box");
      }
    }
  });
}

bool SigmaWeb::has_pair_factor(std::size_t i, std::size_t j) const {
  return !(sigma(i, j).is_zero() && sigma(j, i).is_zero());
}

Expr SigmaWeb::pair_factor(std::size_t i, std::size_t j) const {
  if (!has_pair_factor(i, j)) return Expr(1.0);
  return sigma(i, j) + sigma(j, i);
}

Expr SigmaWeb::scale_squared(std::size_t i) const {
  Expr h = phi_[i];
  for (std::size_t j = 0; j < dim(); ++j) {
    if (j != i && has_pair_factor(i, j)) h = h * pair_factor(i, j);
  }
  return h;
}

int SigmaWeb::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

OrthogonalMetric to_metric(const SigmaWeb& w, const SampleOptions& check) {
  std::vector<Expr> g;
  for (std::size_t i = 0; i < w.dim(); ++i) {
    const Expr h = w.scale_squared(i);
    if (h.is_zero()) throw VanishingFactor("H_" + w.names()[i] + "^2 is identically zero");
    g.push_back(w.sign(i) > 0 ? h : -h);
  }
  return OrthogonalMetric(w.names(), w.box(), std::move(g), check);
}

SigmaWeb restrict_web(const SigmaWeb& w, std::span<const int> coords, std::span<const double> frozen) {
  const std::size_t n = w.dim();
  const std::size_t k = coords.size();
  if (frozen.size() != n) throw InvalidArgument("frozen point has the wrong dimension");
  std::vector<int> mapping(n, -1);
  for (std::size_t a = 0; a < k; ++a) {
    const int c = coords[a];
    if (c < 0 || static_cast<std::size_t>(c) >= n || mapping[static_cast<std::size_t>(c)] >= 0) {
      throw InvalidArgument("restriction coordinates must be distinct valid indices");
    }
    mapping[static_cast<std::size_t>(c)] = static_cast<int>(a);
  }
  std::vector<std::optional<Expr>> freeze(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (mapping[j] < 0) freeze[j] = Expr(frozen[j]);
  }

  std::vector<std::string> names;
  std::vector<int> signs;
  std::vector<Expr> phi;
  std::vector<Expr> sigma(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    const auto c = static_cast<std::size_t>(coords[a]);
    names.push_back(w.names()[c]);
    signs.push_back(w.sign(c));
    Expr f = w.phi(c);
    for (std::size_t j = 0; j < n; ++j) {
      if (mapping[j] < 0 && w.has_pair_factor(c, j)) f = f * substitute(w.pair_factor(c, j), freeze);
    }
    phi.push_back(reindex(f, mapping));
    for (std::size_t b = 0; b < k; ++b) {
      if (a != b) sigma[a * k + b] = reindex(w.sigma(c, static_cast<std::size_t>(coords[b])), mapping);
    }
  }
  return SigmaWeb(std::move(names), w.box().restrict(coords), std::move(signs), std::move(phi),
                  std::move(sigma));
}

SigmaWeb permute_web(const SigmaWeb& w, std::span<const int> perm) {
  if (perm.size() != w.dim()) throw InvalidArgument("permutation has the wrong length");
  return restrict_web(w, perm, w.box().center());
}

DependencyPattern dependency_pattern(const SigmaWeb& w, const ConstancyTest& test) {
  const std::size_t n = w.dim();
  DependencyPattern d(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) d.set(i, j, depends_on(w.sigma(i, j), static_cast<int>(i), w.box(), test));
    }
  }
  return d;
}

namespace {

struct Normalized {
  double raw = 0.0;
  double normalized = 0.0;
};

Normalized residual(std::initializer_list<double> terms) {
  double sum = 0.0;
  double scale = 0.0;
  for (double t : terms) {
    sum += t;
    scale = std::max(scale, std::abs(t));
  }
  return {std::abs(sum), std::abs(sum) / (1.0 + scale)};
}

void raise(double& slot, double v) { slot = std::max(slot, v); }

}  // namespace

ResidualReport residuals_remain(const SigmaWeb& w, const SampleOptions& options) {
  const std::size_t n = w.dim();
  ResidualReport report;
  report.tol = options.tol;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        TripleResidual t;
        t.i = int(i);
        t.j = int(j);
        t.k = int(k);
        report.triples.push_back(t);
      }
    }
  }
  if (report.triples.empty()) return report;

  // Outputs: sigma'_ij for all ordered pairs, then F_ij for all ordered pairs.
  Differentiator diff;
  std::vector<Expr> outputs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) outputs.push_back(diff(w.sigma(i, j), static_cast<int>(i)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) outputs.push_back(i == j ? Expr(1.0) : w.pair_factor(i, j));
  }
  const Tape tape(outputs);
  std::vector<double> v(outputs.size());
  std::vector<double> scratch;

  report.samples = for_each_regular_point(w.box(), options.samples, options.seed,
                                          [&](std::span<const double> p) {
    tape.evaluate(p, v, scratch);
    auto s = [&](std::size_t a, std::size_t b) { return v[a * n + b]; };
    auto F = [&](std::size_t a, std::size_t b) { return v[n * n + a * n + b]; };
    auto remain = [&](std::size_t i, std::size_t j, std::size_t k) {
      return residual({s(j, i) * s(k, i) * F(j, k), -s(j, i) * s(k, j) * F(k, i),
                       -s(k, i) * s(j, k) * F(i, j)});
    };
    for (TripleResidual& t : report.triples) {
      const auto i = static_cast<std::size_t>(t.i);
      const auto j = static_cast<std::size_t>(t.j);
      const auto k = static_cast<std::size_t>(t.k);
      const Normalized a = remain(i, j, k);
      const Normalized b = remain(j, k, i);
      const Normalized c = remain(k, i, j);
      const Normalized det = residual({s(i, j) * s(j, k) * s(k, i), s(j, i) * s(k, j) * s(i, k)});
      raise(t.a, a.normalized);
      raise(t.b, b.normalized);
      raise(t.c, c.normalized);
      raise(t.det, det.normalized);
      raise(t.a_raw, a.raw);
      raise(t.b_raw, b.raw);
      raise(t.c_raw, c.raw);
      raise(t.det_raw, det.raw);
    }
  });

  for (TripleResidual& t : report.triples) {
    const double worst = std::max({t.a, t.b, t.c, t.det});
    t.pass = worst <= options.tol;
    raise(report.max_normalized, worst);
    raise(report.max_abs, std::max({t.a_raw, t.b_raw, t.c_raw, t.det_raw}));
  }
  report.pass = report.max_normalized <= options.tol;
  return report;
}

bool validate_form(const OrthogonalMetric& m, const SigmaWeb& w, const SampleOptions& options) {
  const std::size_t n = m.dim();
  if (w.dim() != n) throw InvalidArgument("metric and web dimensions differ");
  std::vector<Expr> outputs(m.components());
  for (std::size_t i = 0; i < n; ++i) {
    const Expr h = w.scale_squared(i);
    outputs.push_back(w.sign(i) > 0 ? h : -h);
  }
  const Tape tape(outputs);
  std::vector<double> v(outputs.size());
  std::vector<double> scratch;
  std::vector<double> first;
  bool ok = true;
  for_each_regular_point(m.box(), options.samples, options.seed, [&](std::span<const double> p) {
    tape.evaluate(p, v, scratch);
    std::vector<double> ratio(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (v[n + i] == 0.0) throw SingularEvaluation("web component vanishes");
      ratio[i] = v[i] / v[n + i];
    }
    if (first.empty()) first = ratio;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(first[i] > 0.0) || std::abs(ratio[i] - first[i]) > options.tol * (1.0 + std::abs(first[i]))) {
        ok = false;
      }
    }
  });
  return ok;
}

}  // namespace kemweb
