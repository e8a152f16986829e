#include "kemweb/constcurv.hpp"

#include <cmath>

#include "kemweb/tape.hpp"

namespace kemweb {

namespace {

Expr shift(const Expr& e, std::size_t offset, const std::vector<std::string>& names) {
  std::vector<std::optional<Expr>> map;
  for (std::size_t j = 0; j < names.size(); ++j) map.emplace_back(Expr::var(int(offset + j), names[j]));
  return substitute(e, map);
}

std::vector<std::size_t> fiber_offsets(const OrthogonalMetric& base, const std::vector<Fiber>& fibers) {
  std::vector<std::size_t> out;
  std::size_t next = base.dim();
  for (const Fiber& f : fibers) {
    out.push_back(next);
    next += f.metric.dim();
  }
  return out;
}

OrthogonalMetric assemble(const OrthogonalMetric& base, const std::vector<Fiber>& fibers,
                          const std::vector<std::size_t>& offsets) {
  const std::uint64_t base_vars = base.dim() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << base.dim()) - 1;
  std::vector<std::string> names(base.names());
  std::vector<Interval> box(base.box().intervals());
  std::vector<Expr> g(base.components());
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    const Fiber& f = fibers[i];
    if ((f.rho.variables() & ~base_vars) != 0) {
      throw InvalidArgument("warping function must depend on base coordinates only");
    }
    const Expr rho2 = f.rho * f.rho;
    for (std::size_t k = 0; k < f.metric.dim(); ++k) {
      names.push_back(f.metric.names()[k]);
      box.push_back(f.metric.box()[k]);
      g.push_back(rho2 * shift(f.metric.component(int(k)), offsets[i], f.metric.names()));
    }
  }
  return OrthogonalMetric(std::move(names), ChartBox(std::move(box)), std::move(g));
}

// Base-only quantities of every fiber at one base point.
struct BaseData {
  std::vector<double> g;      // base metric diagonal
  std::vector<double> rho;    // per fiber
  std::vector<double> drho;   // [fiber][a]
  std::vector<std::vector<double>> hess;  // per fiber, row-major d0 x d0
};

class BaseEvaluator {
 public:
  explicit BaseEvaluator(const WarpedProductStructure& w) : w_(w), d0_(w.base_dim()) {
    std::vector<Expr> out;
    for (const Fiber& f : w.fibers()) {
      out.push_back(f.rho);
      for (std::size_t a = 0; a < d0_; ++a) out.push_back(differentiate(f.rho, int(a)));
    }
    tape_ = Tape(out);
  }

  BaseData at(std::span<const double> pb) const {
    BaseData d;
    d.g = metric_values(w_.base(), pb);
    const std::vector<double> v = tape_.evaluate(pb);
    const std::size_t stride = d0_ + 1;
    for (std::size_t i = 0; i < w_.fibers().size(); ++i) {
      d.rho.push_back(v[i * stride]);
      for (std::size_t a = 0; a < d0_; ++a) d.drho.push_back(v[i * stride + 1 + a]);
      d.hess.push_back(hessian(w_.fibers()[i].rho, w_.base(), pb));
    }
    return d;
  }

  // <grad f_i, grad f_k> for f = rho (log_ = false) or log rho (log_ = true).
  double inner(const BaseData& d, std::size_t i, std::size_t k, bool log_) const {
    double s = 0.0;
    for (std::size_t a = 0; a < d0_; ++a) s += d.drho[i * d0_ + a] * d.drho[k * d0_ + a] / d.g[a];
    return log_ ? s / (d.rho[i] * d.rho[k]) : s;
  }

 private:
  const WarpedProductStructure& w_;
  std::size_t d0_;
  Tape tape_;
};

double coordinate_sectional(const RiemannTensor& r, std::size_t u, std::size_t v) {
  return r(u, v, u, v) / (r.g(u) * r.g(v));
}

}  // namespace

WarpedProductStructure::WarpedProductStructure(OrthogonalMetric base, std::vector<Fiber> fibers)
    : base_(std::move(base)),
      fibers_(std::move(fibers)),
      offsets_(fiber_offsets(base_, fibers_)),
      assembled_(assemble(base_, fibers_, offsets_)) {}

std::vector<double> hessian(const Expr& f, const OrthogonalMetric& m, std::span<const double> p) {
  const std::size_t n = m.dim();
  std::vector<Expr> out;
  Differentiator diff;
  for (std::size_t k = 0; k < n; ++k) out.push_back(diff(f, int(k)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.push_back(diff(out[i], int(j)));
  }
  const std::vector<double> v = Tape(out).evaluate(p);
  const ChristoffelTable gamma = christoffel(m, p);
  std::vector<double> h(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = v[n + i * n + j];
      for (std::size_t k = 0; k < n; ++k) s -= gamma(k, i, j) * v[k];
      h[i * n + j] = s;
    }
  }
  return h;
}

std::vector<double> mean_curvature_normal(const WarpedProductStructure& w, std::size_t fiber,
                                          std::span<const double> p) {
  if (fiber >= w.fibers().size()) throw InvalidArgument("fiber index out of range");
  const OrthogonalMetric& m = w.assembled();
  const std::vector<double> g = metric_values(m, p);
  const Expr& rho = w.fibers()[fiber].rho;
  const double r = evaluate(rho, p);
  if (!(r > 0.0)) throw SingularEvaluation("warping function is not positive");
  std::vector<double> h(m.dim(), 0.0);
  for (std::size_t a = 0; a < w.base_dim(); ++a) h[a] = -evaluate(differentiate(rho, int(a)), p) / (r * g[a]);
  return h;
}

ConditionReport check_warped_curvature_formulas(const WarpedProductStructure& w,
                                                const SampleOptions& options) {
  const std::size_t d0 = w.base_dim();
  const std::size_t nf = w.fibers().size();
  ConditionReport report;
  report.name = "warped_curvature";
  report.tol = options.tol;
  for (std::size_t a = 0; a < d0; ++a) {
    for (std::size_t b = a + 1; b < d0; ++b) report.entries.push_back({"base_plane", {int(a), int(b)}, 0, 0});
  }
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t a = 0; a < d0; ++a) {
      for (std::size_t u = 0; u < w.fibers()[i].metric.dim(); ++u) {
        report.entries.push_back({"mixed_plane", {int(a), int(w.offset(i) + u)}, 0, 0});
      }
    }
  }
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t k = i + 1; k < nf; ++k) {
      for (std::size_t u = 0; u < w.fibers()[i].metric.dim(); ++u) {
        for (std::size_t v = 0; v < w.fibers()[k].metric.dim(); ++v) {
          report.entries.push_back({"cross_fiber_plane", {int(w.offset(i) + u), int(w.offset(k) + v)}, 0, 0});
        }
      }
    }
  }
  for (std::size_t i = 0; i < nf; ++i) {
    const std::size_t di = w.fibers()[i].metric.dim();
    for (std::size_t u = 0; u < di; ++u) {
      for (std::size_t v = u + 1; v < di; ++v) {
        report.entries.push_back({"fiber_plane", {int(w.offset(i) + u), int(w.offset(i) + v)}, 0, 0});
      }
    }
  }
  if (report.entries.empty()) {
    report.notes.push_back("no coordinate planes");
    report.finalize();
    return report;
  }

  const BaseEvaluator base(w);
  ResidualAccumulator acc(report);
  report.samples = for_each_regular_point(w.assembled().box(), options.samples, options.seed,
                                          [&](std::span<const double> p) {
    const RiemannTensor r = riemann_tensor(w.assembled(), p);
    const std::span<const double> pb = p.subspan(0, d0);
    const RiemannTensor rb = riemann_tensor(w.base(), pb);
    const BaseData bd = base.at(pb);
    std::vector<RiemannTensor> rf;
    for (std::size_t i = 0; i < nf; ++i) {
      rf.push_back(riemann_tensor(w.fibers()[i].metric, p.subspan(w.offset(i), w.fibers()[i].metric.dim())));
    }
    std::size_t slot = 0;
    for (std::size_t a = 0; a < d0; ++a) {
      for (std::size_t b = a + 1; b < d0; ++b) {
        acc.add(slot++, {coordinate_sectional(r, a, b), -coordinate_sectional(rb, a, b)});
      }
    }
    for (std::size_t i = 0; i < nf; ++i) {
      for (std::size_t a = 0; a < d0; ++a) {
        const double formula = -bd.hess[i][a * d0 + a] / (bd.rho[i] * bd.g[a]);
        for (std::size_t u = 0; u < w.fibers()[i].metric.dim(); ++u) {
          acc.add(slot++, {coordinate_sectional(r, a, w.offset(i) + u), -formula});
        }
      }
    }
    for (std::size_t i = 0; i < nf; ++i) {
      for (std::size_t k = i + 1; k < nf; ++k) {
        const double formula = -base.inner(bd, i, k, true);
        for (std::size_t u = 0; u < w.fibers()[i].metric.dim(); ++u) {
          for (std::size_t v = 0; v < w.fibers()[k].metric.dim(); ++v) {
            acc.add(slot++, {coordinate_sectional(r, w.offset(i) + u, w.offset(k) + v), -formula});
          }
        }
      }
    }
    for (std::size_t i = 0; i < nf; ++i) {
      const std::size_t di = w.fibers()[i].metric.dim();
      const double grad2 = base.inner(bd, i, i, false);
      for (std::size_t u = 0; u < di; ++u) {
        for (std::size_t v = u + 1; v < di; ++v) {
          const double formula = (coordinate_sectional(rf[i], u, v) - grad2) / (bd.rho[i] * bd.rho[i]);
          acc.add(slot++, {coordinate_sectional(r, w.offset(i) + u, w.offset(i) + v), -formula});
        }
      }
    }
  });
  report.finalize();
  return report;
}

ConditionReport check_constant_curvature_conditions(const WarpedProductStructure& w, double kappa,
                                                    const SampleOptions& options) {
  const std::size_t d0 = w.base_dim();
  const std::size_t nf = w.fibers().size();
  ConditionReport report;
  report.name = "constant_curvature";
  report.tol = options.tol;
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t a = 0; a < d0; ++a) {
      for (std::size_t b = a; b < d0; ++b) report.entries.push_back({"rho_hessian", {int(i), int(a), int(b)}, 0, 0});
    }
  }
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t k = i + 1; k < nf; ++k) report.entries.push_back({"cross_gradient", {int(i), int(k)}, 0, 0});
  }
  // kappa_i = kappa rho_i^2 + |grad rho_i|^2 must not vary along the base.
  std::vector<Expr> fiber_kappa_slopes;
  for (std::size_t i = 0; i < nf; ++i) {
    const Expr& rho = w.fibers()[i].rho;
    Expr ki = Expr(kappa) * rho * rho;
    for (std::size_t a = 0; a < d0; ++a) {
      const Expr dr = differentiate(rho, int(a));
      ki = ki + dr * dr / w.base().component(int(a));
    }
    for (std::size_t a = 0; a < d0; ++a) {
      fiber_kappa_slopes.push_back(differentiate(ki, int(a)));
      report.entries.push_back({"fiber_curvature", {int(i), int(a)}, 0, 0});
    }
  }
  if (report.entries.empty()) {
    report.notes.push_back("no fibers");
    report.finalize();
    return report;
  }
  const Tape slopes(fiber_kappa_slopes);

  const BaseEvaluator base(w);
  ResidualAccumulator acc(report);
  report.samples = for_each_regular_point(w.base().box(), options.samples, options.seed,
                                          [&](std::span<const double> pb) {
    const BaseData bd = base.at(pb);
    const std::vector<double> dk = slopes.evaluate(pb);
    std::size_t slot = 0;
    for (std::size_t i = 0; i < nf; ++i) {
      for (std::size_t a = 0; a < d0; ++a) {
        for (std::size_t b = a; b < d0; ++b) {
          const double gab = a == b ? bd.g[a] : 0.0;
          acc.add(slot++, {bd.hess[i][a * d0 + b], kappa * bd.rho[i] * gab});
        }
      }
    }
    for (std::size_t i = 0; i < nf; ++i) {
      for (std::size_t k = i + 1; k < nf; ++k) acc.add(slot++, {base.inner(bd, i, k, true), kappa});
    }
    for (double s : dk) acc.add(slot++, {s});
  });
  report.finalize();
  return report;
}

ConditionReport kem_base1_check(const WarpedProductStructure& w, std::optional<double> omega,
                                const SampleOptions& options) {
  if (w.base_dim() != 1) throw InvalidArgument("base must be one-dimensional");
  const Expr& g11 = w.base().component(0);
  if (!g11.is_constant() || std::abs(g11.value()) != 1.0) {
    throw InvalidArgument("base metric must be eps dx^2 with eps = +1 or -1");
  }
  const std::size_t nf = w.fibers().size();
  ConditionReport report;
  report.name = "kem_base1";
  report.tol = options.tol;

  std::vector<Expr> out;
  for (const Fiber& f : w.fibers()) {
    const Expr d1 = differentiate(f.rho, 0);
    out.push_back(f.rho);
    out.push_back(d1);
    out.push_back(differentiate(d1, 0));
  }
  const Tape rho_tape(out);
  const ChartBox& box = w.base().box();

  if (!omega) {
    double num = 0.0;
    double den = 0.0;
    for_each_regular_point(box, options.samples, options.seed, [&](std::span<const double> p) {
      const std::vector<double> v = rho_tape.evaluate(p);
      for (std::size_t i = 0; i < nf; ++i) {
        num -= v[3 * i + 2] * v[3 * i];
        den += v[3 * i] * v[3 * i];
      }
    });
    omega = den > 0.0 ? num / den : 0.0;
    report.notes.push_back("omega fitted by least squares: " + format_number(*omega));
  }
  const double om = *omega;

  for (std::size_t i = 0; i < nf; ++i) report.entries.push_back({"rho_ode", {int(i)}, 0, 0});
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t k = i + 1; k < nf; ++k) report.entries.push_back({"log_cross", {int(i), int(k)}, 0, 0});
  }
  // (sigma_i'/sigma_k')' with sigma = rho^2; the factor 2 cancels.
  std::vector<Expr> ratio_slopes;
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t k = i + 1; k < nf; ++k) {
      std::size_t num = i;
      std::size_t den = k;
      if (is_identically_zero(out[3 * den + 1], box, options.samples, 1e-14, options.seed)) std::swap(num, den);
      if (is_identically_zero(out[3 * den + 1], box, options.samples, 1e-14, options.seed)) {
        report.notes.push_back("sigma ratio " + std::to_string(i) + "," + std::to_string(k) +
                               " skipped: both warping functions are constant");
        continue;
      }
      const Expr ratio = (out[3 * num] * out[3 * num + 1]) / (out[3 * den] * out[3 * den + 1]);
      ratio_slopes.push_back(differentiate(ratio, 0));
      report.entries.push_back({"sigma_ratio", {int(num), int(den)}, 0, 0});
    }
  }
  if (report.entries.empty()) {
    report.finalize();
    return report;
  }
  const Tape ratio_tape(ratio_slopes);

  ResidualAccumulator acc(report);
  report.samples = for_each_regular_point(box, options.samples, options.seed, [&](std::span<const double> p) {
    const std::vector<double> v = rho_tape.evaluate(p);
    const std::vector<double> rs = ratio_tape.evaluate(p);
    std::size_t slot = 0;
    for (std::size_t i = 0; i < nf; ++i) acc.add(slot++, {v[3 * i + 2], om * v[3 * i]});
    for (std::size_t i = 0; i < nf; ++i) {
      for (std::size_t k = i + 1; k < nf; ++k) {
        acc.add(slot++, {(v[3 * i + 1] / v[3 * i]) * (v[3 * k + 1] / v[3 * k]), om});
      }
    }
    for (double s : rs) acc.add(slot++, {s});
  });
  report.finalize();
  return report;
}

}  // namespace kemweb
