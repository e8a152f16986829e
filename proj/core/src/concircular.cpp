#include "kemweb/concircular.hpp"

#include <cmath>

#include "kemweb/tape.hpp"

namespace kemweb {

Expr ConcircularTensor::eigenvalue(std::size_t i) const {
  for (std::size_t a = 0; a < simple.size(); ++a) {
    if (static_cast<std::size_t>(simple[a]) == i) return eigen[a];
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int c : blocks[b]) {
      if (static_cast<std::size_t>(c) == i) return Expr(block_e[b]);
    }
  }
  throw InvalidArgument("coordinate index outside the tensor");
}

ConcircularTensor build_ct(const SCKTData& d) {
  ConcircularTensor ct;
  for (const BaseCoordinate& c : d.simple) {
    const int a = static_cast<int>(ct.simple.size());
    ct.simple.push_back(a);
    ct.eigen.push_back(substitute(c.eigen, {Expr::var(a, c.name)}));
  }
  int next = static_cast<int>(d.simple.size());
  for (const ConstantBlock& b : d.blocks) {
    ct.block_e.push_back(b.e);
    ct.blocks.emplace_back();
    for (std::size_t k = 0; k < b.web.dim(); ++k) ct.blocks.back().push_back(next++);
  }
  ct.n = static_cast<std::size_t>(next);
  if (ct.simple.empty()) {
    bool all_equal = true;
    for (double e : ct.block_e) all_equal = all_equal && e == ct.block_e.front();
    if (all_equal) throw TrivialTensor("concircular tensor is a constant multiple of the identity");
  }
  return ct;
}

SymTensorField covariant_form(const ConcircularTensor& ct, const OrthogonalMetric& m) {
  if (m.dim() != ct.n) throw InvalidArgument("tensor and metric dimensions differ");
  SymTensorField l(ct.n);
  for (std::size_t i = 0; i < ct.n; ++i) l.set(i, i, ct.eigenvalue(i) * m.component(int(i)));
  return l;
}

SymTensorField metric_tensor(const OrthogonalMetric& m) {
  SymTensorField g(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) g.set(i, i, m.component(int(i)));
  return g;
}

Covector alpha_from_trace(const SymTensorField& l, const OrthogonalMetric& m) {
  if (l.dim() != m.dim()) throw InvalidArgument("tensor and metric dimensions differ");
  Expr trace;
  for (std::size_t i = 0; i < m.dim(); ++i) trace = trace + l(i, i) / m.component(int(i));
  Covector alpha;
  for (std::size_t k = 0; k < m.dim(); ++k) alpha.push_back(differentiate(trace, int(k)));
  return alpha;
}

namespace {

// Compiled T_ij, d_k T_ij and optional extra expressions.
class TensorTape {
 public:
  TensorTape(const SymTensorField& t, const std::vector<Expr>& extra) : n_(t.dim()) {
    std::vector<Expr> out;
    Differentiator diff;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) out.push_back(t(i, j));
    }
    for (std::size_t k = 0; k < n_; ++k) {
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) out.push_back(diff(t(i, j), int(k)));
      }
    }
    out.insert(out.end(), extra.begin(), extra.end());
    tape_ = Tape(out);
    values_.resize(out.size());
  }

  void evaluate(std::span<const double> p) { tape_.evaluate(p, values_, scratch_); }
  double t(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double dt(std::size_t k, std::size_t i, std::size_t j) const {
    return values_[n_ * n_ + (k * n_ + i) * n_ + j];
  }
  double extra(std::size_t e) const { return values_[n_ * n_ * (n_ + 1) + e]; }

 private:
  std::size_t n_;
  Tape tape_;
  std::vector<double> values_;
  std::vector<double> scratch_;
};

// nabla_k T_ij from tape values; `parts` receives the additive terms.
double nabla(const TensorTape& tt, const ChristoffelTable& gamma, std::size_t n, std::size_t k,
             std::size_t i, std::size_t j, std::vector<double>* parts) {
  double s = tt.dt(k, i, j);
  double left = 0.0;
  double right = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    left -= gamma(l, k, i) * tt.t(l, j);
    right -= gamma(l, k, j) * tt.t(i, l);
  }
  if (parts) {
    parts->push_back(s);
    parts->push_back(left);
    parts->push_back(right);
  }
  return s + left + right;
}

void require_dims(const SymTensorField& t, const OrthogonalMetric& m) {
  if (t.dim() != m.dim()) throw InvalidArgument("tensor and metric dimensions differ");
}

}  // namespace

std::vector<double> covariant_derivative(const SymTensorField& t, const OrthogonalMetric& m,
                                         std::span<const double> p) {
  require_dims(t, m);
  const std::size_t n = m.dim();
  TensorTape tt(t, {});
  tt.evaluate(p);
  const ChristoffelTable gamma = christoffel(m, p);
  std::vector<double> out(n * n * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out[(k * n + i) * n + j] = nabla(tt, gamma, n, k, i, j, nullptr);
    }
  }
  return out;
}

ConditionReport verify_concircular_against(const SymTensorField& l, const OrthogonalMetric& m,
                                           const Covector& alpha, const SampleOptions& options) {
  require_dims(l, m);
  const std::size_t n = m.dim();
  if (alpha.size() != n) throw InvalidArgument("covector has the wrong dimension");
  ConditionReport report;
  report.name = "concircular";
  report.tol = options.tol;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) report.entries.push_back({"C-tensor", {int(k), int(i), int(j)}, 0.0, 0.0});
    }
  }
  std::vector<Expr> extra(alpha);
  extra.insert(extra.end(), m.components().begin(), m.components().end());
  TensorTape tt(l, extra);
  ResidualAccumulator acc(report);
  std::vector<double> parts;
  report.samples = for_each_regular_point(m.box(), options.samples, options.seed,
                                          [&](std::span<const double> p) {
    tt.evaluate(p);
    const ChristoffelTable gamma = christoffel(m, p);
    auto g = [&](std::size_t a, std::size_t b) { return a == b ? tt.extra(n + a) : 0.0; };
    std::size_t slot = 0;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
          parts.clear();
          nabla(tt, gamma, n, k, i, j, &parts);
          parts.push_back(-0.5 * tt.extra(i) * g(j, k));
          parts.push_back(-0.5 * tt.extra(j) * g(i, k));
          acc.add(slot++, parts);
        }
      }
    }
  });
  report.finalize();
  return report;
}

ConditionReport verify_concircular(const SymTensorField& l, const OrthogonalMetric& m,
                                   const SampleOptions& options) {
  return verify_concircular_against(l, m, alpha_from_trace(l, m), options);
}

ConditionReport verify_killing(const SymTensorField& k, const OrthogonalMetric& m,
                               const SampleOptions& options) {
  require_dims(k, m);
  const std::size_t n = m.dim();
  ConditionReport report;
  report.name = "killing";
  report.tol = options.tol;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      for (std::size_t c = b; c < n; ++c) report.entries.push_back({"Killing", {int(a), int(b), int(c)}, 0.0, 0.0});
    }
  }
  TensorTape tt(k, {});
  ResidualAccumulator acc(report);
  std::vector<double> parts;
  report.samples = for_each_regular_point(m.box(), options.samples, options.seed,
                                          [&](std::span<const double> p) {
    tt.evaluate(p);
    const ChristoffelTable gamma = christoffel(m, p);
    std::size_t slot = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        for (std::size_t c = b; c < n; ++c) {
          parts.clear();
          nabla(tt, gamma, n, a, b, c, &parts);
          nabla(tt, gamma, n, b, c, a, &parts);
          nabla(tt, gamma, n, c, a, b, &parts);
          for (double& x : parts) x /= 3.0;
          acc.add(slot++, parts);
        }
      }
    }
  });
  report.finalize();
  return report;
}

}  // namespace kemweb
