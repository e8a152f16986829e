#include "kemweb/metric.hpp"

#include <algorithm>
#include <cmath>

#include "kemweb/errors.hpp"
#include "kemweb/tape.hpp"

namespace kemweb {

struct OrthogonalMetric::Compiled {
  std::size_t n = 0;
  // Gamma^i_jk as expressions, flat [i][j][k].
  std::vector<Expr> gamma;
  // Non-zero Christoffel entries (flat index into `gamma`).
  std::vector<std::size_t> gamma_support;

  // outputs: g (n), Gamma support values
  Tape christoffel_tape;
  // outputs: g (n), Gamma support, then for each l: d_l Gamma support
  Tape curvature_tape;
  // outputs: H^2 (n), d_j log H_i^2 (n*n), d_j d_k log H_i^2 for j <= k
  Tape log_tape;
  Tape metric_tape;
};

namespace {

std::size_t idx3(std::size_t n, std::size_t i, std::size_t j, std::size_t k) {
  return (i * n + j) * n + k;
}

std::shared_ptr<const OrthogonalMetric::Compiled> compile(const std::vector<Expr>& g) {
  auto c = std::make_shared<OrthogonalMetric::Compiled>();
  const std::size_t n = g.size();
  c->n = n;
  Differentiator diff;

  // Orthogonal-coordinate closed forms of the Christoffel symbols.
  c->gamma.assign(n * n * n, Expr());
  const Expr half(0.5);
  for (std::size_t i = 0; i < n; ++i) {
    const int ii = static_cast<int>(i);
    for (std::size_t j = 0; j < n; ++j) {
      const int jj = static_cast<int>(j);
      // Gamma^i_ij = Gamma^i_ji = (1/2) d_j g_ii / g_ii (includes j == i)
      const Expr gij = half * diff(g[i], jj) / g[i];
      c->gamma[idx3(n, i, i, j)] = gij;
      c->gamma[idx3(n, i, j, i)] = gij;
      if (j != i) {
        // Gamma^i_jj = -(1/2) d_i g_jj / g_ii
        c->gamma[idx3(n, i, j, j)] = -(half * diff(g[j], ii)) / g[i];
      }
    }
  }
  for (std::size_t f = 0; f < c->gamma.size(); ++f) {
    if (!c->gamma[f].is_zero()) c->gamma_support.push_back(f);
  }

  std::vector<Expr> out(g.begin(), g.end());
  c->metric_tape = Tape(out);
  for (std::size_t f : c->gamma_support) out.push_back(c->gamma[f]);
  c->christoffel_tape = Tape(out);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t f : c->gamma_support) out.push_back(diff(c->gamma[f], static_cast<int>(l)));
  }
  c->curvature_tape = Tape(out);

  // log H_i^2 derivatives; the sign e_i cancels in the logarithmic derivative.
  std::vector<Expr> logs(g.begin(), g.end());
  std::vector<Expr> first(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      first[i * n + j] = diff(g[i], static_cast<int>(j)) / g[i];
      logs.push_back(first[i * n + j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j; k < n; ++k) logs.push_back(diff(first[i * n + j], static_cast<int>(k)));
    }
  }
  c->log_tape = Tape(logs);
  return c;
}

}  // namespace

OrthogonalMetric::OrthogonalMetric(std::vector<std::string> names, ChartBox box,
                                   std::vector<Expr> components, const SampleOptions& check)
    : names_(std::move(names)), box_(std::move(box)), g_(std::move(components)) {
  const std::size_t n = names_.size();
  if (n < 1) throw InvalidArgument("metric needs at least one coordinate");
  if (g_.size() != n || box_.dim() != n) {
    throw InvalidArgument("metric components, coordinate names and box must have equal length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (names_[i].empty()) throw InvalidArgument("empty coordinate name");
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) throw InvalidArgument("duplicate coordinate name " + names_[i]);
    }
    if (g_[i].variables() >> n) {
      throw InvalidArgument("metric component " + names_[i] + " uses an unknown coordinate");
    }
  }

  Tape tape(g_);
  std::vector<double> values;
  try {
    values = tape.evaluate(box_.center());
  } catch (const SingularEvaluation&) {
    HaltonSampler sampler(box_, check.seed);
    Point p(n);
    for (int tries = 0; tries < check.samples && values.empty(); ++tries) {
      sampler.next(p);
      try {
        values = tape.evaluate(p);
      } catch (const SingularEvaluation&) {
      }
    }
    if (values.empty()) throw InsufficientSamples("metric is singular throughout the box");
  }
  signs_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] == 0.0) throw VanishingFactor("metric component g_" + names_[i] + " vanishes");
    signs_[i] = values[i] > 0.0 ? 1 : -1;
  }

  std::vector<double> scratch;
  std::vector<double> v(n);
  for_each_regular_point(box_, check.samples, check.seed, [&](std::span<const double> p) {
    tape.evaluate(p, v, scratch);
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] == 0.0 || (v[i] > 0.0 ? 1 : -1) != signs_[i]) {
        throw VanishingFactor("metric component g_" + names_[i] +
                              " vanishes or changes sign on the box");
      }
    }
  });

  compiled_ = compile(g_);
}

Expr OrthogonalMetric::scale_squared(int i) const {
  return sign(i) > 0 ? component(i) : -component(i);
}

const Expr& OrthogonalMetric::christoffel_expr(int i, int j, int k) const {
  const std::size_t n = dim();
  return compiled_->gamma.at(idx3(n, static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                  static_cast<std::size_t>(k)));
}

int OrthogonalMetric::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

// ---------------------------------------------------------------------------

std::vector<double> metric_values(const OrthogonalMetric& m, std::span<const double> p) {
  return m.compiled().metric_tape.evaluate(p);
}

ChristoffelTable christoffel(const OrthogonalMetric& m, std::span<const double> p) {
  const auto& c = m.compiled();
  const std::size_t n = c.n;
  const std::vector<double> out = c.christoffel_tape.evaluate(p);
  std::vector<double> values(n * n * n, 0.0);
  for (std::size_t s = 0; s < c.gamma_support.size(); ++s) values[c.gamma_support[s]] = out[n + s];
  return ChristoffelTable(n, std::move(values));
}

RiemannTensor riemann_tensor(const OrthogonalMetric& m, std::span<const double> p) {
  const auto& c = m.compiled();
  const std::size_t n = c.n;
  const std::size_t support = c.gamma_support.size();
  const std::vector<double> out = c.curvature_tape.evaluate(p);

  std::vector<double> g(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<double> gamma(n * n * n, 0.0);
  std::vector<double> dgamma(n * n * n * n, 0.0);  // [l][i][j][k] = d_l Gamma^i_jk
  for (std::size_t s = 0; s < support; ++s) {
    gamma[c.gamma_support[s]] = out[n + s];
    for (std::size_t l = 0; l < n; ++l) {
      dgamma[l * n * n * n + c.gamma_support[s]] = out[n + support * (1 + l) + s];
    }
  }
  auto G = [&](std::size_t i, std::size_t j, std::size_t k) { return gamma[idx3(n, i, j, k)]; };
  auto dG = [&](std::size_t l, std::size_t i, std::size_t j, std::size_t k) {
    return dgamma[l * n * n * n + idx3(n, i, j, k)];
  };

  // R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_cm Gamma^m_db - Gamma^a_dm Gamma^m_cb
  std::vector<double> values(n * n * n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t cc = 0; cc < n; ++cc) {
        for (std::size_t d = 0; d < n; ++d) {
          if (cc == d) continue;
          double r = dG(cc, a, d, b) - dG(d, a, cc, b);
          for (std::size_t mm = 0; mm < n; ++mm) {
            r += G(a, cc, mm) * G(mm, d, b) - G(a, d, mm) * G(mm, cc, b);
          }
          values[((a * n + b) * n + cc) * n + d] = g[a] * r;
        }
      }
    }
  }
  return RiemannTensor(n, std::move(g), std::move(values));
}

LogDerivatives log_derivatives(const OrthogonalMetric& m, std::span<const double> p) {
  const auto& c = m.compiled();
  const std::size_t n = c.n;
  const std::vector<double> out = c.log_tape.evaluate(p);
  LogDerivatives ld;
  ld.n = n;
  ld.h2.resize(n);
  for (std::size_t i = 0; i < n; ++i) ld.h2[i] = m.sign(static_cast<int>(i)) * out[i];
  ld.first.assign(out.begin() + static_cast<std::ptrdiff_t>(n),
                  out.begin() + static_cast<std::ptrdiff_t>(n + n * n));
  ld.second.assign(n * n * n, 0.0);
  std::size_t pos = n + n * n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j; k < n; ++k) {
        ld.second[idx3(n, i, j, k)] = out[pos];
        ld.second[idx3(n, i, k, j)] = out[pos];
        ++pos;
      }
    }
  }
  return ld;
}

double riemann(const OrthogonalMetric& m, std::span<const double> p, int i, int j, int k, int l) {
  const auto n = static_cast<int>(m.dim());
  for (int x : {i, j, k, l}) {
    if (x < 0 || x >= n) throw InvalidArgument("curvature index out of range");
  }
  return riemann_tensor(m, p)(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                              static_cast<std::size_t>(k), static_cast<std::size_t>(l));
}

double rjiik_closed_form(const OrthogonalMetric& m, std::span<const double> p, int i, int j, int k) {
  const auto n = static_cast<int>(m.dim());
  if (i == j || j == k || i == k || std::min({i, j, k}) < 0 || std::max({i, j, k}) >= n) {
    throw InvalidArgument("closed form R_jiik needs three distinct valid indices");
  }
  const LogDerivatives ld = log_derivatives(m, p);
  const auto I = static_cast<std::size_t>(i);
  const auto J = static_cast<std::size_t>(j);
  const auto K = static_cast<std::size_t>(k);
  const double bracket = 2.0 * ld.dd(I, J, K) + ld.d(I, J) * ld.d(I, K) - ld.d(I, J) * ld.d(J, K) -
                         ld.d(I, K) * ld.d(K, J);
  return m.sign(i) * ld.h2[I] / 4.0 * bracket;
}

// ---------------------------------------------------------------------------

double RiemannTensor::max_abs() const {
  double mx = 0.0;
  for (double v : values_) mx = std::max(mx, std::abs(v));
  return mx;
}

double RiemannTensor::inner(std::span<const double> x, std::span<const double> y) const {
  double s = 0.0;
  for (std::size_t a = 0; a < n_; ++a) s += g_[a] * x[a] * y[a];
  return s;
}

double RiemannTensor::sectional(std::span<const double> x, std::span<const double> y,
                                double tol) const {
  if (x.size() != n_ || y.size() != n_) throw InvalidArgument("tangent vector has wrong dimension");
  const double xx = inner(x, x);
  const double yy = inner(y, y);
  const double xy = inner(x, y);
  const double gram = xx * yy - xy * xy;
  const double scale = std::abs(xx * yy) + xy * xy;
  if (gram == 0.0 || std::abs(gram) < tol * scale) {
    throw DegeneratePlane("tangent 2-plane is degenerate");
  }
  double num = 0.0;
  for (std::size_t a = 0; a < n_; ++a) {
    if (x[a] == 0.0) continue;
    for (std::size_t b = 0; b < n_; ++b) {
      if (y[b] == 0.0) continue;
      for (std::size_t c = 0; c < n_; ++c) {
        if (x[c] == 0.0) continue;
        for (std::size_t d = 0; d < n_; ++d) {
          num += (*this)(a, b, c, d) * x[a] * y[b] * x[c] * y[d];
        }
      }
    }
  }
  return num / gram;
}

double sectional_curvature(const OrthogonalMetric& m, std::span<const double> p,
                           std::span<const double> x, std::span<const double> y, double tol) {
  return riemann_tensor(m, p).sectional(x, y, tol);
}

std::optional<double> constant_curvature_estimate(const OrthogonalMetric& m,
                                                  std::span<const Point> points, double tol) {
  if (points.size() < 2) throw InvalidArgument("constant curvature estimate needs at least two points");
  const std::size_t n = m.dim();
  std::vector<RiemannTensor> tensors;
  for (const Point& p : points) {
    try {
      tensors.push_back(riemann_tensor(m, p));
    } catch (const SingularEvaluation&) {
    }
  }
  if (tensors.empty()) return std::nullopt;

  auto gmax2 = [&](const RiemannTensor& r) {
    double mx = 0.0;
    for (std::size_t a = 0; a < n; ++a) mx = std::max(mx, std::abs(r.g(a)));
    return mx * mx;
  };

  double kappa = 0.0;
  bool fitted = false;
  for (const RiemannTensor& r : tensors) {
    const double scale = gmax2(r);
    for (std::size_t i = 0; i < n && !fitted; ++i) {
      for (std::size_t j = i + 1; j < n && !fitted; ++j) {
        if (std::abs(r(i, j, i, j)) > tol * scale) {
          kappa = r(i, j, i, j) / (r.g(i) * r.g(j));
          fitted = true;
        }
      }
    }
    if (fitted) break;
  }

  for (const RiemannTensor& r : tensors) {
    const double scale = gmax2(r);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          for (std::size_t l = 0; l < n; ++l) {
            const double gikjl = (i == k && j == l) ? r.g(i) * r.g(j) : 0.0;
            const double giljk = (i == l && j == k) ? r.g(i) * r.g(j) : 0.0;
            const double model = kappa * (gikjl - giljk);
            if (std::abs(r(i, j, k, l) - model) > tol * scale) return std::nullopt;
          }
        }
      }
    }
  }
  return kappa;
}

std::optional<double> constant_curvature_estimate(const OrthogonalMetric& m,
                                                  const SampleOptions& options) {
  std::vector<Point> points;
  for_each_regular_point(m.box(), std::max(options.samples, 2), options.seed,
                         [&](std::span<const double> p) {
                           metric_values(m, p);
                           riemann_tensor(m, p);
                           points.emplace_back(p.begin(), p.end());
                         });
  return constant_curvature_estimate(m, points, options.tol);
}

}  // namespace kemweb
