#pragma once

#include <kemweb/metric.hpp>

#include <functional>
#include <vector>

// Finite-difference oracles that only ever evaluate g_ii, independent of the
// symbolic Christoffel and curvature assembly.
namespace kemweb::testing {

// Fourth-order central difference of f along coordinate k.
inline double fd_partial(const std::function<double(const Point&)>& f, Point p, std::size_t k,
                         double h = 1e-3) {
  const double x = p[k];
  auto at = [&](double t) {
    p[k] = x + t * h;
    return f(p);
  };
  return (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
}

// Gamma^i_jk from differences of metric values.
inline std::vector<double> fd_christoffel(const OrthogonalMetric& m, const Point& p, double h = 1e-3) {
  const std::size_t n = m.dim();
  std::vector<double> dg(n * n);  // [i][k] = d_k g_ii
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      dg[i * n + k] = fd_partial([&](const Point& q) { return metric_values(m, q)[i]; }, p, k, h);
    }
  }
  const std::vector<double> g = metric_values(m, p);
  std::vector<double> gamma(n * n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        // Gamma^i_jk = g^ii (d_j g_ik + d_k g_ij - d_i g_jk) / 2 on a diagonal metric.
        double s = 0.0;
        if (i == k) s += dg[i * n + j];
        if (i == j) s += dg[i * n + k];
        if (j == k) s -= dg[j * n + i];
        gamma[(i * n + j) * n + k] = 0.5 * s / g[i];
      }
    }
  }
  return gamma;
}

// R_abcd = g_aa (d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb).
inline double fd_riemann(const OrthogonalMetric& m, const Point& p, std::size_t a, std::size_t b,
                         std::size_t c, std::size_t d, double h = 2e-3) {
  const std::size_t n = m.dim();
  auto gam = [&](const Point& q, std::size_t i, std::size_t j, std::size_t k) {
    return fd_christoffel(m, q, h / 4)[(i * n + j) * n + k];
  };
  const std::vector<double> G = fd_christoffel(m, p, h / 4);
  auto G3 = [&](std::size_t i, std::size_t j, std::size_t k) { return G[(i * n + j) * n + k]; };
  double r = fd_partial([&](const Point& q) { return gam(q, a, d, b); }, p, c, h) -
             fd_partial([&](const Point& q) { return gam(q, a, c, b); }, p, d, h);
  for (std::size_t e = 0; e < n; ++e) r += G3(a, c, e) * G3(e, d, b) - G3(a, d, e) * G3(e, c, b);
  return metric_values(m, p)[a] * r;
}

}  // namespace kemweb::testing
