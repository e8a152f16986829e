#include "kemweb/separability.hpp"

#include <algorithm>
#include <cmath>

namespace kemweb {

void ConditionReport::finalize() {
  max_abs = 0.0;
  max_normalized = 0.0;
  for (const ResidualEntry& e : entries) {
    max_abs = std::max(max_abs, e.max_abs);
    max_normalized = std::max(max_normalized, e.max_normalized);
  }
  pass = max_normalized <= tol;
}

void ResidualAccumulator::add(std::size_t slot, std::span<const double> terms) {
  double sum = 0.0;
  double scale = 0.0;
  for (double t : terms) {
    sum += t;
    scale = std::max(scale, std::abs(t));
  }
  ResidualEntry& e = report_.entries[slot];
  e.max_abs = std::max(e.max_abs, std::abs(sum));
  e.max_normalized = std::max(e.max_normalized, std::abs(sum) / (1.0 + scale));
}

namespace {

ConditionReport make_report(std::string name, const SampleOptions& options) {
  ConditionReport r;
  r.name = std::move(name);
  r.tol = options.tol;
  return r;
}

}  // namespace

ConditionReport check_levi_civita(const OrthogonalMetric& m, const SampleOptions& options) {
  const std::size_t n = m.dim();
  ConditionReport report = make_report("levi_civita", options);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) report.entries.push_back({"pair", {int(i), int(j)}, 0.0, 0.0});
    }
  }
  // Ordered triples: the three-index equation is not symmetric in (j, k).
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (i != j && j != k && i != k) {
          report.entries.push_back({"triple", {int(i), int(j), int(k)}, 0.0, 0.0});
        }
      }
    }
  }
  if (report.entries.empty()) {
    report.notes.push_back("vacuous for n < 2");
    report.finalize();
    return report;
  }

  ResidualAccumulator acc(report);
  report.samples = for_each_regular_point(m.box(), options.samples, options.seed,
                                          [&](std::span<const double> p) {
    const LogDerivatives ld = log_derivatives(m, p);
    std::size_t slot = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        acc.add(slot++, {ld.dd(i, i, j), ld.d(i, j) * ld.d(j, i)});
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          if (i == j || j == k || i == k) continue;
          acc.add(slot++, {ld.dd(i, j, k), -ld.d(i, j) * ld.d(i, k), ld.d(i, j) * ld.d(j, k),
                           ld.d(i, k) * ld.d(k, j)});
        }
      }
    }
  });
  report.finalize();
  return report;
}

ConditionReport check_diagonal_curvature(const OrthogonalMetric& m, const SampleOptions& options) {
  const std::size_t n = m.dim();
  ConditionReport report = make_report("diagonal_curvature", options);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        if (i != j && i != k) report.entries.push_back({"Rjiik", {int(j), int(i), int(i), int(k)}, 0.0, 0.0});
      }
    }
  }
  if (report.entries.empty()) {
    report.notes.push_back("vacuous for n < 3");
    report.finalize();
    return report;
  }

  ResidualAccumulator acc(report);
  std::vector<double> terms(4);
  report.samples = for_each_regular_point(m.box(), options.samples, options.seed,
                                          [&](std::span<const double> p) {
    const LogDerivatives ld = log_derivatives(m, p);
    std::size_t slot = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          if (i == j || i == k) continue;
          // The bracket of the closed form; the prefactor e_i H_i^2 / 4 never
          // vanishes, so the bracket decides the condition scale-free.
          terms = {2.0 * ld.dd(i, j, k), ld.d(i, j) * ld.d(i, k), -ld.d(i, j) * ld.d(j, k),
                   -ld.d(i, k) * ld.d(k, j)};
          acc.add(slot++, terms);
        }
      }
    }
  });
  report.finalize();
  return report;
}

ConditionReport check_mixed_log_partials(const OrthogonalMetric& m, const SampleOptions& options) {
  const std::size_t n = m.dim();
  ConditionReport report = make_report("mixed_log_partials", options);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        if (i != j && i != k) report.entries.push_back({"mixed_partial", {int(i), int(j), int(k)}, 0.0, 0.0});
      }
    }
  }
  if (report.entries.empty()) {
    report.notes.push_back("vacuous for n < 3");
    report.finalize();
    return report;
  }

  ResidualAccumulator acc(report);
  report.samples = for_each_regular_point(m.box(), options.samples, options.seed,
                                          [&](std::span<const double> p) {
    const LogDerivatives ld = log_derivatives(m, p);
    std::size_t slot = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          if (i != j && i != k) acc.add(slot++, {ld.dd(i, j, k)});
        }
      }
    }
  });
  report.finalize();
  return report;
}

bool is_kem_candidate(const OrthogonalMetric& m, const SampleOptions& options) {
  return check_levi_civita(m, options).pass && check_diagonal_curvature(m, options).pass;
}

}  // namespace kemweb
