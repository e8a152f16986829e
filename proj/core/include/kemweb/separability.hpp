#pragma once

#include <string>
#include <vector>

#include "kemweb/metric.hpp"
#include "kemweb/sampling.hpp"

namespace kemweb {

/// Worst residual of one index tuple over all sample points.
struct ResidualEntry {
  std::string label;         // condition family, e.g. "triple"
  std::vector<int> indices;  // coordinate indices of the tuple
  double max_abs = 0.0;      // raw |residual|
  double max_normalized = 0.0;  // |residual| / (1 + max |additive term|)
};

/// Outcome of a sampled condition.
///
/// pass <=> every entry's max_normalized <= tol. Entries are listed in a fixed
/// order, so two runs with the same options produce identical reports.
struct ConditionReport {
  std::string name;
  std::vector<ResidualEntry> entries;
  double max_abs = 0.0;
  double max_normalized = 0.0;
  bool pass = true;
  int samples = 0;
  double tol = 0.0;
  std::vector<std::string> notes;

  /// Recomputes the maxima and pass flag from `entries`.
  void finalize();
};

/// Accumulates residuals into a report keyed by entry position.
class ResidualAccumulator {
 public:
  explicit ResidualAccumulator(ConditionReport& report) : report_(report) {}

  /// Adds one evaluation of entry `slot`; `terms` are the additive terms whose
  /// sum is the residual.
  void add(std::size_t slot, std::span<const double> terms);
  void add(std::size_t slot, std::initializer_list<double> terms) {
    add(slot, std::span<const double>(terms.begin(), terms.size()));
  }

 private:
  ConditionReport& report_;
};

/// Levi-Civita separability equations on sample points of the metric's box.
ConditionReport check_levi_civita(const OrthogonalMetric& m, const SampleOptions& options = {});

/// R_jiik = 0 for distinct i, j, k via the closed form (vacuous for n < 3).
ConditionReport check_diagonal_curvature(const OrthogonalMetric& m,
                                         const SampleOptions& options = {});

/// d_j d_k log H_i^2 = 0 for distinct i, j < k (vacuous for n < 3).
ConditionReport check_mixed_log_partials(const OrthogonalMetric& m,
                                         const SampleOptions& options = {});

bool is_kem_candidate(const OrthogonalMetric& m, const SampleOptions& options = {});

}  // namespace kemweb
