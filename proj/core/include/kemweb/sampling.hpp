#pragma once

#include <cstdint>
#include <span>

#include "kemweb/errors.hpp"
#include "kemweb/expr.hpp"

namespace kemweb {

/// Sampling parameters shared by every sampled check.
struct SampleOptions {
  int samples = 50;
  double tol = 1e-8;
  std::uint64_t seed = 0;
};

/// Deterministic low-discrepancy points in the interior of a box.
///
/// Coordinates follow the Halton sequence (one prime base per dimension).
/// A non-zero seed applies a Cranley-Patterson rotation derived from the seed,
/// so different seeds give different but equally well-spread point sets.
class HaltonSampler {
 public:
  HaltonSampler(const ChartBox& box, std::uint64_t seed = 0);

  /// Writes the next point into `out` (size box.dim()).
  void next(std::span<double> out);

 private:
  ChartBox box_;
  std::vector<double> shift_;
  std::uint64_t index_ = 1;
};

/// Radical inverse of `index` in base `base`, in [0, 1).
double radical_inverse(std::uint64_t index, unsigned base);

/// Calls fn(point) on `samples` regular points of the box. A call that throws
/// SingularEvaluation marks the point singular; it is skipped and replaced by
/// the next point of the sequence. Throws InsufficientSamples as soon as more
/// than half of the requested count has been singular. Returns the number of
/// regular points visited (== samples on success).
template <class Fn>
int for_each_regular_point(const ChartBox& box, int samples, std::uint64_t seed, Fn&& fn) {
  if (samples < 1) throw InvalidArgument("sample count must be at least 1");
  HaltonSampler sampler(box, seed);
  Point p(box.dim());
  int good = 0;
  int singular = 0;
  while (good < samples) {
    sampler.next(p);
    try {
      fn(std::span<const double>(p));
      ++good;
    } catch (const SingularEvaluation&) {
      if (++singular > samples / 2) {
        throw InsufficientSamples("more than half of " + std::to_string(samples) +
                                  " sample points are singular");
      }
    }
  }
  return good;
}

}  // namespace kemweb
