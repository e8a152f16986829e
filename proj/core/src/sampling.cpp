#include "kemweb/sampling.hpp"

#include <array>
#include <cmath>

namespace kemweb {

namespace {

constexpr std::array<unsigned, kMaxCoordinates> kPrimes{
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double radical_inverse(std::uint64_t index, unsigned base) {
  const double inv = 1.0 / base;
  double scale = inv;
  double r = 0.0;
  while (index > 0) {
    r += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv;
  }
  return r;
}

HaltonSampler::HaltonSampler(const ChartBox& box, std::uint64_t seed)
    : box_(box), shift_(box.dim(), 0.0) {
  if (box.dim() > kPrimes.size()) throw InvalidArgument("too many coordinates for sampling");
  if (seed != 0) {
    for (std::size_t d = 0; d < shift_.size(); ++d) {
      shift_[d] = static_cast<double>(splitmix64(seed * 0x100000001b3ULL + d) >> 11) * 0x1.0p-53;
    }
  }
}

void HaltonSampler::next(std::span<double> out) {
  for (std::size_t d = 0; d < box_.dim(); ++d) {
    double u = radical_inverse(index_, kPrimes[d]) + shift_[d];
    u -= std::floor(u);
    out[d] = box_[d].lo + u * (box_[d].hi - box_[d].lo);
  }
  ++index_;
}

bool depends_on(const Expr& e, int index, const ChartBox& box, const ConstancyTest& test) {
  if (!e.mentions(index)) return false;
  const Expr de = differentiate(e, index);
  if (de.is_zero()) return false;
  double max_value = 0.0;
  double max_slope = 0.0;
  for_each_regular_point(box, test.samples, test.seed, [&](std::span<const double> p) {
    const double v = evaluate(e, p);
    const double s = evaluate(de, p);
    max_value = std::max(max_value, std::abs(v));
    max_slope = std::max(max_slope, std::abs(s));
  });
  return max_slope > test.rel_tol * max_value;
}

bool is_identically_zero(const Expr& e, const ChartBox& box, int samples, double tol,
                         std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("sample count must be at least 1");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (e.is_zero()) return true;
  bool zero = true;
  for_each_regular_point(box, samples, seed, [&](std::span<const double> p) {
    if (std::abs(evaluate(e, p)) > tol) zero = false;
  });
  return zero;
}

}  // namespace kemweb
