#include <gtest/gtest.h>
#include <kemweb/web.hpp>

#include <cmath>

#include "generators.hpp"
#include "spaces.hpp"

namespace kemweb {
namespace {

std::vector<Expr> zeros(std::size_t n) { return std::vector<Expr>(n * n); }

TEST(SigmaWeb, TwoDimensionalIrreducible) {
  const Expr x1 = Expr::var(0, "x1"), x2 = Expr::var(1, "x2");
  auto sigma = zeros(2);
  sigma[0 * 2 + 1] = pow(x1, 2.0);
  sigma[1 * 2 + 0] = -pow(x2, 2.0);
  const SigmaWeb w({"x1", "x2"}, ChartBox({{2, 3}, {0.5, 1.5}}), {1, 1}, {Expr(1.0), Expr(1.0)}, sigma);
  const auto m = to_metric(w);
  for (const Point& p : {Point{2.2, 0.7}, Point{2.9, 1.4}}) {
    const double expect = p[0] * p[0] - p[1] * p[1];
    EXPECT_NEAR(metric_values(m, p)[0], expect, 1e-14);
    EXPECT_NEAR(metric_values(m, p)[1], expect, 1e-14);
  }
}

TEST(SigmaWeb, AllZeroSigmaIsCartesian) {
  const auto m = to_metric(testing::euclidean_web(3));
  for (const Expr& g : m.components()) EXPECT_TRUE(g.is_constant(1.0));
  EXPECT_FALSE(testing::euclidean_web(3).has_pair_factor(0, 1));
  EXPECT_TRUE(testing::euclidean_web(3).pair_factor(0, 1).is_constant(1.0));
}

TEST(SigmaWeb, SphericalScaleFactors) {
  const auto w = testing::spherical_web();
  const auto m = to_metric(w);
  testing::Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const Point p{rng.uniform(1, 3), rng.uniform(0.3, 2.8), rng.uniform(0, 6)};
    const auto g = metric_values(m, p);
    EXPECT_NEAR(g[0], 1.0, 1e-12);
    EXPECT_NEAR(g[1], p[0] * p[0], 1e-12);
    EXPECT_NEAR(g[2], p[0] * p[0] * std::pow(std::sin(p[1]), 2), 1e-12);
  }
}

TEST(SigmaWeb, RejectsMultivariateSigma) {
  const Expr x1 = Expr::var(0, "x1"), x2 = Expr::var(1, "x2");
  auto sigma = zeros(2);
  sigma[1] = x1 * x2;
  EXPECT_THROW(SigmaWeb({"x1", "x2"}, ChartBox({{1, 2}, {1, 2}}), {1, 1}, {Expr(1.0), Expr(1.0)}, sigma),
               InvalidArgument);
}

TEST(SigmaWeb, RejectsVanishingPairFactor) {
  const Expr x1 = Expr::var(0, "x1"), x2 = Expr::var(1, "x2");
  auto sigma = zeros(2);
  sigma[0 * 2 + 1] = x1;
  sigma[1 * 2 + 0] = -x2;
  EXPECT_THROW(SigmaWeb({"x1", "x2"}, ChartBox({{1, 2}, {1, 2}}), {1, 1}, {Expr(1.0), Expr(1.0)}, sigma),
               VanishingFactor);
}

TEST(Dependency, Patterns) {
  const DependencyPattern zero = dependency_pattern(testing::euclidean_web(3));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_FALSE(zero(i, j));

  const DependencyPattern s = dependency_pattern(testing::spherical_web());
  EXPECT_TRUE(s(0, 1));
  EXPECT_TRUE(s(0, 2));
  EXPECT_TRUE(s(1, 2));
  EXPECT_FALSE(s(1, 0));
  EXPECT_FALSE(s(2, 0));
  EXPECT_FALSE(s(2, 1));
}

TEST(Dependency, IrreducibleLinearWebIsFull) {
  std::vector<std::string> names{"x1", "x2", "x3"};
  auto sigma = zeros(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i < j) sigma[i * 3 + j] = Expr::var(i, names[i]);
      if (i > j) sigma[i * 3 + j] = -Expr::var(i, names[i]);
    }
  const SigmaWeb w(names, ChartBox({{1, 1.5}, {2, 2.5}, {3, 3.5}}), {1, 1, 1},
                   {Expr(1.0), Expr(1.0), Expr(1.0)}, sigma);
  const DependencyPattern d = dependency_pattern(w);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) {
        EXPECT_TRUE(d(i, j));
      }
}

TEST(Remain, SphericalVanishes) {
  const ResidualReport r = residuals_remain(testing::spherical_web());
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.max_normalized, 1e-12);
  ASSERT_EQ(r.triples.size(), 1U);
}

SigmaWeb remain_violator() {
  std::vector<std::string> names{"x1", "x2", "x3"};
  auto sigma = zeros(3);
  sigma[0 * 3 + 1] = Expr::var(0, "x1");
  sigma[1 * 3 + 0] = pow(Expr::var(1, "x2"), 2.0);
  sigma[2 * 3 + 0] = Expr::var(2, "x3");
  return SigmaWeb(names, ChartBox({{1, 2}, {1, 2}, {1, 2}}), {1, 1, 1}, {Expr(1.0), Expr(1.0), Expr(1.0)}, sigma);
}

TEST(Remain, ViolatorFails) {
  const ResidualReport r = residuals_remain(remain_violator());
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.triples[0].pass);
  EXPECT_GT(r.max_abs, 1e-3);
}

TEST(Remain, VacuousBelowThree) {
  const ResidualReport r = residuals_remain(testing::euclidean_web(2));
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.triples.empty());
}

TEST(ValidateForm, Cases) {
  const auto spherical = testing::spherical_e3();
  EXPECT_TRUE(validate_form(spherical, testing::spherical_web()));
  EXPECT_TRUE(validate_form(testing::euclidean(3), testing::euclidean_web(3)));
  const OrthogonalMetric flat(spherical.names(), spherical.box(), {Expr(1.0), Expr(1.0), Expr(1.0)});
  EXPECT_FALSE(validate_form(flat, testing::spherical_web()));
}

TEST(Restrict, FreezesDroppedCoordinates) {
  const auto w = testing::spherical_web();
  const std::vector<int> keep{1, 2};
  const Point frozen{2.0, 1.0, 1.0};
  const SigmaWeb s = restrict_web(w, keep, frozen);
  ASSERT_EQ(s.dim(), 2U);
  EXPECT_EQ(s.names()[0], "theta");
  const auto g = metric_values(to_metric(s), Point{1.2, 0.5});
  EXPECT_NEAR(g[0], 4.0, 1e-12);
  EXPECT_NEAR(g[1], 4.0 * std::pow(std::sin(1.2), 2), 1e-12);
}

TEST(Permute, RelabelsMetric) {
  testing::Rng rng(4);
  const auto inst = testing::random_warped(rng);
  const std::size_t n = inst.web.dim();
  std::vector<int> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = int(n - 1 - i);
  const SigmaWeb p = permute_web(inst.web, perm);
  const auto a = to_metric(inst.web);
  const auto b = to_metric(p);
  const Point x = a.box().center();
  Point y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[std::size_t(perm[i])];
  const auto ga = metric_values(a, x), gb = metric_values(b, y);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(gb[i], ga[std::size_t(perm[i])], 1e-12 * std::abs(ga[std::size_t(perm[i])]));
}

}  // namespace
}  // namespace kemweb
