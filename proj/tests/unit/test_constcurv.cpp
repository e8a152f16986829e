#include <gtest/gtest.h>
#include <kemweb/constcurv.hpp>

#include <cmath>
#include <numbers>

#include "spaces.hpp"

namespace kemweb {
namespace {

const Expr r = Expr::var(0, "r");

OrthogonalMetric line(Interval d = {1, 3}) { return OrthogonalMetric({"r"}, ChartBox({d}), {Expr(1.0)}); }

OrthogonalMetric circle(const std::string& name) {
  return OrthogonalMetric({name}, ChartBox({{0, 6}}), {Expr(1.0)});
}

WarpedProductStructure spherical_warped() { return {line(), {Fiber{testing::sphere_s2(), r}}}; }

TEST(Hessian, Cases) {
  const auto e = testing::euclidean(2);
  const Expr x = Expr::var(0, "x1"), y = Expr::var(1, "x2");
  for (double v : hessian(Expr(2.0) * x - y, e, Point{0.2, 0.3})) EXPECT_EQ(v, 0.0);
  const auto h = hessian((x * x + y * y) / Expr(2.0), e, Point{0.2, 0.3});
  EXPECT_EQ(h, (std::vector<double>{1, 0, 0, 1}));
  const auto s = hessian(r, testing::spherical_e3(), Point{2.0, std::numbers::pi / 3, 1.0});
  EXPECT_NEAR(s[1 * 3 + 1], 2.0, 1e-14);
}

TEST(MeanCurvature, Cases) {
  const WarpedProductStructure flat(line(), {Fiber{circle("u"), Expr(2.0)}});
  for (double v : mean_curvature_normal(flat, 0, Point{2.0, 1.0})) EXPECT_EQ(v, 0.0);
  const auto h = mean_curvature_normal(spherical_warped(), 0, Point{2.0, 1.0, 1.0});
  EXPECT_NEAR(h[0], -0.5, 1e-15);
}

TEST(WarpedProduct, AssembledSpherical) {
  const auto w = spherical_warped();
  EXPECT_EQ(w.assembled().dim(), 3U);
  EXPECT_EQ(w.offset(0), 1U);
  EXPECT_NEAR(*constant_curvature_estimate(w.assembled(), SampleOptions{}), 0.0, 1e-9);
}

TEST(WarpedProduct, RhoMustLiveOnBase) {
  EXPECT_THROW(WarpedProductStructure(line(), {Fiber{circle("u"), Expr::var(1, "u")}}), InvalidArgument);
}

TEST(WarpedFormulas, Cases) {
  EXPECT_TRUE(check_warped_curvature_formulas(spherical_warped()).pass);
  EXPECT_TRUE(check_warped_curvature_formulas({line(), {Fiber{testing::sphere_s2(), Expr(1.0)}}}).pass);
  const Expr rho = Expr(2.0) + sin(r);
  const ConditionReport rep =
      check_warped_curvature_formulas({line(), {Fiber{circle("u"), rho}, Fiber{circle("v"), rho}}});
  EXPECT_TRUE(rep.pass);
  bool cross = false;
  for (const auto& e : rep.entries) cross = cross || e.label == "cross_fiber_plane";
  EXPECT_TRUE(cross);
}

TEST(ConstantCurvature, SphericalFlat) {
  EXPECT_TRUE(check_constant_curvature_conditions(spherical_warped(), 0.0).pass);
}

TEST(ConstantCurvature, TwoRadialFibersAreNotFlat) {
  const ConditionReport rep = check_constant_curvature_conditions(
      {line(), {Fiber{testing::sphere_s2(), r}, Fiber{circle("u"), r}}}, 0.0);
  EXPECT_FALSE(rep.pass);
  bool flagged = false;
  for (const auto& e : rep.entries) flagged = flagged || (e.label == "cross_gradient" && e.max_abs > 0.1);
  EXPECT_TRUE(flagged);
}

TEST(ConstantCurvature, SpherePolar) {
  const WarpedProductStructure w(line({0.2, 1.3}), {Fiber{circle("u"), cos(r)}});
  EXPECT_TRUE(check_constant_curvature_conditions(w, 1.0).pass);
}

TEST(KemBase1, TwoAffineFibersFail) {
  const WarpedProductStructure w(line(), {Fiber{circle("u"), r}, Fiber{circle("v"), Expr(2.0) * r + Expr(3.0)}});
  EXPECT_FALSE(kem_base1_check(w, 0.0).pass);
}

TEST(KemBase1, SingleFibers) {
  EXPECT_TRUE(kem_base1_check({line(), {Fiber{circle("u"), r}}}, 0.0).pass);
  EXPECT_TRUE(kem_base1_check({line({0.2, 1.3}), {Fiber{circle("u"), cos(r)}}}, 1.0).pass);
}

TEST(KemBase1, ThreeSphere) {
  const WarpedProductStructure w(line({0.2, 1.3}), {Fiber{circle("u"), cos(r)}, Fiber{circle("v"), sin(r)}});
  const ConditionReport rep = kem_base1_check(w, 1.0);
  EXPECT_TRUE(rep.pass);
  for (const auto& e : rep.entries)
    if (e.label == "sigma_ratio") {
      EXPECT_LT(e.max_normalized, 1e-9);
    }
  EXPECT_TRUE(kem_base1_check(w).pass);  // omega fitted
  EXPECT_NEAR(*constant_curvature_estimate(w.assembled(), SampleOptions{}), 1.0, 1e-9);
}

TEST(KemBase1, RequiresOneDimensionalUnitBase) {
  const auto e = testing::euclidean(2);
  EXPECT_THROW(kem_base1_check({e, {Fiber{circle("u"), Expr(1.0)}}}), InvalidArgument);
}

}  // namespace
}  // namespace kemweb
