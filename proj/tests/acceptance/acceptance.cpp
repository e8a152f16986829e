// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <kemweb/canonical.hpp>
#include <kemweb/classify.hpp>
#include <kemweb/concircular.hpp>
#include <kemweb/constcurv.hpp>
#include <kemweb/dsl.hpp>
#include <kemweb/separability.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "generators.hpp"
#include "kemweb_cli/cli.hpp"
#include "spaces.hpp"

using namespace kemweb;
namespace t = kemweb::testing;
namespace fs = std::filesystem;

namespace {

constexpr int kSeeds = 20;

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& why) {
    if (!ok && pass) detail = why;
    pass = pass && ok;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<t::FamilyInstance> corpus_instances() {
  std::vector<t::FamilyInstance> out;
  for (const std::string& family : t::kFamilies) {
    for (int seed = 0; seed < kSeeds; ++seed) {
      t::Rng rng(1000 + std::uint64_t(seed));
      out.push_back(t::random_family(family, rng));
    }
  }
  return out;
}

// Webs of the built-in examples and reference spaces.
std::vector<SigmaWeb> example_webs() {
  std::vector<SigmaWeb> out{t::spherical_web(), t::euclidean_web(3)};
  for (const std::string name : {"spherical-e3", "warped-demo", "irregular-demo", "euclidean-4"}) {
    out.push_back(web_from_file(parse_metric_file(*cli::example_text(name))));
  }
  return out;
}

Outcome ac1() {
  Outcome o;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    t::Rng rng(10 + std::uint64_t(trial));
    const std::size_t n = trial % 2 == 0 ? 3 : 4;
    // Half generic diagonal metrics, half separable sigma-form metrics.
    const OrthogonalMetric m = trial < 5 ? t::random_generic_metric(rng, n)
                                         : to_metric(t::random_warped(rng).web);
    HaltonSampler s(m.box(), std::uint64_t(trial));
    Point p(m.dim());
    for (int k = 0; k < 20; ++k) {
      s.next(p);
      for (int i = 0; i < int(m.dim()); ++i)
        for (int j = 0; j < int(m.dim()); ++j)
          for (int l = 0; l < int(m.dim()); ++l) {
            if (i == j || j == l || i == l) continue;
            const double direct = riemann(m, p, j, i, i, l);
            const double closed = rjiik_closed_form(m, p, i, j, l);
            worst = std::max(worst, std::abs(direct - closed) / std::max(1.0, std::abs(direct)));
          }
    }
  }
  o.require(worst <= 1e-9, "relative deviation " + fmt(worst));
  o.detail = o.pass ? "max relative deviation " + fmt(worst) : o.detail;
  return o;
}

Outcome ac2() {
  Outcome o;
  auto near = [&](const OrthogonalMetric& m, double k, const std::string& name) {
    const auto est = constant_curvature_estimate(m, SampleOptions{});
    o.require(est && std::abs(*est - k) <= 1e-9, name + (est ? " kappa " + fmt(*est) : " not constant"));
  };
  near(t::euclidean(3), 0.0, "euclidean");
  near(t::spherical_e3(), 0.0, "spherical");
  near(t::elliptic_e2(), 0.0, "elliptic");
  near(t::sphere_s2(), 1.0, "sphere");
  if (o.pass) o.detail = "E^3 cartesian, spherical, elliptic -> 0; S^2 -> 1";
  return o;
}

Outcome ac3(const std::vector<t::FamilyInstance>& corpus) {
  Outcome o;
  double worst = 0.0;
  for (const auto& inst : corpus) {
    const OrthogonalMetric m = to_metric(inst.web);
    const double lc = check_levi_civita(m).max_normalized;
    const double dc = check_diagonal_curvature(m).max_normalized;
    const double rm = residuals_remain(inst.web).max_normalized;
    worst = std::max({worst, lc, dc, rm});
    o.require(lc < 1e-8 && dc < 1e-8 && rm < 1e-8, inst.family + " residual " + fmt(std::max({lc, dc, rm})));
  }
  if (o.pass) o.detail = std::to_string(corpus.size()) + " instances, max residual " + fmt(worst);
  return o;
}

Outcome ac4(const std::vector<t::FamilyInstance>& corpus) {
  Outcome o;
  int irregular = 0, incompatible = 0;
  for (const auto& inst : corpus) {
    const ClassificationTree tree = classify(inst.web);
    if (inst.kind == NodeKind::IrregularM1) {
      ++irregular;
      incompatible += inst.concircular_compatible ? 0 : 1;
    }
    o.require(tree.root.kind == inst.kind, inst.family + " classified as " + node_kind_name(tree.root.kind));
    o.require(block_partition(tree.root) == inst.blocks, inst.family + " block partition differs");
    if (inst.kind == NodeKind::IrregularM1) {
      o.require(tree.root.concircular_compatible == inst.concircular_compatible,
                "irregular compatibility flag differs");
    }
  }
  const auto sph = classify(t::spherical_web()).root;
  o.require(sph.kind == NodeKind::IrregularM1 && sph.concircular_compatible, "spherical E^3");
  const Expr r = Expr::var(0, "r");
  const SigmaWeb demo =
      irregular_metric({"r", {1, 2}, 1, Expr(), Expr(1.0)}, {{pow(r, 2.0), line_web("u", {0, 1})}, {exp(r), line_web("v", {0, 1})}});
  const auto d = classify(demo).root;
  o.require(d.kind == NodeKind::IrregularM1 && !d.concircular_compatible, "exp/r^2 irregular demo");
  if (o.pass) {
    o.detail = std::to_string(corpus.size()) + " round trips exact (" + std::to_string(irregular) + " irregular, " +
               std::to_string(incompatible) + " incompatible); spherical and exp/r^2 flags as expected";
  }
  return o;
}

SigmaWeb closure_web() {
  // D[0][1] and D[1][2] only: 0 ~ 1 ~ 2 but 0 and 2 are not directly connected.
  std::vector<Expr> sigma(9);
  sigma[0 * 3 + 1] = Expr::var(0, "x1");
  sigma[1 * 3 + 2] = Expr::var(1, "x2");
  return SigmaWeb({"x1", "x2", "x3"}, ChartBox({{1, 2}, {1, 2}, {1, 2}}), {1, 1, 1},
                  {Expr(1.0), Expr(1.0), Expr(1.0)}, sigma);
}

Outcome ac5(const std::vector<t::FamilyInstance>& corpus) {
  Outcome o;
  int checked = 0;
  auto check = [&](const SigmaWeb& w) {
    if (!residuals_remain(w).pass) return;
    ++checked;
    o.require(!equivalence_classes(dependency_pattern(w)).relation.closure_applied, "closure needed on a valid web");
  };
  for (const auto& inst : corpus) check(inst.web);
  for (const auto& w : example_webs()) check(w);
  const SigmaWeb bad = closure_web();
  o.require(!residuals_remain(bad).pass, "closure witness satisfies remain");
  o.require(equivalence_classes(dependency_pattern(bad)).relation.closure_applied, "closure witness is transitive");
  if (o.pass) o.detail = std::to_string(checked) + " valid webs transitive; remain-violating witness needs closure";
  return o;
}

Outcome ac6(const std::vector<t::FamilyInstance>& corpus) {
  Outcome o;
  int connected = 0;
  auto check = [&](const SigmaWeb& w) {
    if (!residuals_remain(w).pass) return;
    const DependencyPattern d = dependency_pattern(w);
    if (equivalence_classes(d).classes.size() != 1 || w.dim() < 2) return;
    ++connected;
    const auto m = connecting_set(d), s = strong_set(d);
    o.require(!m.empty(), "empty connecting set");
    o.require(std::includes(s.begin(), s.end(), m.begin(), m.end()), "M not inside S");
  };
  for (const auto& inst : corpus) check(inst.web);
  for (const auto& w : example_webs()) check(w);
  if (o.pass) o.detail = std::to_string(connected) + " connected webs with nonempty M inside S";
  return o;
}

Outcome ac7() {
  Outcome o;
  double worst = 0.0;
  for (int seed = 0; seed < kSeeds; ++seed) {
    t::Rng rng(700 + std::uint64_t(seed));
    const SCKTData d = t::random_sckt(rng);
    const OrthogonalMetric m = to_metric(sckt_metric(d));
    const SymTensorField l = covariant_form(build_ct(d), m);
    const ConditionReport r = verify_concircular(l, m);
    worst = std::max(worst, r.max_normalized);
    o.require(r.max_normalized < 1e-8, "residual " + fmt(r.max_normalized));
    Covector alpha = alpha_from_trace(l, m);
    const std::size_t k = std::size_t(rng.integer(0, int(m.dim()) - 1));
    alpha[k] = alpha[k] + Expr(1e-3);
    o.require(!verify_concircular_against(l, m, alpha).pass, "perturbed alpha accepted");
  }
  if (o.pass) o.detail = "20 instances, max residual " + fmt(worst) + "; every perturbed alpha rejected";
  return o;
}

OrthogonalMetric piece(t::Rng& rng, std::size_t n, std::size_t first) {
  return t::random_generic_metric(rng, n, first);
}

Outcome ac8() {
  Outcome o;
  std::size_t planes = 0;
  for (int trial = 0; trial < 10; ++trial) {
    t::Rng rng(800 + std::uint64_t(trial));
    const std::size_t d0 = std::size_t(rng.integer(1, 2));
    const OrthogonalMetric base = piece(rng, d0, 0);
    std::vector<Fiber> fibers;
    std::size_t next = d0;
    const int count = rng.integer(1, 2);
    for (int f = 0; f < count; ++f) {
      const std::size_t dim = std::size_t(rng.integer(1, 2));
      Expr rho = t::random_positive(rng, base.var(0), rng.integer(0, 3));
      if (d0 == 2) rho = rho * t::random_positive(rng, base.var(1), rng.integer(0, 3));
      fibers.push_back({piece(rng, dim, next), rho});
      next += dim;
    }
    const ConditionReport r = check_warped_curvature_formulas(WarpedProductStructure(base, fibers), {50, 1e-8, 0});
    o.require(r.pass, "formula deviation " + fmt(r.max_normalized));
    planes += r.entries.size();
  }
  const Expr r = Expr::var(0, "r");
  auto line = [](Interval d) { return OrthogonalMetric({"r"}, ChartBox({d}), {Expr(1.0)}); };
  auto circle = [](const std::string& n) { return OrthogonalMetric({n}, ChartBox({{0, 6}}), {Expr(1.0)}); };
  struct Case {
    WarpedProductStructure w;
    double omega;
  };
  const std::vector<Case> cases{
      {WarpedProductStructure(line({1, 3}), {Fiber{circle("u"), r}}), 0.0},
      {WarpedProductStructure(line({1, 3}), {Fiber{circle("u"), Expr(2.0) * r + Expr(3.0)}}), 0.0},
      {WarpedProductStructure(line({0.2, 1.3}), {Fiber{circle("u"), cos(r)}}), 1.0},
      {WarpedProductStructure(line({0.2, 1.3}), {Fiber{circle("u"), cos(r)}, Fiber{circle("v"), sin(r)}}), 1.0},
  };
  for (const Case& c : cases) {
    o.require(check_constant_curvature_conditions(c.w, c.omega).pass, "constant-curvature conditions");
    const ConditionReport k = kem_base1_check(c.w, c.omega);
    o.require(k.pass, "kem_base1 residual " + fmt(k.max_normalized));
    for (const auto& e : k.entries)
      if (e.label == "sigma_ratio") o.require(e.max_normalized < 1e-9, "sigma ratio " + fmt(e.max_normalized));
  }
  if (o.pass) {
    o.detail = "10 random warped products match on " + std::to_string(planes) +
               " plane families; 4 one-dimensional-base instances pass";
  }
  return o;
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / "kemweb_acceptance";
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

int run(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run_cli(args, o, e);
  if (out) *out = o.str();
  return code;
}

Outcome ac9(const TempDir& dir) {
  Outcome o;
  o.require(!check_levi_civita(t::lc_violator()).pass, "diag(1, 1 + x1 x2^2) passes Levi-Civita");
  const OrthogonalMetric e = t::exp_violator();
  o.require(!check_diagonal_curvature(e).pass, "exp(x1 x2) passes diagonal curvature");
  const ConditionReport mixed = check_mixed_log_partials(e);
  o.require(std::abs(mixed.max_abs - 1.0) < 1e-12, "mixed partial residual " + fmt(mixed.max_abs));
  // R_3113 = g_33 (3 dd - B) / 4, B the second Levi-Civita residual, dd = 1.
  HaltonSampler s(e.box(), 0);
  Point p(3);
  for (int k = 0; k < 20; ++k) {
    s.next(p);
    const LogDerivatives ld = log_derivatives(e, p);
    const double dd = ld.dd(2, 0, 1);
    const double b = dd - ld.d(2, 0) * ld.d(2, 1) + ld.d(2, 0) * ld.d(0, 1) + ld.d(2, 1) * ld.d(1, 0);
    const double direct = riemann(e, p, 0, 2, 2, 1);
    const double g = metric_values(e, p)[2];
    o.require(std::abs(dd - 1.0) < 1e-12, "mixed partial is not 1");
    o.require(std::abs(direct - g * (3 * dd - b) / 4) <= 1e-9 * std::max(1.0, std::abs(direct)), "proportionality");
    o.require(std::abs(direct) > 1e-6, "R_jiik vanishes");
  }
  const std::string lc = dir.write("lc.web",
                                   "dim 2\ncoords x1 x2\ndomain x1 1 2\ndomain x2 1 2\nsign x1 +\nsign x2 +\n"
                                   "mode raw\ngii x1 : 1\ngii x2 : 1 + x1*x2^2\n");
  const std::string ex = dir.write("exp.web",
                                   "dim 3\ncoords x1 x2 x3\ndomain x1 1 2\ndomain x2 1 2\ndomain x3 0 1\n"
                                   "sign x1 +\nsign x2 +\nsign x3 +\nmode raw\ngii x1 : 1\ngii x2 : 1\n"
                                   "gii x3 : exp(x1*x2)\n");
  const std::string rv = dir.write("remain.web",
                                   "dim 3\ncoords x1 x2 x3\ndomain x1 1 2\ndomain x2 1 2\ndomain x3 1 2\n"
                                   "sign x1 +\nsign x2 +\nsign x3 +\nmode sigma\nphi x1 : 1\nphi x2 : 1\nphi x3 : 1\n"
                                   "sigma x1 x2 : x1\nsigma x2 x1 : x2^2\nsigma x3 x1 : x3\n");
  const std::string sph = dir.write("sph.web", *cli::example_text("spherical-e3"));
  o.require(run({"check", lc}) != 0, "cli check lc");
  o.require(run({"check", ex}) != 0, "cli check exp");
  o.require(run({"classify", rv}) != 0, "cli classify remain violator");
  o.require(run({"verify-ct", sph, "--L", "r r : r^3"}) != 0, "cli verify-ct r^3");
  o.require(run({"check", dir.write("bad.web", "dim 1\n")}) != 0, "cli malformed");
  if (o.pass) o.detail = "negatives fail; R_jiik = 3 g dd / 4 - g B / 4 with dd = 1; CLI exits nonzero";
  return o;
}

Outcome ac10(const TempDir& dir) {
  Outcome o;
  std::vector<std::vector<std::string>> commands;
  for (const std::string name : {"spherical-e3", "elliptic-e2", "sphere-s2", "warped-demo", "irregular-demo", "warped-s3", "euclidean-3"}) {
    const std::string f = dir.write(name + ".web", *cli::example_text(name));
    commands.push_back({"--json", "--seed", "7", "check", f});
    commands.push_back({"--json", "curvature", f});
    commands.push_back({"--json", "verify-ct", f, "--K-metric"});
    commands.push_back({"--json", "classify", f});
    commands.push_back({"example", name});
  }
  for (const auto& c : commands) {
    std::string a, b;
    const int ca = run(c, &a), cb = run(c, &b);
    o.require(ca == cb && a == b && !a.empty(), "output differs for " + c[c.size() - 2]);
  }
  if (o.pass) o.detail = std::to_string(commands.size()) + " invocations byte-identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<t::FamilyInstance> corpus = corpus_instances();
  const TempDir dir;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 curvature closed form", ac1},
      {"AC2 known-space curvature", ac2},
      {"AC3 canonical families separable", [&] { return ac3(corpus); }},
      {"AC4 classification round trip", [&] { return ac4(corpus); }},
      {"AC5 connection relation transitive", [&] { return ac5(corpus); }},
      {"AC6 connecting coordinates", [&] { return ac6(corpus); }},
      {"AC7 concircular tensors", ac7},
      {"AC8 warped-product formulas", ac8},
      {"AC9 negative battery", [&] { return ac9(dir); }},
      {"AC10 deterministic output", [&] { return ac10(dir); }},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
