#include "kemweb_cli/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kemweb/concircular.hpp"
#include "kemweb/dsl.hpp"

namespace kemweb::cli {

namespace {

struct Config {
  std::string file;
  int samples = 50;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  bool json = false;
  std::string point;
  std::vector<std::string> components;
  std::vector<std::string> l_entries;
  std::vector<std::string> k_entries;
  bool k_metric = false;
  bool canonical = false;
  std::string example;
  std::string output;

  SampleOptions options() const { return {samples, tol, seed}; }
};

// Thrown for bad command-line input detected after argument parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Command {
 public:
  Command(const Config& cfg, std::string name, std::ostream& out, std::ostream& err)
      : cfg_(cfg), out_(out), err_(err) {
    report_.command = std::move(name);
    report_.options = cfg.options();
  }

  int run(const std::function<int(Report&)>& body) {
    int code = kOk;
    try {
      code = body(report_);
    } catch (const ResidualViolation& e) {
      report_.residuals = e.report();
      code = fail(kCheckFailed, e.what());
    } catch (const InconsistentWeb& e) {
      code = fail(kCheckFailed, e.what());
    } catch (const ParseError& e) {
      code = fail(kUsageOrParse, std::string("parse error: ") + e.what());
    } catch (const UsageError& e) {
      code = fail(kUsageOrParse, e.what());
    } catch (const InvalidArgument& e) {
      code = fail(kUsageOrParse, std::string("invalid input: ") + e.what());
    } catch (const DuplicateE& e) {
      code = fail(kUsageOrParse, std::string("invalid input: ") + e.what());
    } catch (const TrivialTensor& e) {
      code = fail(kUsageOrParse, std::string("invalid input: ") + e.what());
    } catch (const Error& e) {
      code = fail(kNumeric, std::string("numeric error: ") + e.what());
    }
    if (report_.verdict.empty()) report_.verdict = code == kOk ? "pass" : "fail";
    out_ << emit_report(report_, cfg_.json ? ReportFormat::Json : ReportFormat::Text);
    return code;
  }

  // Loads the input file, filling digest and coordinate names.
  MetricFile load(Report& r) {
    const std::string text = read_file(cfg_.file);
    r.input_digest = input_digest(text);
    MetricFile f = parse_metric_file(text);
    r.coordinates = f.coords;
    return f;
  }

 private:
  int fail(int code, const std::string& message) {
    err_ << "kemweb: " << message << '\n';
    report_.messages.push_back(message);
    report_.verdict = code == kCheckFailed ? "fail" : "error";
    return code;
  }

  const Config& cfg_;
  std::ostream& out_;
  std::ostream& err_;
  Report report_;
};

int cmd_check(const Config& cfg, std::ostream& out, std::ostream& err) {
  Command c(cfg, "check", out, err);
  return c.run([&](Report& r) {
    const MetricFile f = c.load(r);
    const OrthogonalMetric m = metric_from_file(f, cfg.options());
    r.conditions.push_back(check_levi_civita(m, cfg.options()));
    r.conditions.push_back(check_diagonal_curvature(m, cfg.options()));
    ConditionReport mixed = check_mixed_log_partials(m, cfg.options());
    mixed.notes.push_back("informational; the verdict uses levi_civita and diagonal_curvature");
    const bool ok = r.conditions[0].pass && r.conditions[1].pass;
    r.conditions.push_back(std::move(mixed));
    for (const ConditionReport& x : r.conditions) {
      if (!x.pass && x.name != "mixed_log_partials") r.messages.push_back("condition failed: " + x.name);
    }
    return ok ? kOk : kCheckFailed;
  });
}

int cmd_classify(const Config& cfg, std::ostream& out, std::ostream& err) {
  Command c(cfg, "classify", out, err);
  return c.run([&](Report& r) {
    const MetricFile f = c.load(r);
    if (f.mode != FileMode::Sigma && f.mode != FileMode::Family) {
      throw UsageError("classify needs a sigma- or family-mode file");
    }
    const SigmaWeb w = web_from_file(f);
    ClassificationTree tree = classify(w, cfg.options());
    r.residuals = tree.residuals;
    r.classification = std::move(tree);
    return kOk;
  });
}

// "i j : expr" -> (i, j, expr) over the file's coordinates.
void add_component(SymTensorField& t, const std::string& entry, const MetricFile& f) {
  const auto colon = entry.find(':');
  if (colon == std::string::npos) throw UsageError("tensor component '" + entry + "' needs the form 'i j : expr'");
  std::istringstream idx(entry.substr(0, colon));
  std::string a;
  std::string b;
  std::string extra;
  idx >> a >> b >> extra;
  auto index = [&](const std::string& name) {
    for (std::size_t i = 0; i < f.coords.size(); ++i) {
      if (f.coords[i] == name) return i;
    }
    throw UsageError("tensor component names unknown coordinate '" + name + "'");
  };
  if (a.empty() || b.empty() || !extra.empty()) throw UsageError("tensor component '" + entry + "' needs two indices");
  t.set(index(a), index(b), parse_expression(entry.substr(colon + 1), f.coords));
}

int cmd_verify_ct(const Config& cfg, std::ostream& out, std::ostream& err) {
  Command c(cfg, "verify-ct", out, err);
  return c.run([&](Report& r) {
    const MetricFile f = c.load(r);
    const OrthogonalMetric m = metric_from_file(f, cfg.options());
    const bool explicit_l = !cfg.l_entries.empty();
    const bool want_k = !cfg.k_entries.empty() || cfg.k_metric;
    bool canonical = cfg.canonical;
    if (!explicit_l && !want_k) {
      if (f.mode != FileMode::Family) {
        throw UsageError("verify-ct needs --L, --K, --K-metric, or a family-mode file");
      }
      canonical = true;
    }
    if (explicit_l) {
      SymTensorField l(m.dim());
      for (const std::string& s : cfg.l_entries) add_component(l, s, f);
      r.conditions.push_back(verify_concircular(l, m, cfg.options()));
    }
    if (canonical) {
      const ConcircularTensor ct = build_ct(sckt_from_file(f));
      ConditionReport rep = verify_concircular(covariant_form(ct, m), m, cfg.options());
      rep.name = "concircular_canonical";
      r.conditions.push_back(std::move(rep));
    }
    if (cfg.k_metric) {
      ConditionReport rep = verify_killing(metric_tensor(m), m, cfg.options());
      rep.name = "killing_metric";
      r.conditions.push_back(std::move(rep));
    }
    if (!cfg.k_entries.empty()) {
      SymTensorField k(m.dim());
      for (const std::string& s : cfg.k_entries) add_component(k, s, f);
      r.conditions.push_back(verify_killing(k, m, cfg.options()));
    }
    bool ok = true;
    for (const ConditionReport& x : r.conditions) {
      if (!x.pass) {
        ok = false;
        r.messages.push_back("condition failed: " + x.name);
      }
    }
    return ok ? kOk : kCheckFailed;
  });
}

Point parse_point(const std::string& entry, const MetricFile& f) {
  Point p = f.box().center();
  if (entry.empty()) return p;
  std::istringstream in(entry);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("point entry '" + item + "' needs the form name=value");
    std::istringstream name_in(item.substr(0, eq));
    std::string name;
    name_in >> name;
    std::size_t i = 0;
    while (i < f.coords.size() && f.coords[i] != name) ++i;
    if (i == f.coords.size()) throw UsageError("point names unknown coordinate '" + name + "'");
    const Expr v = parse_expression(item.substr(eq + 1), {});
    if (!v.is_constant()) throw UsageError("point value of '" + name + "' is not a constant");
    p[i] = v.value();
  }
  return p;
}

int cmd_curvature(const Config& cfg, std::ostream& out, std::ostream& err) {
  Command c(cfg, "curvature", out, err);
  return c.run([&](Report& r) {
    const MetricFile f = c.load(r);
    const OrthogonalMetric m = metric_from_file(f, cfg.options());
    const Point p = parse_point(cfg.point, f);
    if (!m.box().contains(p)) throw SingularEvaluation("point lies outside the coordinate domain");
    const std::size_t n = m.dim();
    const auto& names = m.names();

    const std::vector<double> g = metric_values(m, p);
    for (std::size_t i = 0; i < n; ++i) r.values.push_back({"g[" + names[i] + "]", g[i]});
    const ChristoffelTable gamma = christoffel(m, p);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j; k < n; ++k) {
          if (gamma(i, j, k) != 0.0) {
            r.values.push_back({"Gamma[" + names[i] + ";" + names[j] + "," + names[k] + "]", gamma(i, j, k)});
          }
        }
      }
    }
    const RiemannTensor rt = riemann_tensor(m, p);
    auto label = [&](std::size_t a, std::size_t b, std::size_t cc, std::size_t d) {
      return "R[" + names[a] + "," + names[b] + "," + names[cc] + "," + names[d] + "]";
    };
    if (cfg.components.empty()) {
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          for (std::size_t cc = a; cc < n; ++cc) {
            for (std::size_t d = cc + 1; d < n; ++d) {
              if (cc == a && d < b) continue;
              if ((cc == a && d == b) || rt(a, b, cc, d) != 0.0) r.values.push_back({label(a, b, cc, d), rt(a, b, cc, d)});
            }
          }
        }
      }
    }
    for (const std::string& entry : cfg.components) {
      std::istringstream in(entry);
      std::string item;
      std::vector<std::size_t> idx;
      while (std::getline(in, item, ',')) {
        std::istringstream t(item);
        std::string name;
        t >> name;
        const int i = m.index_of(name);
        if (i < 0) throw UsageError("component names unknown coordinate '" + name + "'");
        idx.push_back(static_cast<std::size_t>(i));
      }
      if (idx.size() != 4) throw UsageError("component '" + entry + "' needs four coordinate names");
      r.values.push_back({label(idx[0], idx[1], idx[2], idx[3]), rt(idx[0], idx[1], idx[2], idx[3])});
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        std::vector<double> x(n, 0.0);
        std::vector<double> y(n, 0.0);
        x[a] = 1.0;
        y[b] = 1.0;
        r.values.push_back({"K[" + names[a] + "," + names[b] + "]", rt.sectional(x, y)});
      }
    }
    const std::optional<double> kappa = constant_curvature_estimate(m, cfg.options().samples > 1 ? SampleOptions{cfg.samples, 1e-10, cfg.seed} : SampleOptions{});
    if (kappa) {
      r.values.push_back({"kappa", *kappa});
    } else {
      r.messages.push_back("metric does not have constant curvature on the sampled box");
    }

    bool ok = true;
    if (f.mode == FileMode::Warped) {
      const WarpedProductStructure w = warped_from_file(f);
      r.conditions.push_back(check_warped_curvature_formulas(w, cfg.options()));
      if (kappa) {
        r.conditions.push_back(check_constant_curvature_conditions(w, *kappa, cfg.options()));
        const Expr& g11 = w.base().component(0);
        if (w.base_dim() == 1 && g11.is_constant() && std::abs(g11.value()) == 1.0) {
          r.conditions.push_back(kem_base1_check(w, *kappa * g11.value(), cfg.options()));
        }
      }
      for (const ConditionReport& x : r.conditions) {
        if (!x.pass) {
          ok = false;
          r.messages.push_back("condition failed: " + x.name);
        }
      }
    }
    return ok ? kOk : kCheckFailed;
  });
}

int cmd_example(const Config& cfg, std::ostream& out, std::ostream& err) {
  const std::optional<std::string> text = example_text(cfg.example);
  if (!text) {
    err << "kemweb: unknown example '" << cfg.example << "'; known:";
    for (const std::string& n : example_names()) err << ' ' << n;
    err << '\n';
    return kUsageOrParse;
  }
  if (cfg.output.empty()) {
    out << *text;
    return kOk;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!(f << *text)) {
    err << "kemweb: cannot write '" << cfg.output << "'\n";
    return kUsageOrParse;
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Separable orthogonal webs: checks, classification, tensors and curvature", "kemweb"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--samples", cfg.samples, "Sample points per check (>= 4)")->check(CLI::Range(4, 1000000));
  app.add_option("--tol", cfg.tol, "Residual tolerance (> 0)")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Sampling seed");
  app.add_flag("--json", cfg.json, "Emit the report as JSON");

  auto* check = app.add_subcommand("check", "Levi-Civita and diagonal-curvature checks");
  check->add_option("file", cfg.file, "Input .web file")->required();
  auto* classify_cmd = app.add_subcommand("classify", "Classify a sigma- or family-mode web");
  classify_cmd->add_option("file", cfg.file, "Input .web file")->required();
  auto* verify = app.add_subcommand("verify-ct", "Verify concircular and Killing tensors");
  verify->add_option("file", cfg.file, "Input .web file")->required();
  verify->add_option("--L", cfg.l_entries, "Concircular tensor component 'i j : expr'");
  verify->add_option("--K", cfg.k_entries, "Killing tensor component 'i j : expr'");
  verify->add_flag("--K-metric", cfg.k_metric, "Verify the metric itself as a Killing tensor");
  verify->add_flag("--canonical", cfg.canonical, "Verify the canonical tensor of a family-mode file");
  auto* curvature = app.add_subcommand("curvature", "Curvature values at a point");
  curvature->add_option("file", cfg.file, "Input .web file")->required();
  curvature->add_option("--point", cfg.point, "Point as 'name=value,...' (default: box center)");
  curvature->add_option("--component", cfg.components, "Riemann component 'a,b,c,d'");
  auto* example = app.add_subcommand("example", "Write a built-in example file");
  example->add_option("name", cfg.example, "Example name")->required();
  example->add_option("-o,--output", cfg.output, "Output path (default: stdout)");

  std::vector<std::string> storage{"kemweb"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageOrParse;
  }

  if (check->parsed()) return cmd_check(cfg, out, err);
  if (classify_cmd->parsed()) return cmd_classify(cfg, out, err);
  if (verify->parsed()) return cmd_verify_ct(cfg, out, err);
  if (curvature->parsed()) return cmd_curvature(cfg, out, err);
  return cmd_example(cfg, out, err);
}

}  // namespace kemweb::cli
