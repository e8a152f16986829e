#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "kemweb/dsl.hpp"
#include "kemweb/version.hpp"

namespace kemweb {

namespace {

using Json = nlohmann::ordered_json;

// Numbers with 17 significant digits; nlohmann handles strings and layout.
void write(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        write(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const Json& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        write(v, out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default: out += j.dump(); return;
  }
}

Json names_of(const std::vector<int>& idx, const std::vector<std::string>& coords) {
  Json a = Json::array();
  for (int i : idx) {
    const auto k = static_cast<std::size_t>(i);
    a.push_back(k < coords.size() ? coords[k] : std::to_string(i));
  }
  return a;
}

Json to_json(const ConditionReport& r, const std::vector<std::string>& coords) {
  Json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["samples"] = r.samples;
  j["tol"] = r.tol;
  j["max_residual"] = r.max_normalized;
  j["max_abs_residual"] = r.max_abs;
  Json entries = Json::array();
  for (const ResidualEntry& e : r.entries) {
    Json x;
    x["equation"] = e.label;
    x["indices"] = names_of(e.indices, coords);
    x["residual"] = e.max_normalized;
    x["abs_residual"] = e.max_abs;
    entries.push_back(std::move(x));
  }
  j["entries"] = std::move(entries);
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

Json to_json(const ResidualReport& r, const std::vector<std::string>& coords) {
  Json j;
  j["pass"] = r.pass;
  j["samples"] = r.samples;
  j["tol"] = r.tol;
  j["max_residual"] = r.max_normalized;
  j["max_abs_residual"] = r.max_abs;
  Json triples = Json::array();
  for (const TripleResidual& t : r.triples) {
    Json x;
    x["triple"] = names_of({t.i, t.j, t.k}, coords);
    x["pass"] = t.pass;
    x["remain_a"] = t.a;
    x["remain_b"] = t.b;
    x["remain_c"] = t.c;
    x["remain_det"] = t.det;
    triples.push_back(std::move(x));
  }
  j["triples"] = std::move(triples);
  return j;
}

Json to_json(const ClassificationNode& node, const std::vector<std::string>& coords) {
  Json j;
  j["kind"] = node_kind_name(node.kind);
  j["coords"] = names_of(node.coords, coords);
  switch (node.kind) {
    case NodeKind::Leaf:
    case NodeKind::Irreducible: break;
    case NodeKind::Product: {
      Json ch = Json::array();
      for (const auto& c : node.children) ch.push_back(to_json(c, coords));
      j["children"] = std::move(ch);
      break;
    }
    case NodeKind::WarpedProduct:
    case NodeKind::IrregularM1: {
      j["base"] = names_of(node.base, coords);
      j["concircular_compatible"] = node.concircular_compatible;
      Json blocks = Json::array();
      for (std::size_t b = 0; b < node.children.size(); ++b) {
        Json x;
        if (node.kind == NodeKind::WarpedProduct) {
          x["e"] = node.block_e[b];
        } else {
          x["sigma"] = to_string(node.block_sigma[b]);
        }
        x["node"] = to_json(node.children[b], coords);
        blocks.push_back(std::move(x));
      }
      j["blocks"] = std::move(blocks);
      break;
    }
  }
  if (!node.diagnostics.empty()) j["diagnostics"] = node.diagnostics;
  return j;
}

Json to_json(const ClassificationTree& t, const std::vector<std::string>& coords) {
  Json j;
  j["closure_applied"] = t.classes.relation.closure_applied;
  Json classes = Json::array();
  for (const auto& c : t.classes.classes) classes.push_back(names_of(c, coords));
  j["classes"] = std::move(classes);
  j["connecting"] = names_of(connecting_set(t.pattern), coords);
  j["strong"] = names_of(strong_set(t.pattern), coords);
  j["tree"] = to_json(t.root, coords);
  return j;
}

void text_node(const ClassificationNode& node, const std::vector<std::string>& coords, int depth,
               std::ostringstream& o) {
  auto list = [&](const std::vector<int>& idx) {
    std::string s;
    for (int i : idx) s += (s.empty() ? "" : " ") + coords[static_cast<std::size_t>(i)];
    return "{" + s + "}";
  };
  o << std::string(static_cast<std::size_t>(depth) * 2, ' ') << node_kind_name(node.kind) << ' '
    << list(node.coords);
  if (node.kind == NodeKind::WarpedProduct || node.kind == NodeKind::IrregularM1) {
    o << " base " << list(node.base) << " concircular_compatible "
      << (node.concircular_compatible ? "true" : "false");
  }
  o << '\n';
  for (std::size_t b = 0; b < node.children.size(); ++b) {
    if (node.kind == NodeKind::WarpedProduct) {
      o << std::string(static_cast<std::size_t>(depth + 1) * 2, ' ') << "block e = " << format_number(node.block_e[b])
        << '\n';
    } else if (node.kind == NodeKind::IrregularM1) {
      o << std::string(static_cast<std::size_t>(depth + 1) * 2, ' ') << "block sigma = "
        << to_string(node.block_sigma[b]) << '\n';
    }
    text_node(node.children[b], coords, depth + 1, o);
  }
}

}  // namespace

std::string emit_report(const Report& r, ReportFormat format) {
  if (format == ReportFormat::Json) {
    Json j;
    j["schema"] = "kemweb/1";
    j["version"] = KEMWEB_VERSION_STRING;
    if (!r.command.empty()) j["command"] = r.command;
    if (!r.input_digest.empty()) j["input_digest"] = r.input_digest;
    if (r.options) {
      j["options"] = {{"samples", r.options->samples}, {"tol", r.options->tol}, {"seed", r.options->seed}};
    }
    if (!r.verdict.empty()) j["verdict"] = r.verdict;
    if (!r.coordinates.empty()) j["coordinates"] = r.coordinates;
    if (!r.conditions.empty()) {
      Json c = Json::array();
      for (const ConditionReport& x : r.conditions) c.push_back(to_json(x, r.coordinates));
      j["conditions"] = std::move(c);
    }
    if (r.residuals) j["remain"] = to_json(*r.residuals, r.coordinates);
    if (r.classification) j["classification"] = to_json(*r.classification, r.coordinates);
    if (!r.values.empty()) {
      Json v = Json::object();
      for (const NamedValue& x : r.values) v[x.name] = x.value;
      j["values"] = std::move(v);
    }
    if (!r.messages.empty()) j["messages"] = r.messages;
    std::string out;
    write(j, out, 0);
    out += '\n';
    return out;
  }

  std::ostringstream o;
  o << "kemweb " << KEMWEB_VERSION_STRING;
  if (!r.command.empty()) o << " " << r.command;
  if (!r.input_digest.empty()) o << " (input " << r.input_digest << ")";
  o << '\n';
  for (const ConditionReport& c : r.conditions) {
    o << (c.pass ? "PASS " : "FAIL ") << c.name << "  max residual " << format_number(c.max_normalized)
      << " (tol " << format_number(c.tol) << ", " << c.samples << " samples)\n";
    if (!c.pass) {
      for (const ResidualEntry& e : c.entries) {
        if (e.max_normalized <= c.tol) continue;
        o << "  " << e.label;
        for (int i : e.indices) {
          const auto k = static_cast<std::size_t>(i);
          o << ' ' << (k < r.coordinates.size() ? r.coordinates[k] : std::to_string(i));
        }
        o << "  residual " << format_number(e.max_normalized) << '\n';
      }
    }
    for (const std::string& n : c.notes) o << "  note: " << n << '\n';
  }
  if (r.residuals) {
    o << (r.residuals->pass ? "PASS " : "FAIL ") << "remain  max residual "
      << format_number(r.residuals->max_normalized) << '\n';
    for (const TripleResidual& t : r.residuals->triples) {
      if (r.residuals->pass) break;
      o << "  " << r.coordinates[static_cast<std::size_t>(t.i)] << ' ' << r.coordinates[static_cast<std::size_t>(t.j)]
        << ' ' << r.coordinates[static_cast<std::size_t>(t.k)] << "  A " << format_number(t.a) << "  B "
        << format_number(t.b) << "  C " << format_number(t.c) << "  det " << format_number(t.det) << '\n';
    }
  }
  if (r.classification) {
    o << "classification (closure " << (r.classification->classes.relation.closure_applied ? "applied" : "not needed")
      << ")\n";
    text_node(r.classification->root, r.coordinates, 1, o);
  }
  for (const NamedValue& v : r.values) o << v.name << " = " << format_number(v.value) << '\n';
  for (const std::string& m : r.messages) o << m << '\n';
  if (!r.verdict.empty()) o << "verdict: " << r.verdict << '\n';
  return o.str();
}

}  // namespace kemweb
