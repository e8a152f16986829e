#include "kemweb/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "kemweb/version.hpp"

namespace kemweb {

namespace {

std::string describe(const std::set<std::string>& expected) {
  std::string s;
  for (const std::string& e : expected) {
    if (!s.empty()) s += ", ";
    s += e;
  }
  return s;
}

}  // namespace

ParseError::ParseError(const std::string& message, int line, int column, std::set<std::string> expected)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message +
            " (expected " + describe(expected) + ")"),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

const char* file_mode_name(FileMode mode) {
  switch (mode) {
    case FileMode::Raw: return "raw";
    case FileMode::Sigma: return "sigma";
    case FileMode::Family: return "family";
    case FileMode::Warped: return "warped";
  }
  return "raw";
}

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  int column = 0;
};

// Tokens of one line; '#' starts a comment.
std::vector<Token> lex(const std::string& line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    const int col = static_cast<int>(i) + 1;
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_')) ++j;
      out.push_back({Tok::Ident, line.substr(i, j - i), 0.0, col});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < line.size() && (std::isdigit(static_cast<unsigned char>(line[j])) || line[j] == '.')) ++j;
      if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
        if (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) {
          j = k;
          while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
        }
      }
      const std::string text = line.substr(i, j - i);
      double v = 0.0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ParseError("malformed number '" + text + "'", line_no, col, {"number"});
      }
      out.push_back({Tok::Number, text, v, col});
      i = j;
      continue;
    }
    static const std::string punct = ":()+-*/^,";
    if (punct.find(c) != std::string::npos) {
      out.push_back({Tok::Punct, std::string(1, c), 0.0, col});
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_no, col,
                     {"identifier", "number", "operator"});
  }
  out.push_back({Tok::End, "", 0.0, static_cast<int>(line.size()) + 1});
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, int line_no, const std::vector<std::string>& coords)
      : toks_(std::move(tokens)), line_(line_no), coords_(coords) {}

  const Token& peek() const { return toks_[pos_]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }

  [[noreturn]] void fail(const std::string& msg, std::set<std::string> expected) const {
    throw ParseError(msg, line_, peek().column, std::move(expected));
  }

  void expect_punct(const char* p) {
    if (!is_punct(p)) fail("unexpected " + shown(peek()), {std::string("'") + p + "'"});
    ++pos_;
  }

  void expect_end() {
    if (!at_end()) fail("unexpected " + shown(peek()), {"end of line"});
  }

  std::string ident(const std::string& what) {
    if (peek().kind != Tok::Ident) fail("unexpected " + shown(peek()), {what});
    return toks_[pos_++].text;
  }

  // A declared coordinate name.
  int coordinate() {
    if (peek().kind != Tok::Ident) fail("unexpected " + shown(peek()), {"coordinate name"});
    const Token& t = toks_[pos_];
    const int idx = index_of(t.text);
    if (idx < 0) {
      throw UndeclaredCoordinate("undeclared coordinate '" + t.text + "'", line_, t.column, declared());
    }
    ++pos_;
    return idx;
  }

  std::vector<int> coordinate_list() {
    std::vector<int> out;
    while (peek().kind == Tok::Ident) out.push_back(coordinate());
    if (out.empty()) fail("unexpected " + shown(peek()), {"coordinate name"});
    return out;
  }

  int integer() {
    if (peek().kind != Tok::Number) fail("unexpected " + shown(peek()), {"integer"});
    const double v = toks_[pos_].number;
    if (v != std::floor(v) || v < 1 || v > kMaxCoordinates) fail("dimension out of range", {"integer in [1, 64]"});
    ++pos_;
    return static_cast<int>(v);
  }

  Expr expression() {
    Expr e = term();
    while (is_punct("+") || is_punct("-")) {
      const bool plus = peek().text == "+";
      ++pos_;
      Expr r = term();
      e = plus ? e + r : e - r;
    }
    return e;
  }

  // A constant at unary level: number, pi, a signed one, or a parenthesized
  // constant expression.
  double constant_value(const std::string& what) {
    const int col = peek().column;
    const Expr e = unary();
    if (!e.is_constant()) throw ParseError(what + " must be a constant", line_, col, {"number"});
    return e.value();
  }

 private:
  static std::string shown(const Token& t) {
    return t.kind == Tok::End ? std::string("end of line") : "'" + t.text + "'";
  }

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (coords_[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  std::set<std::string> declared() const {
    std::set<std::string> s(coords_.begin(), coords_.end());
    if (s.empty()) s.insert("declared coordinate");
    return s;
  }

  Expr term() {
    Expr e = unary();
    while (is_punct("*") || is_punct("/")) {
      const bool mul = peek().text == "*";
      ++pos_;
      Expr r = unary();
      e = mul ? e * r : e / r;
    }
    return e;
  }

  Expr unary() {
    if (is_punct("-")) {
      ++pos_;
      return -unary();
    }
    if (is_punct("+")) {
      ++pos_;
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (is_punct("^")) {
      ++pos_;
      return pow(base, unary());
    }
    return base;
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      ++pos_;
      return Expr(t.number);
    }
    if (is_punct("(")) {
      ++pos_;
      Expr e = expression();
      expect_punct(")");
      return e;
    }
    if (t.kind == Tok::Ident) {
      if (is_function_name(t.text)) {
        const std::string name = t.text;
        ++pos_;
        expect_punct("(");
        Expr arg = expression();
        expect_punct(")");
        Expr out;
        apply_function(name, arg, out);
        return out;
      }
      if (t.text == "pi" && index_of("pi") < 0) {
        ++pos_;
        return Expr(std::numbers::pi);
      }
      const int idx = index_of(t.text);
      if (idx < 0) {
        std::set<std::string> exp = declared();
        exp.insert("function name");
        throw UndeclaredCoordinate("undeclared coordinate '" + t.text + "'", line_, t.column, exp);
      }
      ++pos_;
      return Expr::var(idx, coords_[static_cast<std::size_t>(idx)]);
    }
    fail("unexpected " + shown(t), {"number", "coordinate name", "function name", "'('", "'-'"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
  const std::vector<std::string>& coords_;
};

const std::set<std::string> kKeywords = {"dim",   "coords", "domain", "sign",  "mode",  "gii", "phi",
                                         "sigma", "family", "eigen",  "base", "block", "fiber"};
const std::set<std::string> kFamilies = {"irreducible", "product", "warped", "irregular", "sckt"};

bool line_allowed(const std::string& kw, FileMode mode) {
  if (kw == "gii") return mode == FileMode::Raw || mode == FileMode::Warped;
  if (kw == "phi" || kw == "sigma") return mode == FileMode::Sigma || mode == FileMode::Family;
  if (kw == "family" || kw == "eigen" || kw == "block") return mode == FileMode::Family;
  if (kw == "base") return mode == FileMode::Family || mode == FileMode::Warped;
  if (kw == "fiber") return mode == FileMode::Warped;
  return true;
}

std::string modes_for(const std::string& kw) {
  std::string s;
  for (FileMode m : {FileMode::Raw, FileMode::Sigma, FileMode::Family, FileMode::Warped}) {
    if (line_allowed(kw, m)) s += std::string(s.empty() ? "" : "/") + file_mode_name(m);
  }
  return s;
}

}  // namespace

Expr parse_expression(const std::string& text, const std::vector<std::string>& coords) {
  LineParser p(lex(text, 1), 1, coords);
  Expr e = p.expression();
  p.expect_end();
  return e;
}

MetricFile parse_metric_file(const std::string& text) {
  MetricFile f;
  int dim = -1;
  int dim_line = 0;
  bool have_coords = false;
  bool have_mode = false;
  bool have_family = false;
  std::vector<int> domain_seen;
  std::vector<int> sign_seen;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  int last_line = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::vector<Token> toks = lex(raw, line_no);
    if (toks.front().kind == Tok::End) continue;
    last_line = line_no;
    LineParser p(std::move(toks), line_no, f.coords);
    const int kw_col = p.peek().column;
    if (p.peek().kind != Tok::Ident || !kKeywords.count(p.peek().text)) {
      throw ParseError("unknown statement", line_no, kw_col, kKeywords);
    }
    const std::string kw = p.ident("keyword");

    if (kw == "dim") {
      if (dim >= 0) throw DuplicateDeclaration("dimension declared twice", line_no, kw_col, {"a single dim line"});
      dim = p.integer();
      dim_line = line_no;
      p.expect_end();
      continue;
    }
    if (dim < 0) throw ParseError("statement before the dimension", line_no, kw_col, {"dim"});
    if (kw == "coords") {
      if (have_coords) throw DuplicateDeclaration("coordinates declared twice", line_no, kw_col, {"a single coords line"});
      std::vector<std::string> names;
      while (p.peek().kind == Tok::Ident) {
        const Token t = p.peek();
        if (is_function_name(t.text) || t.text == "pi") {
          throw ParseError("reserved word '" + t.text + "' used as a coordinate", line_no, t.column,
                           {"coordinate name"});
        }
        if (std::find(names.begin(), names.end(), t.text) != names.end()) {
          throw DuplicateDeclaration("coordinate '" + t.text + "' declared twice", line_no, t.column,
                                     {"distinct coordinate name"});
        }
        names.push_back(p.ident("coordinate name"));
      }
      if (static_cast<int>(names.size()) != dim) {
        p.fail("expected " + std::to_string(dim) + " coordinate names, got " + std::to_string(names.size()),
               {"coordinate name"});
      }
      p.expect_end();
      f.coords = std::move(names);
      const std::size_t n = f.coords.size();
      f.domains.assign(n, Interval{});
      f.signs.assign(n, 1);
      f.gii.assign(n, std::nullopt);
      f.phi.assign(n, std::nullopt);
      f.eigen.assign(n, std::nullopt);
      f.sigma.assign(n * n, std::nullopt);
      domain_seen.assign(n, 0);
      sign_seen.assign(n, 0);
      have_coords = true;
      continue;
    }
    if (!have_coords) throw ParseError("statement before the coordinates", line_no, kw_col, {"coords"});
    if (kw == "domain" || kw == "sign") {
      const int c = p.coordinate();
      std::vector<int>& seen = kw == "domain" ? domain_seen : sign_seen;
      if (seen[static_cast<std::size_t>(c)]) {
        throw DuplicateDeclaration(kw + " of '" + f.coords[static_cast<std::size_t>(c)] + "' declared twice",
                                   line_no, kw_col, {"one " + kw + " line per coordinate"});
      }
      seen[static_cast<std::size_t>(c)] = line_no;
      if (kw == "domain") {
        const double lo = p.constant_value("lower bound");
        const double hi = p.constant_value("upper bound");
        p.expect_end();
        if (!(lo < hi)) throw ParseError("empty domain", line_no, kw_col, {"lo < hi"});
        f.domains[static_cast<std::size_t>(c)] = {lo, hi};
      } else {
        if (p.is_punct("+")) {
          f.signs[static_cast<std::size_t>(c)] = 1;
        } else if (p.is_punct("-")) {
          f.signs[static_cast<std::size_t>(c)] = -1;
        } else {
          p.fail("bad sign", {"'+'", "'-'"});
        }
        p.expect_punct(p.is_punct("+") ? "+" : "-");
        p.expect_end();
      }
      continue;
    }
    if (kw == "mode") {
      if (have_mode) throw MixedMode("mode declared twice", line_no, kw_col, {"a single mode line"});
      const int col = p.peek().column;
      const std::string m = p.ident("mode name");
      if (m == "raw") f.mode = FileMode::Raw;
      else if (m == "sigma") f.mode = FileMode::Sigma;
      else if (m == "family") f.mode = FileMode::Family;
      else if (m == "warped") f.mode = FileMode::Warped;
      else throw ParseError("unknown mode '" + m + "'", line_no, col, {"raw", "sigma", "family", "warped"});
      p.expect_end();
      have_mode = true;
      continue;
    }
    if (!have_mode) throw ParseError("body statement before the mode", line_no, kw_col, {"mode"});
    if (!line_allowed(kw, f.mode)) {
      throw MixedMode("'" + kw + "' is not allowed in " + file_mode_name(f.mode) + " mode", line_no, kw_col,
                      {"mode " + modes_for(kw)});
    }

    auto single = [&](std::vector<std::optional<Expr>>& slot_vec) {
      const int c = p.coordinate();
      auto& slot = slot_vec[static_cast<std::size_t>(c)];
      if (slot) {
        throw DuplicateDeclaration(kw + " of '" + f.coords[static_cast<std::size_t>(c)] + "' declared twice",
                                   line_no, kw_col, {"one " + kw + " line per coordinate"});
      }
      p.expect_punct(":");
      slot = p.expression();
      p.expect_end();
    };

    if (kw == "gii") {
      single(f.gii);
    } else if (kw == "phi") {
      single(f.phi);
    } else if (kw == "eigen") {
      single(f.eigen);
    } else if (kw == "sigma") {
      const int a = p.coordinate();
      const int b = p.coordinate();
      if (a == b) throw ParseError("sigma needs two distinct coordinates", line_no, kw_col, {"distinct coordinates"});
      auto& slot = f.sigma[static_cast<std::size_t>(a) * f.dim() + static_cast<std::size_t>(b)];
      if (slot) throw DuplicateDeclaration("sigma pair declared twice", line_no, kw_col, {"one line per ordered pair"});
      p.expect_punct(":");
      slot = p.expression();
      p.expect_end();
    } else if (kw == "family") {
      if (have_family) throw DuplicateDeclaration("family declared twice", line_no, kw_col, {"a single family line"});
      const int col = p.peek().column;
      f.family = p.ident("family name");
      if (!kFamilies.count(f.family)) throw ParseError("unknown family '" + f.family + "'", line_no, col, kFamilies);
      p.expect_end();
      have_family = true;
    } else if (kw == "base") {
      if (!f.base.empty()) throw DuplicateDeclaration("base declared twice", line_no, kw_col, {"a single base line"});
      f.base = p.coordinate_list();
      p.expect_end();
    } else if (kw == "block") {
      BlockLine b;
      b.coords = p.coordinate_list();
      if (p.is_punct(":")) {
        p.expect_punct(":");
        b.param = p.expression();
      }
      p.expect_end();
      f.blocks.push_back(std::move(b));
    } else if (kw == "fiber") {
      FiberLine fl;
      fl.coords = p.coordinate_list();
      p.expect_punct(":");
      fl.rho = p.expression();
      p.expect_end();
      f.fibers.push_back(std::move(fl));
    }
  }

  // Completeness.
  const int eof = last_line + 1;
  auto incomplete = [&](const std::string& msg, const std::string& expected) {
    throw ParseError(msg, eof, 1, {expected});
  };
  if (dim < 0) incomplete("missing dimension", "dim");
  if (!have_coords) incomplete("missing coordinates", "coords");
  if (!have_mode) incomplete("missing mode", "mode");
  (void)dim_line;
  for (std::size_t i = 0; i < f.dim(); ++i) {
    if (!domain_seen[i]) incomplete("missing domain of '" + f.coords[i] + "'", "domain " + f.coords[i]);
    if (!sign_seen[i]) incomplete("missing sign of '" + f.coords[i] + "'", "sign " + f.coords[i]);
  }
  switch (f.mode) {
    case FileMode::Raw:
      for (std::size_t i = 0; i < f.dim(); ++i) {
        if (!f.gii[i]) incomplete("missing metric component of '" + f.coords[i] + "'", "gii " + f.coords[i]);
      }
      break;
    case FileMode::Sigma:
      for (std::size_t i = 0; i < f.dim(); ++i) {
        if (!f.phi[i]) incomplete("missing phi of '" + f.coords[i] + "'", "phi " + f.coords[i]);
      }
      break;
    case FileMode::Family:
      if (!have_family) incomplete("missing family", "family");
      break;
    case FileMode::Warped: {
      for (std::size_t i = 0; i < f.dim(); ++i) {
        if (!f.gii[i]) incomplete("missing metric component of '" + f.coords[i] + "'", "gii " + f.coords[i]);
      }
      if (f.base.empty()) incomplete("missing base", "base");
      break;
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Printing.

std::string print_metric_file(const MetricFile& f) {
  std::ostringstream o;
  const std::size_t n = f.dim();
  auto names = [&](const std::vector<int>& idx) {
    std::string s;
    for (int i : idx) s += " " + f.coords[static_cast<std::size_t>(i)];
    return s;
  };
  auto bound = [](double v) {
    const std::string s = format_number(v);
    return v < 0 ? "(" + s + ")" : s;
  };
  o << "dim " << n << "\ncoords";
  for (const std::string& c : f.coords) o << ' ' << c;
  o << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    o << "domain " << f.coords[i] << ' ' << bound(f.domains[i].lo) << ' ' << bound(f.domains[i].hi) << '\n';
  }
  for (std::size_t i = 0; i < n; ++i) o << "sign " << f.coords[i] << ' ' << (f.signs[i] > 0 ? '+' : '-') << '\n';
  o << "mode " << file_mode_name(f.mode) << '\n';
  if (f.mode == FileMode::Family) o << "family " << f.family << '\n';
  if (!f.base.empty()) o << "base" << names(f.base) << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    if (i < f.gii.size() && f.gii[i]) o << "gii " << f.coords[i] << " : " << to_string(*f.gii[i]) << '\n';
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i < f.eigen.size() && f.eigen[i]) o << "eigen " << f.coords[i] << " : " << to_string(*f.eigen[i]) << '\n';
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i < f.phi.size() && f.phi[i]) o << "phi " << f.coords[i] << " : " << to_string(*f.phi[i]) << '\n';
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i * n + j;
      if (k < f.sigma.size() && f.sigma[k]) {
        o << "sigma " << f.coords[i] << ' ' << f.coords[j] << " : " << to_string(*f.sigma[k]) << '\n';
      }
    }
  }
  for (const BlockLine& b : f.blocks) {
    o << "block" << names(b.coords);
    if (b.param) o << " : " << to_string(*b.param);
    o << '\n';
  }
  for (const FiberLine& fl : f.fibers) o << "fiber" << names(fl.coords) << " : " << to_string(fl.rho) << '\n';
  return o.str();
}

namespace {

bool same_opt(const std::optional<Expr>& a, const std::optional<Expr>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || structurally_equal(*a, *b);
}

bool same_opts(const std::vector<std::optional<Expr>>& a, const std::vector<std::optional<Expr>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_opt(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

bool same_metric_file(const MetricFile& a, const MetricFile& b) {
  if (a.coords != b.coords || a.signs != b.signs || a.mode != b.mode || a.family != b.family || a.base != b.base) {
    return false;
  }
  if (a.domains.size() != b.domains.size()) return false;
  for (std::size_t i = 0; i < a.domains.size(); ++i) {
    if (a.domains[i].lo != b.domains[i].lo || a.domains[i].hi != b.domains[i].hi) return false;
  }
  if (!same_opts(a.gii, b.gii) || !same_opts(a.phi, b.phi) || !same_opts(a.sigma, b.sigma) ||
      !same_opts(a.eigen, b.eigen)) {
    return false;
  }
  if (a.blocks.size() != b.blocks.size() || a.fibers.size() != b.fibers.size()) return false;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    if (a.blocks[i].coords != b.blocks[i].coords || !same_opt(a.blocks[i].param, b.blocks[i].param)) return false;
  }
  for (std::size_t i = 0; i < a.fibers.size(); ++i) {
    if (a.fibers[i].coords != b.fibers[i].coords || !structurally_equal(a.fibers[i].rho, b.fibers[i].rho)) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Conversions.

namespace {

// Moves an expression over declared indices onto local indices of `coords`.
Expr localize(const Expr& e, const std::vector<int>& coords, std::size_t n, const std::string& what) {
  std::vector<int> mapping(n, -1);
  std::uint64_t allowed = 0;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    mapping[static_cast<std::size_t>(coords[k])] = static_cast<int>(k);
    allowed |= std::uint64_t{1} << coords[k];
  }
  if (e.variables() & ~allowed) throw InvalidArgument(what + " uses coordinates outside its piece");
  return reindex(e, mapping);
}

std::vector<std::string> pick(const std::vector<std::string>& v, const std::vector<int>& idx) {
  std::vector<std::string> out;
  for (int i : idx) out.push_back(v[static_cast<std::size_t>(i)]);
  return out;
}

// Web of the listed coordinates from phi/sigma lines (phi defaults to 1).
SigmaWeb sub_web(const MetricFile& f, const std::vector<int>& coords) {
  const std::size_t n = f.dim();
  const std::size_t k = coords.size();
  std::vector<Interval> dom;
  std::vector<int> signs;
  std::vector<Expr> phi;
  std::vector<Expr> sigma(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    const auto c = static_cast<std::size_t>(coords[a]);
    dom.push_back(f.domains[c]);
    signs.push_back(f.signs[c]);
    phi.push_back(f.phi[c] ? localize(*f.phi[c], coords, n, "phi_" + f.coords[c]) : Expr(1.0));
    for (std::size_t b = 0; b < k; ++b) {
      const auto& s = f.sigma[c * n + static_cast<std::size_t>(coords[b])];
      if (a != b && s) sigma[a * k + b] = localize(*s, coords, n, "sigma");
    }
  }
  return SigmaWeb(pick(f.coords, coords), ChartBox(dom), signs, phi, sigma);
}

void require_layout(const MetricFile& f, const std::vector<int>& order) {
  std::vector<int> expected(f.dim());
  for (std::size_t i = 0; i < expected.size(); ++i) expected[i] = static_cast<int>(i);
  if (order != expected) {
    throw InvalidArgument("family mode expects coordinates declared in layout order "
                          "(simple or base coordinates first, then blocks in order)");
  }
}

void require_no_cross_sigma(const MetricFile& f, const std::vector<std::vector<int>>& groups) {
  const std::size_t n = f.dim();
  std::vector<int> group_of(n, -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int c : groups[g]) group_of[static_cast<std::size_t>(c)] = static_cast<int>(g);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (f.sigma[i * n + j] && (group_of[i] < 0 || group_of[i] != group_of[j])) {
        throw InvalidArgument("family mode allows sigma lines only inside a block");
      }
    }
  }
}

std::vector<BaseCoordinate> simple_coordinates(const MetricFile& f, std::vector<int>& order) {
  std::vector<BaseCoordinate> out;
  const std::size_t n = f.dim();
  for (std::size_t i = 0; i < n; ++i) {
    if (!f.eigen[i]) continue;
    order.push_back(static_cast<int>(i));
    const std::vector<int> self{static_cast<int>(i)};
    BaseCoordinate b;
    b.name = f.coords[i];
    b.domain = f.domains[i];
    b.sign = f.signs[i];
    b.eigen = localize(*f.eigen[i], self, n, "eigen_" + f.coords[i]);
    b.phi = f.phi[i] ? localize(*f.phi[i], self, n, "phi_" + f.coords[i]) : Expr(1.0);
    out.push_back(std::move(b));
  }
  return out;
}

double block_constant(const BlockLine& b) {
  if (!b.param || !b.param->is_constant()) throw InvalidArgument("block needs a constant e");
  return b.param->value();
}

}  // namespace

SCKTData sckt_from_file(const MetricFile& f) {
  if (f.mode != FileMode::Family) throw InvalidArgument("concircular data needs a family-mode file");
  if (f.family == "irregular") throw InvalidArgument("the irregular family has no canonical concircular tensor");
  SCKTData d;
  std::vector<int> order;
  d.simple = simple_coordinates(f, order);
  std::vector<std::vector<int>> groups;
  for (const BlockLine& b : f.blocks) {
    order.insert(order.end(), b.coords.begin(), b.coords.end());
    groups.push_back(b.coords);
    const double e = f.family == "product" && !b.param ? static_cast<double>(groups.size()) : block_constant(b);
    d.blocks.push_back({e, sub_web(f, b.coords)});
  }
  require_layout(f, order);
  require_no_cross_sigma(f, groups);
  if (f.family == "irreducible" && (!d.blocks.empty() || d.simple.size() < 2)) {
    throw InvalidArgument("irreducible family needs at least two eigen lines and no blocks");
  }
  if (f.family == "warped" && d.simple.size() < 2) throw InvalidArgument("warped family needs at least two eigen lines");
  if (f.family == "product" && !d.simple.empty()) throw InvalidArgument("product family takes blocks only");
  return d;
}

SigmaWeb web_from_file(const MetricFile& f) {
  if (f.mode == FileMode::Sigma) {
    std::vector<int> all(f.dim());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return sub_web(f, all);
  }
  if (f.mode != FileMode::Family) throw InvalidArgument("a web needs a sigma- or family-mode file");
  if (f.family == "irregular") {
    if (f.base.size() != 1) throw InvalidArgument("irregular family needs exactly one base coordinate");
    const int b0 = f.base.front();
    std::vector<int> order{b0};
    std::vector<std::vector<int>> groups;
    BaseCoordinate base;
    base.name = f.coords[static_cast<std::size_t>(b0)];
    base.domain = f.domains[static_cast<std::size_t>(b0)];
    base.sign = f.signs[static_cast<std::size_t>(b0)];
    const auto& phi = f.phi[static_cast<std::size_t>(b0)];
    base.phi = phi ? localize(*phi, {b0}, f.dim(), "phi") : Expr(1.0);
    std::vector<IrregularBlock> blocks;
    for (const BlockLine& b : f.blocks) {
      if (!b.param) throw InvalidArgument("irregular blocks need a function of the base coordinate");
      order.insert(order.end(), b.coords.begin(), b.coords.end());
      groups.push_back(b.coords);
      blocks.push_back({localize(*b.param, {b0}, f.dim(), "block function"), sub_web(f, b.coords)});
    }
    require_layout(f, order);
    require_no_cross_sigma(f, groups);
    return irregular_metric(base, blocks);
  }
  if (f.family == "product") {
    std::vector<int> order;
    std::vector<std::vector<int>> groups;
    std::vector<SigmaWeb> webs;
    for (const BlockLine& b : f.blocks) {
      order.insert(order.end(), b.coords.begin(), b.coords.end());
      groups.push_back(b.coords);
      webs.push_back(sub_web(f, b.coords));
    }
    for (std::size_t i = 0; i < f.dim(); ++i) {
      if (f.eigen[i]) throw InvalidArgument("product family takes blocks only");
    }
    require_layout(f, order);
    require_no_cross_sigma(f, groups);
    return product_metric(webs);
  }
  return sckt_metric(sckt_from_file(f));
}

WarpedProductStructure warped_from_file(const MetricFile& f) {
  if (f.mode != FileMode::Warped) throw InvalidArgument("warped structure needs a warped-mode file");
  const std::size_t n = f.dim();
  std::vector<int> order(f.base);
  auto piece = [&](const std::vector<int>& coords) {
    std::vector<Interval> dom;
    std::vector<Expr> g;
    for (int c : coords) {
      dom.push_back(f.domains[static_cast<std::size_t>(c)]);
      g.push_back(localize(*f.gii[static_cast<std::size_t>(c)], coords, n, "gii"));
    }
    return OrthogonalMetric(pick(f.coords, coords), ChartBox(dom), g);
  };
  std::vector<Fiber> fibers;
  for (const FiberLine& fl : f.fibers) {
    order.insert(order.end(), fl.coords.begin(), fl.coords.end());
    fibers.push_back({piece(fl.coords), localize(fl.rho, f.base, n, "warping function")});
  }
  std::vector<int> sorted(order);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted.size() != n || sorted[i] != static_cast<int>(i)) {
      throw InvalidArgument("base and fibers must partition the coordinates");
    }
  }
  return WarpedProductStructure(piece(f.base), std::move(fibers));
}

OrthogonalMetric metric_from_file(const MetricFile& f, const SampleOptions& check) {
  switch (f.mode) {
    case FileMode::Raw: {
      std::vector<Expr> g;
      for (const auto& e : f.gii) g.push_back(*e);
      return OrthogonalMetric(f.coords, f.box(), g, check);
    }
    case FileMode::Sigma:
    case FileMode::Family: return to_metric(web_from_file(f), check);
    case FileMode::Warped: return warped_from_file(f).assembled();
  }
  throw InvalidArgument("unknown mode");
}

// ---------------------------------------------------------------------------
// Reports.

std::string input_digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const char* version_string() { return KEMWEB_VERSION_STRING; }

}  // namespace kemweb
