#include "kemweb/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <unordered_set>

#include "eval_kernel.hpp"
#include "kemweb/errors.hpp"

namespace kemweb {

struct ExprNode {
  Op op = Op::Constant;
  double value = 0.0;
  int var = -1;
  std::string name;
  // Null handles; leaves never read them.
  std::array<Expr, 2> args{Expr(std::shared_ptr<const ExprNode>()), Expr(std::shared_ptr<const ExprNode>())};
  std::uint64_t vars = 0;
};

namespace {

std::size_t arity_of(Op op) {
  switch (op) {
    case Op::Constant:
    case Op::Var: return 0;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow: return 2;
    default: return 1;
  }
}

// Folds an operation on constants when the result is regular; a singular
// constant expression is kept as a node so the error surfaces at evaluation.
bool try_fold(Op op, double a, double b, double& out) {
  try {
    out = detail::apply(op, a, b);
    return std::isfinite(out);
  } catch (const SingularEvaluation&) {
    return false;
  }
}

}  // namespace

Expr make_node(Op op, Expr a, Expr b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->vars = a.variables() | b.variables();
  n->args = {std::move(a), std::move(b)};
  return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

Expr make_unary(Op op, Expr a) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->vars = a.variables();
  n->args[0] = std::move(a);
  return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Constant;
  n->value = value;
  node_ = std::move(n);
}

Expr Expr::constant(double value) { return Expr(value); }

Expr Expr::var(int index, std::string name) {
  if (index < 0 || index >= kMaxCoordinates) {
    throw InvalidArgument("coordinate index out of range: " + std::to_string(index));
  }
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Var;
  n->var = index;
  n->name = name.empty() ? "x" + std::to_string(index) : std::move(name);
  n->vars = std::uint64_t{1} << index;
  return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
int Expr::var_index() const { return node_->var; }
const std::string& Expr::var_name() const { return node_->name; }
std::size_t Expr::arity() const { return arity_of(node_->op); }
const Expr& Expr::arg(std::size_t k) const { return node_->args[k]; }
std::uint64_t Expr::variables() const { return node_->vars; }

std::size_t Expr::node_count() const {
  std::unordered_set<const ExprNode*> seen;
  std::vector<const Expr*> stack{this};
  while (!stack.empty()) {
    const Expr* e = stack.back();
    stack.pop_back();
    if (!seen.insert(e->id()).second) continue;
    for (std::size_t k = 0; k < e->arity(); ++k) stack.push_back(&e->arg(k));
  }
  return seen.size();
}

// ---------------------------------------------------------------------------
// Builders

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  double v;
  if (a.is_constant() && b.is_constant() && try_fold(Op::Add, a.value(), b.value(), v)) return Expr(v);
  return make_node(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  double v;
  if (a.is_constant() && b.is_constant() && try_fold(Op::Sub, a.value(), b.value(), v)) return Expr(v);
  return make_node(Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  double v;
  if (a.is_constant() && b.is_constant() && try_fold(Op::Mul, a.value(), b.value(), v)) return Expr(v);
  return make_node(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant(1.0)) return a;
  if (a.is_zero() && !(b.is_zero())) return Expr();
  double v;
  if (a.is_constant() && b.is_constant() && try_fold(Op::Div, a.value(), b.value(), v)) return Expr(v);
  return make_node(Op::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(-a.value());
  if (a.op() == Op::Neg) return a.arg(0);
  return make_unary(Op::Neg, a);
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_constant(1.0)) return base;
  if (exponent.is_zero()) return Expr(1.0);
  double v;
  if (base.is_constant() && exponent.is_constant() &&
      try_fold(Op::Pow, base.value(), exponent.value(), v)) {
    return Expr(v);
  }
  return make_node(Op::Pow, base, exponent);
}

Expr pow(const Expr& base, double exponent) { return pow(base, Expr(exponent)); }

namespace {

Expr unary(Op op, const Expr& a) {
  double v;
  if (a.is_constant() && try_fold(op, a.value(), 0.0, v)) return Expr(v);
  return make_unary(op, a);
}

struct FunctionEntry {
  const char* name;
  Op op;
};

constexpr std::array<FunctionEntry, 9> kFunctions{{
    {"sin", Op::Sin},
    {"cos", Op::Cos},
    {"tan", Op::Tan},
    {"sinh", Op::Sinh},
    {"cosh", Op::Cosh},
    {"tanh", Op::Tanh},
    {"exp", Op::Exp},
    {"log", Op::Log},
    {"sqrt", Op::Sqrt},
}};

}  // namespace

Expr sin(const Expr& a) { return unary(Op::Sin, a); }
Expr cos(const Expr& a) { return unary(Op::Cos, a); }
Expr tan(const Expr& a) { return unary(Op::Tan, a); }
Expr sinh(const Expr& a) { return unary(Op::Sinh, a); }
Expr cosh(const Expr& a) { return unary(Op::Cosh, a); }
Expr tanh(const Expr& a) { return unary(Op::Tanh, a); }
Expr exp(const Expr& a) { return unary(Op::Exp, a); }
Expr log(const Expr& a) { return unary(Op::Log, a); }
Expr sqrt(const Expr& a) { return unary(Op::Sqrt, a); }

bool is_function_name(const std::string& name) {
  for (const auto& f : kFunctions) {
    if (name == f.name) return true;
  }
  return false;
}

bool apply_function(const std::string& name, const Expr& arg, Expr& out) {
  for (const auto& f : kFunctions) {
    if (name == f.name) {
      out = unary(f.op, arg);
      return true;
    }
  }
  return false;
}

const char* function_name(Op op) {
  for (const auto& f : kFunctions) {
    if (f.op == op) return f.name;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Differentiation

std::size_t Differentiator::KeyHash::operator()(const Key& k) const noexcept {
  return std::hash<const void*>{}(k.node) * 31U + static_cast<std::size_t>(k.index);
}

Expr Differentiator::operator()(const Expr& e, int index) {
  if (!e.mentions(index)) return Expr();
  if (e.op() == Op::Var) return Expr(1.0);

  const Key key{e.id(), index};
  if (auto it = memo_.find(key); it != memo_.end()) return it->second.second;

  auto d = [&](std::size_t k) { return (*this)(e.arg(k), index); };
  const Expr& a = e.arg(0);
  Expr result;
  switch (e.op()) {
    case Op::Add: result = d(0) + d(1); break;
    case Op::Sub: result = d(0) - d(1); break;
    case Op::Mul: result = d(0) * e.arg(1) + a * d(1); break;
    case Op::Div: {
      const Expr& b = e.arg(1);
      const Expr da = d(0);
      const Expr db = d(1);
      result = da / b - a * db / pow(b, 2.0);
      break;
    }
    case Op::Pow: {
      const Expr& b = e.arg(1);
      if (!b.mentions(index)) {
        result = b * pow(a, b - Expr(1.0)) * d(0);
      } else {
        result = e * (d(1) * log(a) + b * d(0) / a);
      }
      break;
    }
    case Op::Neg: result = -d(0); break;
    case Op::Sin: result = cos(a) * d(0); break;
    case Op::Cos: result = -(sin(a) * d(0)); break;
    case Op::Tan: result = d(0) / pow(cos(a), 2.0); break;
    case Op::Sinh: result = cosh(a) * d(0); break;
    case Op::Cosh: result = sinh(a) * d(0); break;
    case Op::Tanh: result = (Expr(1.0) - pow(e, 2.0)) * d(0); break;
    case Op::Exp: result = e * d(0); break;
    case Op::Log: result = d(0) / a; break;
    case Op::Sqrt: result = d(0) / (Expr(2.0) * e); break;
    case Op::Constant:
    case Op::Var: break;
  }
  memo_.emplace(key, std::make_pair(e, result));
  return result;
}

Expr differentiate(const Expr& e, int index) {
  Differentiator d;
  return d(e, index);
}

// ---------------------------------------------------------------------------
// Evaluation and rewriting

double evaluate(const Expr& e, std::span<const double> point) {
  switch (e.op()) {
    case Op::Constant: return e.value();
    case Op::Var:
      if (static_cast<std::size_t>(e.var_index()) >= point.size()) {
        throw InvalidArgument("point has no value for coordinate " + e.var_name());
      }
      return point[static_cast<std::size_t>(e.var_index())];
    default: break;
  }
  const double a = evaluate(e.arg(0), point);
  const double b = e.arity() == 2 ? evaluate(e.arg(1), point) : 0.0;
  return detail::apply(e.op(), a, b);
}

namespace {

Expr rebuild(const Expr& e, const std::function<Expr(const Expr&)>& leaf,
             std::unordered_map<const ExprNode*, Expr>& memo) {
  if (e.arity() == 0) return leaf(e);
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  const Expr a = rebuild(e.arg(0), leaf, memo);
  Expr out;
  switch (e.op()) {
    case Op::Add: out = a + rebuild(e.arg(1), leaf, memo); break;
    case Op::Sub: out = a - rebuild(e.arg(1), leaf, memo); break;
    case Op::Mul: out = a * rebuild(e.arg(1), leaf, memo); break;
    case Op::Div: out = a / rebuild(e.arg(1), leaf, memo); break;
    case Op::Pow: out = pow(a, rebuild(e.arg(1), leaf, memo)); break;
    case Op::Neg: out = -a; break;
    default: out = unary(e.op(), a); break;
  }
  memo.emplace(e.id(), out);
  return out;
}

}  // namespace

Expr substitute(const Expr& e, const std::vector<std::optional<Expr>>& replacement) {
  std::unordered_map<const ExprNode*, Expr> memo;
  return rebuild(
      e,
      [&](const Expr& leaf) -> Expr {
        if (leaf.op() == Op::Var) {
          const auto i = static_cast<std::size_t>(leaf.var_index());
          if (i < replacement.size() && replacement[i]) return *replacement[i];
        }
        return leaf;
      },
      memo);
}

Expr reindex(const Expr& e, std::span<const int> mapping) {
  std::unordered_map<const ExprNode*, Expr> memo;
  return rebuild(
      e,
      [&](const Expr& leaf) -> Expr {
        if (leaf.op() == Op::Var) {
          const auto i = static_cast<std::size_t>(leaf.var_index());
          if (i >= mapping.size() || mapping[i] < 0) {
            throw InvalidArgument("no new index for coordinate " + leaf.var_name());
          }
          return Expr::var(mapping[i], leaf.var_name());
        }
        return leaf;
      },
      memo);
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Constant: return a.value() == b.value() && std::signbit(a.value()) == std::signbit(b.value());
    case Op::Var: return a.var_index() == b.var_index() && a.var_name() == b.var_name();
    default: break;
  }
  for (std::size_t k = 0; k < a.arity(); ++k) {
    if (!structurally_equal(a.arg(k), b.arg(k))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

// Precedence levels; higher binds tighter.
constexpr int kPrecSum = 1;
constexpr int kPrecProduct = 2;
constexpr int kPrecUnary = 3;
constexpr int kPrecPower = 4;
constexpr int kPrecAtom = 5;

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Constant: return std::signbit(e.value()) ? kPrecUnary : kPrecAtom;
    case Op::Var: return kPrecAtom;
    case Op::Add:
    case Op::Sub: return kPrecSum;
    case Op::Mul:
    case Op::Div: return kPrecProduct;
    case Op::Neg: return kPrecUnary;
    case Op::Pow: return kPrecPower;
    default: return kPrecAtom;
  }
}

void print(const Expr& e, int min_prec, std::string& out) {
  const bool parens = precedence(e) < min_prec;
  if (parens) out += '(';
  switch (e.op()) {
    case Op::Constant: out += format_number(e.value()); break;
    case Op::Var: out += e.var_name(); break;
    case Op::Add:
    case Op::Sub: {
      print(e.arg(0), kPrecSum, out);
      out += e.op() == Op::Add ? " + " : " - ";
      print(e.arg(1), kPrecSum + 1, out);
      break;
    }
    case Op::Mul:
    case Op::Div: {
      print(e.arg(0), kPrecProduct, out);
      out += e.op() == Op::Mul ? "*" : "/";
      print(e.arg(1), kPrecProduct + 1, out);
      break;
    }
    case Op::Neg:
      out += '-';
      print(e.arg(0), kPrecUnary, out);
      break;
    case Op::Pow:
      print(e.arg(0), kPrecAtom, out);
      out += '^';
      print(e.arg(1), kPrecUnary, out);
      break;
    default:
      out += function_name(e.op());
      out += '(';
      print(e.arg(0), 0, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// ChartBox

ChartBox::ChartBox(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  for (const auto& iv : intervals_) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
      throw InvalidArgument("chart interval must satisfy lo < hi, got [" + format_number(iv.lo) +
                            ", " + format_number(iv.hi) + "]");
    }
  }
}

Point ChartBox::center() const {
  Point c(intervals_.size());
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    c[i] = 0.5 * (intervals_[i].lo + intervals_[i].hi);
  }
  return c;
}

bool ChartBox::contains(std::span<const double> p) const {
  if (p.size() != intervals_.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= intervals_[i].lo && p[i] <= intervals_[i].hi)) return false;
  }
  return true;
}

ChartBox ChartBox::restrict(std::span<const int> coords) const {
  std::vector<Interval> out;
  out.reserve(coords.size());
  for (int c : coords) out.push_back(intervals_.at(static_cast<std::size_t>(c)));
  return ChartBox(std::move(out));
}

}  // namespace kemweb
