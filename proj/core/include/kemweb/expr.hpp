#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace kemweb {

/// Node kinds of the expression tree.
enum class Op : std::uint8_t {
  Constant,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Neg,
  Sin,
  Cos,
  Tan,
  Sinh,
  Cosh,
  Tanh,
  Exp,
  Log,
  Sqrt,
};

/// Maximum number of coordinates an expression can reference.
inline constexpr int kMaxCoordinates = 64;

struct CoordId {
  int index = 0;
  std::string name;
};

struct ExprNode;

/// Immutable symbolic expression over indexed coordinates.
///
/// An Expr is a cheap handle (shared pointer) to an immutable node, so copies
/// share structure and are safe to pass between threads. The builders below
/// perform constant folding and the identities x+0, x*0, x*1, x/1, x^1, x^0,
/// -(-x); no other simplification is attempted.
class Expr {
 public:
  /// The zero constant.
  Expr();
  explicit Expr(double value);

  static Expr constant(double value);
  static Expr var(int index, std::string name);
  static Expr var(const CoordId& id) { return var(id.index, id.name); }

  Op op() const;
  double value() const;  // Constant only
  int var_index() const;  // Var only
  const std::string& var_name() const;  // Var only
  std::size_t arity() const;
  const Expr& arg(std::size_t k) const;

  bool is_constant() const { return op() == Op::Constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }
  bool is_zero() const { return is_constant(0.0); }

  /// Bit i is set when coordinate i occurs structurally.
  std::uint64_t variables() const;
  bool mentions(int index) const { return (variables() >> index) & 1U; }

  /// Identity of the shared node; equal ids imply equal expressions.
  const ExprNode* id() const { return node_.get(); }

  /// Nodes reachable from this expression (shared subtrees counted once).
  std::size_t node_count() const;

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  friend Expr make_node(Op op, Expr a, Expr b);
  friend Expr make_unary(Op op, Expr a);
  friend struct ExprNode;

  std::shared_ptr<const ExprNode> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr pow(const Expr& base, const Expr& exponent);
Expr pow(const Expr& base, double exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);
Expr sinh(const Expr& a);
Expr cosh(const Expr& a);
Expr tanh(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);

/// Builds a unary function node by name ("sin", "cosh", ...). Returns false
/// if the name is unknown.
bool apply_function(const std::string& name, const Expr& arg, Expr& out);
bool is_function_name(const std::string& name);
const char* function_name(Op op);

/// Exact partial derivative with respect to coordinate `index`.
Expr differentiate(const Expr& e, int index);
inline Expr differentiate(const Expr& e, const CoordId& v) { return differentiate(e, v.index); }

/// Differentiation with a memo table keyed on node identity. Derivatives of
/// shared subtrees are themselves shared, which keeps compiled tapes small.
class Differentiator {
 public:
  Expr operator()(const Expr& e, int index);

 private:
  struct Key {
    const ExprNode* node;
    int index;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  // Keeps the differentiated nodes alive so their addresses stay unique.
  std::unordered_map<Key, std::pair<Expr, Expr>, KeyHash> memo_;
};

/// Evaluates `e` at `point` (indexed by coordinate). Throws SingularEvaluation.
double evaluate(const Expr& e, std::span<const double> point);

/// Replaces every Var(i) by `replacement[i]`; entries beyond the vector, or
/// empty slots, leave the variable untouched.
Expr substitute(const Expr& e, const std::vector<std::optional<Expr>>& replacement);

/// Renumbers variables: Var(i) becomes Var(mapping[i]) keeping its name.
Expr reindex(const Expr& e, std::span<const int> mapping);

/// Prints with minimal parentheses; the output parses back to the same tree.
std::string to_string(const Expr& e);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double v);

bool structurally_equal(const Expr& a, const Expr& b);

// ---------------------------------------------------------------------------
// Sampling domains and the sampled constancy tests.

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

using Point = std::vector<double>;

/// Axis-aligned chart domain; one closed interval per coordinate.
class ChartBox {
 public:
  ChartBox() = default;
  explicit ChartBox(std::vector<Interval> intervals);

  std::size_t dim() const { return intervals_.size(); }
  const Interval& operator[](std::size_t i) const { return intervals_[i]; }
  const std::vector<Interval>& intervals() const { return intervals_; }

  Point center() const;
  bool contains(std::span<const double> p) const;

  /// Box restricted to the listed coordinates, in the given order.
  ChartBox restrict(std::span<const int> coords) const;

 private:
  std::vector<Interval> intervals_;
};

/// Options of the sampled "is this function constant" decision.
struct ConstancyTest {
  int samples = 50;
  double rel_tol = 1e-12;
  std::uint64_t seed = 0;
};

/// True iff differentiate(e, v) is not identically zero on the box, decided
/// by sampling: |De| must exceed rel_tol * max|e| at some sample point.
bool depends_on(const Expr& e, int index, const ChartBox& box, const ConstancyTest& test = {});

/// True iff |e| <= tol at every regular sample point. Singular points are
/// replaced; throws InsufficientSamples when more than half are singular.
bool is_identically_zero(const Expr& e, const ChartBox& box, int samples, double tol,
                         std::uint64_t seed = 0);

}  // namespace kemweb
