#pragma once

#include <cmath>
#include <string>

#include "kemweb/errors.hpp"
#include "kemweb/expr.hpp"

namespace kemweb::detail {

[[noreturn]] inline void singular(const char* what) {
  throw SingularEvaluation(std::string("singular evaluation: ") + what);
}

inline double checked(double v, const char* what) {
  if (!std::isfinite(v)) singular(what);
  return v;
}

inline double power(double base, double exponent) {
  const bool integral = std::nearbyint(exponent) == exponent;
  if (!integral && base < 0.0) singular("non-integer power of a negative base");
  if (base == 0.0 && exponent < 0.0) singular("negative power of zero");
  if (integral && std::abs(exponent) <= 4.0) {
    // Small integer powers by multiplication keep the results bit-stable.
    const int k = static_cast<int>(std::abs(exponent));
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= base;
    return checked(exponent < 0.0 ? 1.0 / r : r, "power");
  }
  return checked(std::pow(base, exponent), "power");
}

/// Applies a non-leaf operation to already evaluated operands.
inline double apply(Op op, double a, double b) {
  switch (op) {
    case Op::Add: return checked(a + b, "addition");
    case Op::Sub: return checked(a - b, "subtraction");
    case Op::Mul: return checked(a * b, "multiplication");
    case Op::Div:
      if (b == 0.0) singular("division by zero");
      return checked(a / b, "division");
    case Op::Pow: return power(a, b);
    case Op::Neg: return -a;
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Tan: return checked(std::tan(a), "tan");
    case Op::Sinh: return checked(std::sinh(a), "sinh");
    case Op::Cosh: return checked(std::cosh(a), "cosh");
    case Op::Tanh: return std::tanh(a);
    case Op::Exp: return checked(std::exp(a), "exp");
    case Op::Log:
      if (!(a > 0.0)) singular("log of a non-positive value");
      return std::log(a);
    case Op::Sqrt:
      if (a < 0.0) singular("sqrt of a negative value");
      return std::sqrt(a);
    case Op::Constant:
    case Op::Var: break;
  }
  singular("leaf passed to apply");
}

}  // namespace kemweb::detail
