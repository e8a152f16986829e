#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kemweb/expr.hpp"

namespace kemweb {

/// A batch of expressions flattened into a linear instruction list.
///
/// Shared subtrees (same node identity) are evaluated once per call, which is
/// what makes exact curvature evaluation affordable: Christoffel symbols and
/// their derivatives share most of their structure.
class Tape {
 public:
  Tape() = default;
  explicit Tape(std::span<const Expr> outputs);

  std::size_t output_count() const { return outputs_.size(); }
  std::size_t instruction_count() const { return code_.size(); }

  /// Evaluates all outputs. `scratch` is resized as needed so callers can
  /// reuse it across points. Throws SingularEvaluation.
  void evaluate(std::span<const double> point, std::span<double> out,
                std::vector<double>& scratch) const;

  std::vector<double> evaluate(std::span<const double> point) const;

 private:
  struct Instr {
    Op op;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double value = 0.0;  // constant value or variable index
  };
  std::vector<Instr> code_;
  std::vector<std::uint32_t> outputs_;
};

}  // namespace kemweb
