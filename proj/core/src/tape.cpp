#include "kemweb/tape.hpp"

#include <unordered_map>

#include "eval_kernel.hpp"

namespace kemweb {

Tape::Tape(std::span<const Expr> outputs) {
  std::unordered_map<const ExprNode*, std::uint32_t> slot;
  // Iterative post-order so deep trees do not exhaust the stack.
  struct Frame {
    const Expr* e;
    bool expanded;
  };
  auto emit = [&](const Expr& root) -> std::uint32_t {
    std::vector<Frame> stack{{&root, false}};
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      if (slot.count(f.e->id())) continue;
      if (!f.expanded && f.e->arity() > 0) {
        stack.push_back({f.e, true});
        for (std::size_t k = f.e->arity(); k-- > 0;) stack.push_back({&f.e->arg(k), false});
        continue;
      }
      Instr ins{f.e->op()};
      switch (f.e->op()) {
        case Op::Constant: ins.value = f.e->value(); break;
        case Op::Var: ins.value = f.e->var_index(); break;
        default:
          ins.a = slot.at(f.e->arg(0).id());
          if (f.e->arity() == 2) ins.b = slot.at(f.e->arg(1).id());
          break;
      }
      slot.emplace(f.e->id(), static_cast<std::uint32_t>(code_.size()));
      code_.push_back(ins);
    }
    return slot.at(root.id());
  };
  outputs_.reserve(outputs.size());
  for (const Expr& e : outputs) outputs_.push_back(emit(e));
}

void Tape::evaluate(std::span<const double> point, std::span<double> out,
                    std::vector<double>& scratch) const {
  scratch.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& ins = code_[i];
    switch (ins.op) {
      case Op::Constant: scratch[i] = ins.value; break;
      case Op::Var: {
        const auto v = static_cast<std::size_t>(ins.value);
        if (v >= point.size()) throw InvalidArgument("point is missing a coordinate value");
        scratch[i] = point[v];
        break;
      }
      default: scratch[i] = detail::apply(ins.op, scratch[ins.a], scratch[ins.b]); break;
    }
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = scratch[outputs_[k]];
}

std::vector<double> Tape::evaluate(std::span<const double> point) const {
  std::vector<double> out(outputs_.size());
  std::vector<double> scratch;
  evaluate(point, out, scratch);
  return out;
}

}  // namespace kemweb
