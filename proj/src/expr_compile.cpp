#include <algorithm>
#include <string>

#include "expr_math.hpp"
#include "herglotz/error.hpp"
#include "herglotz/expr.hpp"

namespace herglotz {

CompiledExpr::CompiledExpr(const Expr& e, const std::vector<std::string>& slots) {
  std::map<std::string, std::uint32_t, std::less<>> index;
  for (std::uint32_t i = 0; i < slots.size(); ++i) index.emplace(slots[i], i);
  emit(e, index, 1);
}

void CompiledExpr::emit(const Expr& e,
                        const std::map<std::string, std::uint32_t, std::less<>>& index,
                        int depth) {
  stack_size_ = std::max(stack_size_, depth);
  switch (e.kind()) {
    case Expr::Kind::constant:
      code_.push_back({Op::constant, static_cast<std::uint32_t>(constants_.size())});
      constants_.push_back(e.value());
      return;
    case Expr::Kind::variable: {
      auto it = index.find(e.name());
      if (it == index.end()) throw UnboundVariable(e.name());
      code_.push_back({Op::slot, it->second});
      return;
    }
    case Expr::Kind::negate:
      emit(e.lhs(), index, depth);
      code_.push_back({Op::negate, 0});
      return;
    case Expr::Kind::call: {
      emit(e.lhs(), index, depth);
      static constexpr Op fops[] = {Op::sin, Op::cos, Op::exp, Op::log, Op::sqrt, Op::tanh};
      code_.push_back({fops[static_cast<int>(e.function())], 0});
      return;
    }
    default:
      break;
  }
  emit(e.lhs(), index, depth);
  emit(e.rhs(), index, depth + 1);
  static constexpr Op bops[] = {Op::add, Op::subtract, Op::multiply, Op::divide, Op::power};
  code_.push_back({bops[static_cast<int>(e.kind()) - static_cast<int>(Expr::Kind::add)], 0});
}

double CompiledExpr::operator()(std::span<const double> slots) const {
  // expressions from user input are shallow; fall back to the heap only for deep ones
  double local[64];
  std::vector<double> heap;
  double* st = local;
  if (stack_size_ > 64) {
    heap.resize(stack_size_);
    st = heap.data();
  }
  int top = -1;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::constant:
        st[++top] = constants_[in.arg];
        break;
      case Op::slot:
        st[++top] = slots[in.arg];
        break;
      case Op::negate:
        st[top] = -st[top];
        break;
      case Op::add:
        --top;
        st[top] = st[top] + st[top + 1];
        break;
      case Op::subtract:
        --top;
        st[top] = st[top] - st[top + 1];
        break;
      case Op::multiply:
        --top;
        st[top] = st[top] * st[top + 1];
        break;
      case Op::divide:
        --top;
        st[top] = st[top] / st[top + 1];
        break;
      case Op::power:
        --top;
        st[top] = detail::apply_power(st[top], st[top + 1]);
        break;
      case Op::sin:
        st[top] = detail::apply_function(Expr::Function::sin, st[top]);
        break;
      case Op::cos:
        st[top] = detail::apply_function(Expr::Function::cos, st[top]);
        break;
      case Op::exp:
        st[top] = detail::apply_function(Expr::Function::exp, st[top]);
        break;
      case Op::log:
        st[top] = detail::apply_function(Expr::Function::log, st[top]);
        break;
      case Op::sqrt:
        st[top] = detail::apply_function(Expr::Function::sqrt, st[top]);
        break;
      case Op::tanh:
        st[top] = detail::apply_function(Expr::Function::tanh, st[top]);
        break;
    }
  }
  return code_.empty() ? 0.0 : st[0];
}

}  // namespace herglotz
