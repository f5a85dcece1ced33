#pragma once

#include <cmath>
#include <string>

#include "herglotz/error.hpp"
#include "herglotz/expr.hpp"

namespace herglotz::detail {

// Shared by the tree walker and the compiled evaluator so both give identical bits.
inline double apply_function(Expr::Function f, double x) {
  switch (f) {
    case Expr::Function::sin:
      return std::sin(x);
    case Expr::Function::cos:
      return std::cos(x);
    case Expr::Function::exp:
      return std::exp(x);
    case Expr::Function::log:
      if (x < 0.0) throw DomainError("log of negative argument " + std::to_string(x));
      return std::log(x);
    case Expr::Function::sqrt:
      if (x < 0.0) throw DomainError("sqrt of negative argument " + std::to_string(x));
      return std::sqrt(x);
    case Expr::Function::tanh:
      return std::tanh(x);
  }
  return 0.0;
}

inline double apply_power(double base, double exponent) { return std::pow(base, exponent); }

}  // namespace herglotz::detail
