#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "herglotz/expr.hpp"

namespace herglotz {

// Flat argument layout of the Lagrangian: t, z, then x_c^(k) for every component c and
// order k = 0..n, then the same block evaluated at t - tau.
class SlotLayout {
 public:
  SlotLayout() = default;
  SlotLayout(int order, int dimension);

  int order() const noexcept { return n_; }
  int dimension() const noexcept { return m_; }
  std::size_t size() const noexcept { return names_.size(); }

  static constexpr std::size_t time = 0;
  static constexpr std::size_t value = 1;  // z
  std::size_t state(int component, int k) const {
    return 2 + static_cast<std::size_t>(component * (n_ + 1) + k);
  }
  std::size_t delayed(int component, int k) const {
    return 2 + static_cast<std::size_t>((m_ + component) * (n_ + 1) + k);
  }

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t slot) const { return names_[slot]; }

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<std::string> names_;
};

// Canonical name: x1, xd1, xdd1, x1_d3, ...; delayed slots get a tau_ prefix.
// component is 0-based here, names are 1-based.
std::string slot_name(int component, int k, bool delayed);

struct LagrangianSpec {
  int n = 1;
  int m = 1;
  SlotLayout layout;
  Expr body;
  std::vector<Expr> partials;  // indexed like layout
  CompiledExpr compiled_body;
  std::vector<CompiledExpr> compiled_partials;

  const Expr& partial(std::size_t slot) const { return partials[slot]; }
  bool depends_on_slot(std::size_t slot) const { return !partials[slot].is_constant(0.0); }
};

LagrangianSpec make_lagrangian(const Expr& body, int n, int m);

struct ProblemFileContent;

struct ProblemSpec {
  double a = 0.0;
  double b = 1.0;
  double tau = 0.0;
  double gamma = 0.0;
  LagrangianSpec lagrangian;
  std::vector<Expr> history;                          // mu_c(t)
  std::vector<std::vector<Expr>> history_derivatives;  // [c][k], k = 0..n
  std::vector<std::vector<CompiledExpr>> compiled_history;

  int order() const noexcept { return lagrangian.n; }
  int dimension() const noexcept { return lagrangian.m; }
  const SlotLayout& layout() const noexcept { return lagrangian.layout; }
};

// Validates everything (interval, delay, slot names, finite-difference check of the
// partials) and throws ValidationError with the full list of problems.  The derivative
// check can be skipped for callers that report it themselves.
ProblemSpec build_problem(const ProblemFileContent& raw, bool check_derivatives = true);

// Assembles a spec from already parsed pieces without the interval and delay checks.
// The Lagrangian body is rewritten to canonical slot names.
ProblemSpec assemble_problem(double a, double b, double tau, double gamma, const Expr& lagrangian,
                             const std::vector<Expr>& history, int n, int m);

double history_derivative(const ProblemSpec& p, int component, int k, double t);

// Rewrites alias spellings (x1_d0, x1_d1, x1_d2, tau_x1_d1, ...) to canonical slot names.
Expr canonical_slots(const Expr& e, int n, int m);

struct DerivativeCheck {
  std::string slot;
  double symbolic = 0.0;
  double finite_difference = 0.0;
  double relative_error = 0.0;
};

// Central-difference check of every partial at `points` random bindings.
std::vector<DerivativeCheck> check_partials(const ProblemSpec& p, int points, unsigned seed);

}  // namespace herglotz
