#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace herglotz {

using VariableBinding = std::map<std::string, double, std::less<>>;

// Immutable expression tree.  Copies share nodes.
class Expr {
 public:
  enum class Kind : std::uint8_t {
    constant,
    variable,
    negate,
    add,
    subtract,
    multiply,
    divide,
    power,
    call
  };
  enum class Function : std::uint8_t { sin, cos, exp, log, sqrt, tanh };

  Expr();  // literal 0

  // Raw constructors: no simplification, the tree is kept as given.
  static Expr constant(double value);
  static Expr variable(std::string name);
  static Expr unary(Kind kind, Expr operand);
  static Expr binary(Kind kind, Expr lhs, Expr rhs);
  static Expr call(Function f, Expr argument);

  Kind kind() const noexcept;
  double value() const;              // constant
  const std::string& name() const;   // variable
  Function function() const;         // call
  const Expr& lhs() const;           // binary, or the operand of negate/call
  const Expr& rhs() const;           // binary

  bool is_constant() const noexcept { return kind() == Kind::constant; }
  bool is_constant(double v) const noexcept;

  // Structural identity (same tree shape, same literals bit for bit).
  bool same_as(const Expr& other) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Simplifying builders: fold constants and drop 0/1 identities.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr apply(Expr::Function f, const Expr& argument);

std::string_view function_name(Expr::Function f);
bool is_function_name(std::string_view name);

Expr parse_expression(std::string_view src);

// Fully parenthesised, literals printed shortest-round-trip.
std::string unparse(const Expr& e);

double evaluate(const Expr& e, const VariableBinding& binding);

Expr differentiate(const Expr& e, std::string_view var);

Expr simplify(const Expr& e);

std::set<std::string> free_variables(const Expr& e);
bool depends_on(const Expr& e, std::string_view var);

Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacements);

// Flat postfix program over a fixed slot layout.  Produces the same bits as
// evaluate() for the same inputs.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, const std::vector<std::string>& slots);

  double operator()(std::span<const double> slots) const;
  bool empty() const noexcept { return code_.empty(); }

 private:
  enum class Op : std::uint8_t {
    constant,
    slot,
    negate,
    add,
    subtract,
    multiply,
    divide,
    power,
    sin,
    cos,
    exp,
    log,
    sqrt,
    tanh
  };
  struct Instr {
    Op op;
    std::uint32_t arg;
  };
  void emit(const Expr& e, const std::map<std::string, std::uint32_t, std::less<>>& index,
            int depth);

  std::vector<Instr> code_;
  std::vector<double> constants_;
  int stack_size_ = 0;
};

}  // namespace herglotz
