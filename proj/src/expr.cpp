#include "herglotz/expr.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

#include "expr_math.hpp"
#include "herglotz/error.hpp"

namespace herglotz {

struct Expr::Node {
  Kind kind = Kind::constant;
  double value = 0.0;
  std::string name;
  Function function = Function::sin;
  Expr lhs;
  Expr rhs;
};

namespace {

constexpr std::array<std::pair<std::string_view, Expr::Function>, 6> kFunctions{{
    {"sin", Expr::Function::sin},
    {"cos", Expr::Function::cos},
    {"exp", Expr::Function::exp},
    {"log", Expr::Function::log},
    {"sqrt", Expr::Function::sqrt},
    {"tanh", Expr::Function::tanh},
}};

bool is_binary(Expr::Kind k) {
  return k == Expr::Kind::add || k == Expr::Kind::subtract || k == Expr::Kind::multiply ||
         k == Expr::Kind::divide || k == Expr::Kind::power;
}

}  // namespace

// Expr::Node holds Expr members, so the default literal needs a node of its own
// without recursing into Expr().
Expr::Expr() {
  static const std::shared_ptr<const Node> zero = [] {
    auto n = std::shared_ptr<Node>(new Node{Kind::constant, 0.0, {}, Function::sin,
                                            Expr(std::shared_ptr<const Node>()),
                                            Expr(std::shared_ptr<const Node>())});
    return std::shared_ptr<const Node>(std::move(n));
  }();
  node_ = zero;
}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::variable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unary(Kind kind, Expr operand) {
  if (kind != Kind::negate) throw std::invalid_argument("Expr::unary: not a unary kind");
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(operand);
  return Expr(std::move(n));
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs) {
  if (!is_binary(kind)) throw std::invalid_argument("Expr::binary: not a binary kind");
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Expr(std::move(n));
}

Expr Expr::call(Function f, Expr argument) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::call;
  n->function = f;
  n->lhs = std::move(argument);
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Expr::Function Expr::function() const { return node_->function; }
const Expr& Expr::lhs() const { return node_->lhs; }
const Expr& Expr::rhs() const { return node_->rhs; }

bool Expr::is_constant(double v) const noexcept {
  return node_->kind == Kind::constant && node_->value == v;
}

bool Expr::same_as(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::constant:
      return std::bit_cast<std::uint64_t>(value()) == std::bit_cast<std::uint64_t>(other.value());
    case Kind::variable:
      return name() == other.name();
    case Kind::negate:
      return lhs().same_as(other.lhs());
    case Kind::call:
      return function() == other.function() && lhs().same_as(other.lhs());
    default:
      return lhs().same_as(other.lhs()) && rhs().same_as(other.rhs());
  }
}

std::string_view function_name(Expr::Function f) {
  for (const auto& [name, fn] : kFunctions)
    if (fn == f) return name;
  return "?";
}

bool is_function_name(std::string_view name) {
  for (const auto& entry : kFunctions)
    if (entry.first == name) return true;
  return false;
}

// ---- simplifying builders ----

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() + b.value());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (b.kind() == Expr::Kind::negate) return a - b.lhs();
  return Expr::binary(Expr::Kind::add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() - b.value());
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  if (b.kind() == Expr::Kind::negate) return a + b.lhs();
  return Expr::binary(Expr::Kind::subtract, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() * b.value());
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  if (a.kind() == Expr::Kind::negate && b.kind() == Expr::Kind::negate) return a.lhs() * b.lhs();
  return Expr::binary(Expr::Kind::multiply, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.value() != 0.0)
    return Expr::constant(a.value() / b.value());
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
  if (b.is_constant(1.0)) return a;
  return Expr::binary(Expr::Kind::divide, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  if (a.kind() == Expr::Kind::negate) return a.lhs();
  return Expr::unary(Expr::Kind::negate, a);
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (base.is_constant() && exponent.is_constant())
    return Expr::constant(detail::apply_power(base.value(), exponent.value()));
  if (exponent.is_constant(1.0)) return base;
  if (exponent.is_constant(0.0)) return Expr::constant(1.0);
  // (u^c)^d -> u^(c*d) only when both are integers, where it is exact for all u
  if (base.kind() == Expr::Kind::power && base.rhs().is_constant() && exponent.is_constant()) {
    const double c = base.rhs().value();
    const double d = exponent.value();
    if (c == std::floor(c) && d == std::floor(d) && std::abs(c * d) < 1e6)
      return pow(base.lhs(), Expr::constant(c * d));
  }
  return Expr::binary(Expr::Kind::power, base, exponent);
}

Expr apply(Expr::Function f, const Expr& argument) {
  if (argument.is_constant()) {
    const double v = argument.value();
    // fold only where the result is a clean literal; keep log/sqrt domain errors for evaluation
    if ((f == Expr::Function::log && v <= 0.0) || (f == Expr::Function::sqrt && v < 0.0))
      return Expr::call(f, argument);
    return Expr::constant(detail::apply_function(f, v));
  }
  return Expr::call(f, argument);
}

// ---- parser ----

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    skip_space();
    if (pos_ == src_.size()) fail(pos_, "empty expression");
    Expr e = parse_sum();
    skip_space();
    if (pos_ != src_.size()) fail(pos_, std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw SyntaxError(at + 1, msg);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+'))
        lhs = Expr::binary(Expr::Kind::add, lhs, parse_product());
      else if (accept('-'))
        lhs = Expr::binary(Expr::Kind::subtract, lhs, parse_product());
      else
        return lhs;
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = Expr::binary(Expr::Kind::multiply, lhs, parse_unary());
      else if (accept('/'))
        lhs = Expr::binary(Expr::Kind::divide, lhs, parse_unary());
      else
        return lhs;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::unary(Expr::Kind::negate, parse_unary());
    return parse_power();
  }

  // right associative; the exponent may carry a unary minus (x^-2)
  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return Expr::binary(Expr::Kind::power, base, parse_unary());
    return base;
  }

  Expr parse_primary() {
    skip_space();
    if (pos_ == src_.size()) fail(pos_, "unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      if (!accept(')')) fail(pos_, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    fail(pos_, std::string("unexpected '") + c + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail(start, "malformed number");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;  // "2e" followed by something else: not an exponent
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_) fail(start, "malformed number");
    return Expr::constant(v);
  }

  Expr parse_name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    std::size_t after = pos_;
    skip_space();
    const bool is_call = pos_ < src_.size() && src_[pos_] == '(';
    if (!is_call) {
      pos_ = after;
      if (is_function_name(name)) fail(start, "function '" + name + "' used without arguments");
      return Expr::variable(std::move(name));
    }
    for (const auto& [fname, fn] : kFunctions) {
      if (fname == name) {
        ++pos_;
        Expr arg = parse_sum();
        if (!accept(')')) fail(pos_, "expected ')'");
        return Expr::call(fn, std::move(arg));
      }
    }
    throw UnknownFunction(name, start + 1);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view src) { return Parser(src).parse(); }

// ---- unparse ----

namespace {

void format_literal(double v, std::string& out) {
  if (std::isnan(v)) {
    out += "(0 / 0)";
    return;
  }
  if (std::isinf(v)) {
    out += v > 0 ? "(1 / 0)" : "(-1 / 0)";
    return;
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::abs(v));
  (void)ec;
  if (std::signbit(v)) {
    out += "(-";
    out.append(buf, ptr);
    out += ')';
  } else {
    out.append(buf, ptr);
  }
}

void unparse_into(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::constant:
      format_literal(e.value(), out);
      return;
    case Expr::Kind::variable:
      out += e.name();
      return;
    case Expr::Kind::negate:
      out += "(-";
      unparse_into(e.lhs(), out);
      out += ')';
      return;
    case Expr::Kind::call:
      out += function_name(e.function());
      out += '(';
      unparse_into(e.lhs(), out);
      out += ')';
      return;
    default:
      break;
  }
  static constexpr std::string_view ops[] = {" + ", " - ", " * ", " / ", " ^ "};
  const auto k = static_cast<int>(e.kind()) - static_cast<int>(Expr::Kind::add);
  out += '(';
  unparse_into(e.lhs(), out);
  out += ops[k];
  unparse_into(e.rhs(), out);
  out += ')';
}

}  // namespace

std::string unparse(const Expr& e) {
  std::string out;
  unparse_into(e, out);
  return out;
}

// ---- evaluation ----

double evaluate(const Expr& e, const VariableBinding& binding) {
  switch (e.kind()) {
    case Expr::Kind::constant:
      return e.value();
    case Expr::Kind::variable: {
      auto it = binding.find(e.name());
      if (it == binding.end()) throw UnboundVariable(e.name());
      return it->second;
    }
    case Expr::Kind::negate:
      return -evaluate(e.lhs(), binding);
    case Expr::Kind::add:
      return evaluate(e.lhs(), binding) + evaluate(e.rhs(), binding);
    case Expr::Kind::subtract:
      return evaluate(e.lhs(), binding) - evaluate(e.rhs(), binding);
    case Expr::Kind::multiply:
      return evaluate(e.lhs(), binding) * evaluate(e.rhs(), binding);
    case Expr::Kind::divide:
      return evaluate(e.lhs(), binding) / evaluate(e.rhs(), binding);
    case Expr::Kind::power:
      return detail::apply_power(evaluate(e.lhs(), binding), evaluate(e.rhs(), binding));
    case Expr::Kind::call:
      return detail::apply_function(e.function(), evaluate(e.lhs(), binding));
  }
  return 0.0;
}

// ---- analysis ----

namespace {

void collect(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expr::Kind::constant:
      return;
    case Expr::Kind::variable:
      out.insert(e.name());
      return;
    case Expr::Kind::negate:
    case Expr::Kind::call:
      collect(e.lhs(), out);
      return;
    default:
      collect(e.lhs(), out);
      collect(e.rhs(), out);
  }
}

}  // namespace

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  collect(e, out);
  return out;
}

bool depends_on(const Expr& e, std::string_view var) {
  switch (e.kind()) {
    case Expr::Kind::constant:
      return false;
    case Expr::Kind::variable:
      return e.name() == var;
    case Expr::Kind::negate:
    case Expr::Kind::call:
      return depends_on(e.lhs(), var);
    default:
      return depends_on(e.lhs(), var) || depends_on(e.rhs(), var);
  }
}

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::constant:
    case Expr::Kind::variable:
      return e;
    case Expr::Kind::negate:
      return -simplify(e.lhs());
    case Expr::Kind::call:
      return apply(e.function(), simplify(e.lhs()));
    case Expr::Kind::add:
      return simplify(e.lhs()) + simplify(e.rhs());
    case Expr::Kind::subtract:
      return simplify(e.lhs()) - simplify(e.rhs());
    case Expr::Kind::multiply:
      return simplify(e.lhs()) * simplify(e.rhs());
    case Expr::Kind::divide:
      return simplify(e.lhs()) / simplify(e.rhs());
    case Expr::Kind::power:
      return pow(simplify(e.lhs()), simplify(e.rhs()));
  }
  return e;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacements) {
  switch (e.kind()) {
    case Expr::Kind::constant:
      return e;
    case Expr::Kind::variable: {
      auto it = replacements.find(e.name());
      return it == replacements.end() ? e : it->second;
    }
    case Expr::Kind::negate:
      return Expr::unary(Expr::Kind::negate, substitute(e.lhs(), replacements));
    case Expr::Kind::call:
      return Expr::call(e.function(), substitute(e.lhs(), replacements));
    default:
      return Expr::binary(e.kind(), substitute(e.lhs(), replacements),
                          substitute(e.rhs(), replacements));
  }
}

// ---- differentiation ----

namespace {

Expr d(const Expr& e, std::string_view v) {
  if (!depends_on(e, v)) return Expr::constant(0.0);
  const Expr& a = e.lhs();
  switch (e.kind()) {
    case Expr::Kind::constant:
      return Expr::constant(0.0);
    case Expr::Kind::variable:
      return Expr::constant(1.0);
    case Expr::Kind::negate:
      return -d(a, v);
    case Expr::Kind::add:
      return d(a, v) + d(e.rhs(), v);
    case Expr::Kind::subtract:
      return d(a, v) - d(e.rhs(), v);
    case Expr::Kind::multiply:
      return d(a, v) * e.rhs() + a * d(e.rhs(), v);
    case Expr::Kind::divide: {
      const Expr& b = e.rhs();
      if (!depends_on(b, v)) return d(a, v) / b;
      return (d(a, v) * b - a * d(b, v)) / pow(b, Expr::constant(2.0));
    }
    case Expr::Kind::power: {
      const Expr& b = e.rhs();
      if (!depends_on(b, v)) return b * pow(a, b - Expr::constant(1.0)) * d(a, v);
      if (!depends_on(a, v)) return e * apply(Expr::Function::log, a) * d(b, v);
      return e * (d(b, v) * apply(Expr::Function::log, a) + b * d(a, v) / a);
    }
    case Expr::Kind::call: {
      const Expr da = d(a, v);
      switch (e.function()) {
        case Expr::Function::sin:
          return apply(Expr::Function::cos, a) * da;
        case Expr::Function::cos:
          return -(apply(Expr::Function::sin, a) * da);
        case Expr::Function::exp:
          return e * da;
        case Expr::Function::log:
          return da / a;
        case Expr::Function::sqrt:
          return da / (Expr::constant(2.0) * e);
        case Expr::Function::tanh:
          return (Expr::constant(1.0) - pow(e, Expr::constant(2.0))) * da;
      }
    }
  }
  return Expr::constant(0.0);
}

}  // namespace

Expr differentiate(const Expr& e, std::string_view var) { return d(e, var); }

}  // namespace herglotz
