#include "herglotz/error.hpp"

#include <sstream>

namespace herglotz {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out;
  for (const auto& s : issues) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, const std::string& message)
    : InputError("syntax error at byte " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

UnknownFunction::UnknownFunction(std::string name, std::size_t offset)
    : InputError("unknown function '" + name + "' at byte " + std::to_string(offset)),
      name_(std::move(name)),
      offset_(offset) {}

UnboundVariable::UnboundVariable(std::string name)
    : InputError("unbound variable '" + name + "'"), name_(std::move(name)) {}

ValidationError::ValidationError(std::vector<std::string> issues)
    : InputError(join_issues(issues)), issues_(std::move(issues)) {}

OutOfHistoryRange::OutOfHistoryRange(double t)
    : OutOfRange("time " + fmt(t) + " is outside the history interval"), t_(t) {}

GridTooSmall::GridTooSmall(std::size_t nodes, std::size_t needed)
    : NumericError("series has " + std::to_string(nodes) + " nodes, need at least " +
                   std::to_string(needed)) {}

NonFiniteLagrangian::NonFiniteLagrangian(double t)
    : NumericError("Lagrangian is not finite at t = " + fmt(t)), t_(t) {}

DegenerateFamily::DegenerateFamily(double t, double s)
    : NumericError("dT/dt vanishes at t = " + fmt(t) + " for s = " + fmt(s)) {}

SingularJacobian::SingularJacobian(double rcond)
    : NumericError("singular Jacobian (reciprocal condition estimate " + fmt(rcond) + ")"),
      rcond_(rcond) {}

}  // namespace herglotz
