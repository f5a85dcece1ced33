#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace herglotz {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: problem files, expressions, trajectories.  CLI exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown on otherwise valid input.  CLI exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public InputError {
 public:
  SyntaxError(std::size_t offset, const std::string& message);
  // 1-based byte offset into the source text
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownFunction : public InputError {
 public:
  UnknownFunction(std::string name, std::size_t offset);
  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

class UnboundVariable : public InputError {
 public:
  explicit UnboundVariable(std::string name);
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class ValidationError : public InputError {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  explicit ValidationError(const std::string& issue)
      : ValidationError(std::vector<std::string>{issue}) {}
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

class ZeroDelay : public InputError {
 public:
  ZeroDelay() : InputError("reduction needs a positive delay") {}
};

class DimensionMismatch : public InputError {
 public:
  using InputError::InputError;
};

class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

class OutOfRange : public NumericError {
 public:
  using NumericError::NumericError;
};

class OutOfHistoryRange : public OutOfRange {
 public:
  explicit OutOfHistoryRange(double t);
  double time() const noexcept { return t_; }

 private:
  double t_;
};

class GridTooSmall : public NumericError {
 public:
  GridTooSmall(std::size_t nodes, std::size_t needed);
};

class NonFiniteLagrangian : public NumericError {
 public:
  explicit NonFiniteLagrangian(double t);
  double time() const noexcept { return t_; }

 private:
  double t_;
};

class DegenerateFamily : public NumericError {
 public:
  DegenerateFamily(double t, double s);
};

class SingularJacobian : public NumericError {
 public:
  explicit SingularJacobian(double rcond);
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

}  // namespace herglotz
