#pragma once

#include <stdexcept>
#include <string>

namespace csflab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A root-finding bracket whose end points have the same sign.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No point satisfies the constraints of an optimization problem.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside the regime where its formula is valid.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured work budget (codebook scan, draw count, enumeration) was exceeded.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, double partial_estimate)
      : std::runtime_error(what), partial_estimate_(partial_estimate) {}
  double partial_estimate() const noexcept { return partial_estimate_; }

 private:
  double partial_estimate_;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimated_error)
      : std::runtime_error(what), estimated_error_(estimated_error) {}
  double estimated_error() const noexcept { return estimated_error_; }

 private:
  double estimated_error_;
};

}  // namespace csflab
