#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace povmtree {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when operands have incompatible or oversized dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when an input violates a documented precondition. The message
/// starts with the offending field when one is known.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Raised by the exhaustive optimizer when the search space exceeds the
/// configured budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(double cost, double budget)
      : Error(message(cost, budget)),
        cost_(cost),
        budget_(budget) {}

  double cost() const { return cost_; }
  double budget() const { return budget_; }

 private:
  static std::string message(double cost, double budget) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "exhaustive search needs %.6g combinations, budget is %.6g",
                  cost, budget);
    return buf;
  }

  double cost_;
  double budget_;
};

}  // namespace povmtree
