#pragma once

#include <stdexcept>
#include <string>

namespace zograd {

// Malformed arguments: non-finite points, bad sizes, odd budgets, unknown selectors.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The oracle ran out of evaluations.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A user-supplied callable broke its declared contract (e.g. variance above b).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The requested quantity degenerates (e.g. optimal step with zero noise).
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A perturbation law produced a draw the estimator cannot divide by.
class DistributionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zograd
