#pragma once

#include <stdexcept>
#include <string>

namespace snc {

// Invalid construction parameters (duplicate evaluation points, field too small, ...).
class ConstructionError : public std::invalid_argument {
 public:
  explicit ConstructionError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when an exhaustive computation would exceed its enumeration budget.
class BudgetExceeded : public std::length_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::length_error(what) {}
};

}  // namespace snc
