#pragma once

#include <stdexcept>
#include <string>

namespace flycat {

// Violated precondition or type invariant.
class contract_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: quadrature did not converge, out-of-support query, ...
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw contract_error(message);
}

}  // namespace flycat
