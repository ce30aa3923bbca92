#pragma once

#include <stdexcept>
#include <string>

namespace sfprime {

// Raised when an AlphaSpec cannot certify the requested accuracy
// (argument outside the precision budget, or too few partial quotients).
class precision_error : public std::runtime_error {
 public:
  explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an exact integer result does not fit the result type.
class overflow_error : public std::runtime_error {
 public:
  explicit overflow_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sfprime
