#pragma once

#include <stdexcept>
#include <string>

namespace hypercone {

/// Raised for every contract violation in the library. The message names
/// the violated condition so the CLI can forward it verbatim.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an argument lies outside the domain of a formula
/// (r <= 0, alpha == 0, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

}  // namespace hypercone
