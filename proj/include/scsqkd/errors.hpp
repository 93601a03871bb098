#pragma once

#include <stdexcept>
#include <string>

namespace scsqkd {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Vacuum-projection bounds whose overlap vanishes, so no finite equivalent intensity exists.
class DegenerateMapping : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AsymmetryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ZeroWindows : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoPositiveRate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scsqkd
