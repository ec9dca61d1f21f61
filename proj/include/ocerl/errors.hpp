#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ocerl {

/// Argument outside the domain a function is defined on.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Invalid argument or parameter combination.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A model (MDP, distribution, lattice) failed validation on construction.
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke a documented precondition, e.g. a policy undefined at a
/// reached augmented state.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The brute-force oracle refuses to enumerate more policies than its cap.
class RefusalError : public std::runtime_error {
 public:
  RefusalError(const std::string& what, std::uint64_t required)
      : std::runtime_error(what), required_(required) {}

  std::uint64_t required() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

/// Malformed MDP spec file; carries the offending 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Invalid experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ocerl
