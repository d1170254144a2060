#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace impdde {

// Base of every error raised by the library. The kind is what the command
// line maps to a process exit code.
class Error : public std::runtime_error {
 public:
  enum class Kind { config, numerical, assumption };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Malformed input: bad configuration, failed preconditions, parse errors.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Kind::config, what) {}
};

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : ConfigError(what + " at offset " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Non-finite state, failed convergence, domain errors during evaluation.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(Kind::numerical, what) {}
};

class DomainError : public NumericalError {
 public:
  explicit DomainError(const std::string& what) : NumericalError(what) {}
};

// A standing hypothesis of the theory (a_L > 0, bounded jump products, ...) fails.
class AssumptionError : public Error {
 public:
  explicit AssumptionError(const std::string& what) : Error(Kind::assumption, what) {}
};

}  // namespace impdde
