#ifndef CHIPLETPLACE_ERROR_HPP
#define CHIPLETPLACE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace chiplet {

// Exit codes used by the CLI: 1 usage, 2 validation, 3 solver failure.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or schema-violating config file.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Semantically invalid input (infeasible placement, bad cross-reference, ...).
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Numerical solver failure (non-convergence, unroutable instance, ...).
class SolverError : public Error {
public:
  explicit SolverError(const std::string& msg) : Error(msg) {}
};

} // namespace chiplet

#endif
