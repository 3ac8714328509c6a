#ifndef BURSTMODEM_ERRORS_HPP
#define BURSTMODEM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bm {

// Invalid configuration or inputs that violate an operation precondition.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failure (underflow/non-finite metrics).
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bm

#endif
