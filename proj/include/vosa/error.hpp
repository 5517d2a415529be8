#pragma once

#include <stdexcept>
#include <string>

namespace vosa {

/// Error categories double as process exit codes for the CLI.
enum class ErrorCategory {
  config = 2,
  parse = 3,
  contract = 4,
  io = 5,
  replay_mismatch = 6,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category)
  {
  }

  ErrorCategory category() const noexcept { return category_; }

private:
  ErrorCategory category_;
};

/// Malformed scenario or experiment configuration.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(ErrorCategory::parse, what) {}
};

struct ContractViolation : Error {
  explicit ContractViolation(const std::string& what) : Error(ErrorCategory::contract, what) {}
};

/// Clustering was asked for more clusters than there are points.
struct InsufficientPoints : Error {
  InsufficientPoints(std::size_t points, int k)
      : Error(ErrorCategory::contract,
              "k-means needs at least k points (k=" + std::to_string(k) +
                  ", points=" + std::to_string(points) + ")")
  {
  }
};

const char* to_string(ErrorCategory c);

}  // namespace vosa
