#ifndef TDSTAB_ERRORS_HPP
#define TDSTAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tdstab {

/// Invalid or inconsistent user input: bad matrices, malformed configs,
/// violated preconditions. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric routine failed on otherwise valid input (singular system,
/// ill-conditioned solve). Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tdstab

#endif  // TDSTAB_ERRORS_HPP
