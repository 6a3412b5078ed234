#pragma once

#include <stdexcept>
#include <string>

namespace floquet_pt {

/// Invalid physical parameters or malformed protocol.
struct ValidationError : std::invalid_argument {
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Malformed configuration document (unknown key, missing field, ...).
struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A numerical routine could not reach its accuracy target.
struct PrecisionError : std::runtime_error {
  explicit PrecisionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Root bracketing failed (no sign change over the requested interval).
struct BracketingError : std::runtime_error {
  explicit BracketingError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Internal consistency check failed; indicates an algebra bug, not bad input.
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace floquet_pt
