#pragma once

#include <stdexcept>
#include <string>

namespace bersim {

/// Raised for malformed configs, scenario files, and wind logs. Loading
/// validates everything up front; simulation code never throws on domain
/// infeasibility (that is carried in result values).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bersim
