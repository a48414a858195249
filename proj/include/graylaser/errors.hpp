#pragma once

#include <stdexcept>

namespace graylaser {

// Raised when a run is configured outside the regime a model assumes.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a numerical procedure fails (blow-up, unwrap failure, windowing).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace graylaser
