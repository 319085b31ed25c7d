#pragma once

#include <stdexcept>
#include <string>

namespace lpval {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidMeasureError : Error { using Error::Error; };
struct IncompatibleDomainError : Error { using Error::Error; };
struct InvalidExponentError : Error { using Error::Error; };
struct InvalidGeneratorError : Error { using Error::Error; };
struct InvalidBoundsError : Error { using Error::Error; };
struct SupportOverflowError : Error { using Error::Error; };
struct InvalidRotationError : Error { using Error::Error; };
struct InvalidScenarioError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace lpval
