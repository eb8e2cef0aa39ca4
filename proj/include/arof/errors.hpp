#pragma once
#include <stdexcept>
#include <string>

namespace arof {

// Spectral content would land outside a representable or allowed band.
struct BandError : std::runtime_error {
  explicit BandError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or physically inconsistent configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed frame, capture, or file payload.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace arof
