#pragma once

#include <stdexcept>
#include <string>

namespace tsn {

/// Invalid topology, stream or schedule input.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A feature is not defined for the requested configuration.
class UnsupportedFeature : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The constraint IR cannot be expressed in the requested logic.
class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver model does not describe a complete schedule.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed problem, schedule or solver text.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tsn
