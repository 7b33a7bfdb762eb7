#pragma once

#include <stdexcept>
#include <string>

namespace psgeval {

/// Input data or an argument violates a documented invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// An evaluation path was fed data that breaks its protocol contract,
/// e.g. duplicate subject-object pairs under a unique-match metric.
class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace psgeval
