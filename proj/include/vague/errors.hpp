#pragma once

#include <stdexcept>
#include <string>

namespace vague {

// Error taxonomy shared by the library and the CLI exit-code mapping.

struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

struct SizeCapError : std::runtime_error {
  explicit SizeCapError(const std::string& what) : std::runtime_error(what) {}
};

struct SpaceMismatchError : std::runtime_error {
  explicit SpaceMismatchError(const std::string& what) : std::runtime_error(what) {}
};

struct CountMismatchError : std::runtime_error {
  explicit CountMismatchError(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedRegionError : std::runtime_error {
  explicit UnsupportedRegionError(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyRegionError : std::runtime_error {
  explicit EmptyRegionError(const std::string& what) : std::runtime_error(what) {}
};

struct MaterializationError : std::runtime_error {
  explicit MaterializationError(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureError : std::runtime_error {
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vague
