#pragma once

#include <stdexcept>
#include <string>

namespace celforge {

// Hard contract violations (bad shapes, bad parameters) are thrown as
// subclasses of std::invalid_argument; recoverable data conditions
// (blank sketches, unratable triplets, malformed files) derive from
// std::runtime_error so pipelines can catch them per record.

struct InvalidInput : std::invalid_argument {
  explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

struct InvalidParameter : std::invalid_argument {
  explicit InvalidParameter(const std::string& msg) : std::invalid_argument(msg) {}
};

struct EmptySketchError : std::runtime_error {
  explicit EmptySketchError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoValidPixelsError : std::runtime_error {
  explicit NoValidPixelsError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FitError : std::runtime_error {
  explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace celforge
