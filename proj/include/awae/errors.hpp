#pragma once

#include <stdexcept>
#include <string>

namespace awae {

// Invalid user-supplied configuration (bad field values, malformed files).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data (CSV cells, binary blobs).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation called in a state that does not admit it (empty pool, missing
// predictor, pruning outside |pool| == L+1).
class StateError : public std::runtime_error {
 public:
  explicit StateError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension mismatch between data and model.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Metric evaluated on degenerate input (empty truth vector etc.).
class MetricError : public std::runtime_error {
 public:
  explicit MetricError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem failure, always carries the offending path.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Task shape the component does not handle (e.g. BALS on multiclass).
class UnsupportedTaskError : public std::runtime_error {
 public:
  explicit UnsupportedTaskError(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace awae
