#pragma once

#include <stdexcept>
#include <string>

namespace repx {

/// Invalid parameters (window sizes, cutoffs, segment ids, unknown keys).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data that violates a shape or value contract.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation step that cannot run on a given pair (e.g. no room for a control window).
class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace repx
