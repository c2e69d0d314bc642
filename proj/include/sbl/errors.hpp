#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sbl {

// Error taxonomy mirrored by the CLI exit codes:
//   ConfigError -> 2, DataError -> 3, StageError -> 4.
// Library preconditions (bad k, empty input, ...) throw std::invalid_argument.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wraps any failure inside a pipeline stage with the stage name and, when the
// failure is subset-local, the subset label.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, std::string subset, const std::string& cause)
      : std::runtime_error("stage '" + stage + "'" +
                           (subset.empty() ? std::string() : " (subset " + subset + ")") +
                           " failed: " + cause),
        stage_(std::move(stage)),
        subset_(std::move(subset)) {}

  const std::string& stage() const { return stage_; }
  const std::string& subset() const { return subset_; }

 private:
  std::string stage_;
  std::string subset_;
};

}  // namespace sbl
