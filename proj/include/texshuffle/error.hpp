#pragma once

#include <stdexcept>
#include <string>

namespace texshuffle {

/// A file or directory could not be read or decoded.
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input content is well-formed but violates the data contract.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training diverged or could not proceed.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pretrained backbone weights were requested but cannot be loaded.
class PretrainedWeightsUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace texshuffle
