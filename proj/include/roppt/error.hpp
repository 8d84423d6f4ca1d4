#pragma once

#include <stdexcept>
#include <string>

namespace roppt {

// Raised for unreadable or invariant-violating input files. The message
// carries the path and 1-based line number where the problem was found.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when training hits a non-finite loss.
struct TrainingDiverged : std::runtime_error {
  int epoch;
  int batch;
  TrainingDiverged(int epoch_, int batch_)
      : std::runtime_error("training diverged at epoch " + std::to_string(epoch_) +
                           ", batch " + std::to_string(batch_)),
        epoch(epoch_),
        batch(batch_) {}
};

}  // namespace roppt
