#pragma once

#include <stdexcept>
#include <string>

namespace mcroi {

enum class ErrorKind {
  InvalidInput,      // malformed or out-of-contract input
  Consistency,       // mutually inconsistent artifacts (grids, masks, traces)
  InsufficientData,  // not enough samples to fit a model
  Degenerate,        // rank-deficient design, single-class training set, ...
  Io,                // file read/write failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mcroi
