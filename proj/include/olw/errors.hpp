#pragma once

#include <stdexcept>
#include <string>

namespace olw {

// Invalid configuration or argument values. CLI exit code 1.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed, missing, or inconsistent input data. CLI exit code 2.
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values produced during training or inference. CLI exit code 3.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace olw
