#pragma once

#include <stdexcept>
#include <string>

namespace gaitprior {

// Raised for invalid user input: malformed files, bad CLI/config values,
// unknown environment ids. The CLI maps this to exit code 2; every other
// exception maps to exit code 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gaitprior
