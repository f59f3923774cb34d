#pragma once

#include <stdexcept>
#include <string>

namespace szego {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bad user input (config keys, plan preconditions)
struct ConfigError : Error {
  using Error::Error;
};

// integrator guard tripped or a numeric precondition failed at run time
struct NumericGuard : Error {
  using Error::Error;
};

}  // namespace szego
