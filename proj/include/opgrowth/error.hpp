#pragma once

#include <stdexcept>
#include <string>

namespace opgrowth {

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace opgrowth
