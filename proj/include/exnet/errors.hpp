// errors.hpp: exception types shared by the library and the CLI

#pragma once

#include <stdexcept>

namespace exnet {

// Invalid input: malformed config, degenerate geometry, violated preconditions.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure while building, evolving or analysing a model.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace exnet
