#pragma once

#include <stdexcept>
#include <string>

namespace proxysel {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model structure (cyclic B, zero entries where forbidden, singular I-B).
class ModelError : public Error {
public:
    using Error::Error;
};

/// Sampling produced non-finite values (coefficient explosion).
class GenerationError : public Error {
public:
    using Error::Error;
};

/// Statistical routine received degenerate input (collinear columns,
/// zero-variance residual, multi-dimensional null space).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// CSV / JSON parsing failure. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line_no = 0)
        : Error(line_no > 0 ? msg + " (line " + std::to_string(line_no) + ")" : msg),
          line(line_no) {}
    int line;
};

/// Invalid configuration or arguments.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace proxysel
