#pragma once

#include <stdexcept>
#include <string>

namespace promptfront {

// Error classes map 1:1 onto CLI exit codes; see tools/promptfront.cpp.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file (bad JSON syntax, wrong shape).
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input that violates a domain invariant.
struct ValidationError : Error {
    using Error::Error;
};

// Bad experiment configuration (missing referenced files, out-of-range values).
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem-level failure (unreadable path, write failure, empty results dir).
struct IoError : Error {
    using Error::Error;
};

// Model backend failure after retries.
struct BackendError : Error {
    using Error::Error;
};

} // namespace promptfront
