#pragma once

#include <stdexcept>
#include <string>

namespace hodg {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad tunables, malformed config files, unknown flags/keys. CLI exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

// Missing/malformed input files, dimension mismatches. CLI exit code 3.
struct DataError : Error {
    using Error::Error;
};

// Degenerate numeric inputs (empty descriptor sets, single-class training,
// non-finite features, all-identical GMM samples). CLI exit code 4.
struct NumericError : Error {
    using Error::Error;
};

}  // namespace hodg
