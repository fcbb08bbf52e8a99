#pragma once

#include <stdexcept>

namespace cryocim {

/// Base class for all errors raised by the simulator library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file (selector CSV, scenario JSON).
struct ParseError : Error {
    using Error::Error;
};

/// Selector table rows violate the required ordering (voltages strictly
/// increasing, currents non-decreasing). The message names the offending row.
struct MonotonicityError : Error {
    using Error::Error;
};

/// Voltage query outside the selector table's span.
struct RangeError : Error {
    using Error::Error;
};

/// The series cell solve found no bracket inside the table span.
struct UnsolvableBiasError : Error {
    using Error::Error;
};

/// A selected cell failed to reach its target state after a write cycle,
/// i.e. the configured write bias does not push the solved current past the
/// switching threshold.
struct WriteVerifyError : Error {
    using Error::Error;
};

}  // namespace cryocim
