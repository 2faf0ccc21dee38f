#pragma once

#include <stdexcept>
#include <string>

namespace gaborcert {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMatrix : Error {
    using Error::Error;
};
struct MisalignedShift : Error {
    using Error::Error;
};
struct GridMismatch : Error {
    using Error::Error;
};
struct GridTooLarge : Error {
    using Error::Error;
};
struct DegenerateWindow : Error {
    using Error::Error;
};
struct MissingDerivatives : Error {
    using Error::Error;
};
struct NonDecaying : Error {
    using Error::Error;
};
struct ZeroMean : Error {
    using Error::Error;
};
struct ZeroInner : Error {
    using Error::Error;
};
struct NonPositiveInner : Error {
    using Error::Error;
};
struct ConditionFailed : Error {
    using Error::Error;
};
struct EmptyInterval : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

} // namespace gaborcert
