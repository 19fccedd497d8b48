#pragma once

#include <stdexcept>
#include <string>

namespace bwt {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Image/block dimensions incompatible with the requested operation.
struct DimensionError : Error {
  using Error::Error;
};

/// Malformed file or configuration input.
struct FormatError : Error {
  using Error::Error;
};

/// An encrypted position holds a value outside the cipher's image set.
struct CiphertextError : Error {
  using Error::Error;
};

}  // namespace bwt
