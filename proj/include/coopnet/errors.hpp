#pragma once

#include <stdexcept>
#include <string>

namespace coopnet {

// Base class for all library errors so callers can map them to exit codes
// in one place.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Coincident nodes, relays sitting on an endpoint, non-finite coordinates.
struct DegenerateGeometry : Error {
  using Error::Error;
};

// The combined-exceedance coefficient 1/(1 - sum g_sd/g_rd) is undefined
// for some relay subset.
struct EtaSingular : Error {
  using Error::Error;
};

// Adaptive quadrature ran out of subdivisions before reaching tolerance.
struct NonConvergence : Error {
  using Error::Error;
};

// Sampling window truncates too much interference for the tail correction
// to be trustworthy.
struct WindowTooSmall : Error {
  using Error::Error;
};

// Subset enumeration over 2^(N+1) success events would blow up.
struct TooManyRelays : Error {
  using Error::Error;
};

// Multinomial expansion bounds exceeded (cross-check path only).
struct ExpansionTooLarge : Error {
  using Error::Error;
};

// Invalid parameter values or malformed experiment configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace coopnet
