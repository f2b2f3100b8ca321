// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nrcba {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Codebook / overhead accounting
struct NonPowerOfTwoError : Error { using Error::Error; };
struct OverflowError : Error { using Error::Error; };
struct NegativeTaxError : Error { using Error::Error; };
struct InvalidCoefficientError : Error { using Error::Error; };
struct CodecError : Error { using Error::Error; };

// Channel
struct UnknownKindError : Error { using Error::Error; };
struct MissingStateError : Error { using Error::Error; };

// Adaptation
struct BaselineZeroError : Error { using Error::Error; };

// Features
struct SchemaMismatchError : Error { using Error::Error; };

// Federation
struct ReservoirMismatchError : Error { using Error::Error; };

// Harness
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace nrcba
