// Copyright 2026 The tnsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tnsim {

enum class ErrorCode {
    DimensionMismatch,
    AxisOutOfRange,
    EmptySpectrum,
    NonFinite,
    EmptyInput,
    IndexOutOfRange,
    NonAdjacentGate,
    NonUnitary,
    BadShape,
    LengthMismatch,
    UnknownGate,
    BadArity,
    ParseError,
    VersionMismatch,
    ClusterOverflow,
    MemoryBoundExceeded,
    UnsatisfiableGrouping,
    InvalidParams,
    OracleTooLarge,
    TooLarge,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI's machine-readable error object) can dispatch on it.
class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message);

    ErrorCode code() const noexcept {
        return code_;
    }

   private:
    ErrorCode code_;
};

}  // namespace tnsim
