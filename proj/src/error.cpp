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

#include "tnsim/error.hpp"

namespace tnsim {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch:
            return "DimensionMismatch";
        case ErrorCode::AxisOutOfRange:
            return "AxisOutOfRange";
        case ErrorCode::EmptySpectrum:
            return "EmptySpectrum";
        case ErrorCode::NonFinite:
            return "NonFinite";
        case ErrorCode::EmptyInput:
            return "EmptyInput";
        case ErrorCode::IndexOutOfRange:
            return "IndexOutOfRange";
        case ErrorCode::NonAdjacentGate:
            return "NonAdjacentGate";
        case ErrorCode::NonUnitary:
            return "NonUnitary";
        case ErrorCode::BadShape:
            return "BadShape";
        case ErrorCode::LengthMismatch:
            return "LengthMismatch";
        case ErrorCode::UnknownGate:
            return "UnknownGate";
        case ErrorCode::BadArity:
            return "BadArity";
        case ErrorCode::ParseError:
            return "ParseError";
        case ErrorCode::VersionMismatch:
            return "VersionMismatch";
        case ErrorCode::ClusterOverflow:
            return "ClusterOverflow";
        case ErrorCode::MemoryBoundExceeded:
            return "MemoryBoundExceeded";
        case ErrorCode::UnsatisfiableGrouping:
            return "UnsatisfiableGrouping";
        case ErrorCode::InvalidParams:
            return "InvalidParams";
        case ErrorCode::OracleTooLarge:
            return "OracleTooLarge";
        case ErrorCode::TooLarge:
            return "TooLarge";
        case ErrorCode::Io:
            return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {
}

}  // namespace tnsim
