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

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "tnsim/tensor.hpp"

namespace tnsim {

/// Gate library. Matrices follow the usual convention that the first listed
/// qubit is the most significant bit of the row/column index.
enum class GateKind {
    Id,
    H,
    X,
    Y,
    Z,
    S,
    T,
    P,        // P(phi) = diag(1, e^{i phi})
    X4,       // fourth root of X
    SqrtW,    // square root of (X + Y)/sqrt(2)
    CX,
    CY,
    CZ,
    Swap,
    CH,
    CS,
    CT,
    SqrtSwap,
    CP,       // controlled P(phi)
    CCX,      // Toffoli
    CCP,      // doubly controlled P(phi)
};

std::string_view gate_name(GateKind kind);
/// Parse a gate name as used in circuit files; throws UnknownGate.
GateKind gate_kind_from_name(std::string_view name);

/// Number of qubits; 0 means "any" (only the identity).
std::size_t gate_arity(GateKind kind);
std::size_t gate_param_count(GateKind kind);

/// 2^n x 2^n unitary. `num_qubits` is only consulted for the identity.
Tensor gate_matrix(GateKind kind, std::span<const double> params, std::size_t num_qubits = 0);

/// The same operator as a rank-2n tensor with axes (out_0..out_{n-1}, in_0..in_{n-1}).
Tensor gate_tensor(GateKind kind, std::span<const double> params, std::size_t num_qubits = 0);

/// max |(U^dagger U - I)_{ij}| for a square matrix tensor.
double unitarity_error(const Tensor &matrix);

/// Matrix product of two square matrix tensors.
Tensor matmul(const Tensor &a, const Tensor &b);

}  // namespace tnsim
