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
#include <utility>
#include <vector>

#include "tnsim/circuit.hpp"

namespace tnsim::testutil {

/// Eight-qubit, seven-layer circuit in the shape of the standard layering
/// example: layers 1-2 and 4, 6 pair (0,1)(2,3)(4,5)(6,7); layer 3 pairs
/// (0,1)(2,3)(5,6) with singles on 4 and 7; layer 5 pairs (0,1)(3,4)(5,6)
/// with singles on 2 and 7; layer 7 pairs (1,2)(3,4)(5,6) with singles on
/// 0 and 7. Every layer covers all eight qubits. The non-identity variant
/// uses C-H and CNOT, which entangle when started from |10101010>.
inline Circuit fig1_circuit(bool identity_gates = false) {
    using Pair = std::pair<std::size_t, std::size_t>;
    const std::vector<std::vector<Pair>> pairs{
        {{0, 1}, {2, 3}, {4, 5}, {6, 7}},
        {{0, 1}, {2, 3}, {4, 5}, {6, 7}},
        {{0, 1}, {2, 3}, {5, 6}},
        {{0, 1}, {2, 3}, {4, 5}, {6, 7}},
        {{0, 1}, {3, 4}, {5, 6}},
        {{0, 1}, {2, 3}, {4, 5}, {6, 7}},
        {{1, 2}, {3, 4}, {5, 6}},
    };
    const std::vector<std::vector<std::size_t>> singles{{}, {}, {4, 7}, {}, {2, 7}, {}, {0, 7}};
    Circuit c(8);
    for (std::size_t l = 0; l < pairs.size(); ++l) {
        for (auto [a, b] : pairs[l]) {
            if (identity_gates) {
                c.add(GateKind::Id, {a, b});
            } else {
                c.add(l % 2 == 0 ? GateKind::CH : GateKind::CX, {a, b});
            }
        }
        for (std::size_t q : singles[l]) {
            c.add(identity_gates ? GateKind::Id : GateKind::H, {q});
        }
    }
    return c;
}

}  // namespace tnsim::testutil
