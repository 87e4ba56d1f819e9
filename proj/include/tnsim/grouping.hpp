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

namespace tnsim {

/// How much each gate adds to E(b) on the bonds it crosses.
enum class EntanglingWeight {
    Unit,         // one per multi-qubit gate
    SchmidtRank,  // log2 of the gate's operator Schmidt rank across the bond
};

/// E(b) for bonds b = 0..N-2 over gates with first_layer <= layer <= last_layer.
std::vector<std::size_t> count_entangling(const Circuit &circuit, std::size_t first_layer, std::size_t last_layer,
                                          EntanglingWeight weight = EntanglingWeight::Unit);

/// Estimated bond dimensions of the state after a window of gates:
/// chi~_b = min(2^E(b) * chi_b, chi_cap, 2^min(b+1, N-b-1)) for 0-based b.
struct VirtualMps {
    std::vector<std::size_t> entangling;
    std::vector<std::size_t> chi_tilde;
};

VirtualMps build_virtual_mps(const std::vector<std::size_t> &entangling, const std::vector<std::size_t> &chi,
                             std::size_t chi_cap);

/// Contiguous partition of the qubit line.
struct GroupingScheme {
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // [first, last], ascending
    std::vector<std::size_t> cut_chi;                         // chi~ at each inter-group bond

    std::size_t num_groups() const {
        return groups.size();
    }
    std::size_t num_qubits() const {
        return groups.empty() ? 0 : groups.back().second + 1;
    }
    /// log2 size bound of group t: its qubits plus the log2 of its cut bonds.
    double group_log2_size(std::size_t t) const;
};

/// Throws UnsatisfiableGrouping when the scheme breaks coverage or the size bound.
void validate_scheme(const GroupingScheme &scheme, std::size_t num_qubits, std::size_t q_max);

/// One group per qubit range given by `groups`, cut weights from chi_tilde.
GroupingScheme make_scheme(std::vector<std::pair<std::size_t, std::size_t>> groups,
                           const std::vector<std::size_t> &chi_tilde);

/// Recursive bipartitioning of the virtual MPS: a segment that breaks the
/// size bound is split at its lightest bond (ties: most balanced split, then
/// leftmost) until every segment fits.
GroupingScheme partition_recursive(const VirtualMps &v, std::size_t q_max);

}  // namespace tnsim
