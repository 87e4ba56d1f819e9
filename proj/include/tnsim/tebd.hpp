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
#include <functional>
#include <vector>

#include "tnsim/circuit.hpp"
#include "tnsim/mps.hpp"

namespace tnsim {

struct TebdConfig {
    TruncationPolicy policy;
    bool validate_unitarity = false;
    /// Called after each layer with (layer, current state).
    std::function<void(std::size_t, const Mps &)> progress_hook;
};

struct TebdStats {
    double wall_time_seconds = 0.0;
    std::size_t max_chi = 1;
    std::size_t truncation_count = 0;
    std::size_t gates_applied = 0;
    std::vector<std::size_t> layer_max_chi;  // entry l-1 for layer l
};

struct TebdResult {
    Mps state;
    FidelityLedger ledger;
    TebdStats stats;
};

/// Apply one gate to the MPS. Multi-qubit gates must act on a contiguous run.
void apply_gate(Mps &m, const Gate &gate, const TruncationPolicy &policy, FidelityLedger &ledger,
                bool validate_unitarity = false);

/// Layer-by-layer TEBD; within a layer gates run in ascending qubit order.
TebdResult run_tebd(const Circuit &circuit, Mps initial, const TebdConfig &cfg);

}  // namespace tnsim
