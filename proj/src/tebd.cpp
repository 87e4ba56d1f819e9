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

#include "tnsim/tebd.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "tnsim/error.hpp"

namespace tnsim {

void apply_gate(Mps &m, const Gate &gate, const TruncationPolicy &policy, FidelityLedger &ledger,
                bool validate_unitarity) {
    if (gate.max_qubit() >= m.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "gate touches a qubit beyond the MPS");
    }
    if (!gate.is_adjacent()) {
        throw Error(ErrorCode::NonAdjacentGate, std::string(gate_name(gate.kind)) + " acts on non-neighbouring qubits");
    }
    if (validate_unitarity && unitarity_error(gate.matrix()) > 1e-10) {
        throw Error(ErrorCode::NonUnitary, std::string(gate_name(gate.kind)) + " is not unitary");
    }
    if (gate.kind == GateKind::Id) {
        return;
    }
    if (gate.kind == GateKind::Swap) {
        m.swap_adjacent(gate.min_qubit(), policy, ledger);
        return;
    }
    m.apply_adjacent_gate(gate.site_ordered_tensor(), gate.min_qubit(), policy, ledger);
}

TebdResult run_tebd(const Circuit &circuit, Mps initial, const TebdConfig &cfg) {
    if (initial.size() != circuit.num_qubits()) {
        throw Error(ErrorCode::LengthMismatch, "initial state width differs from the circuit");
    }
    cfg.policy.validate();
    const auto t0 = std::chrono::steady_clock::now();
    TebdResult res{std::move(initial), {}, {}};
    const std::vector<Gate> order = circuit.execution_order();
    std::size_t i = 0;
    for (std::size_t layer = 1; layer <= circuit.num_layers(); ++layer) {
        for (; i < order.size() && order[i].layer == layer; ++i) {
            apply_gate(res.state, order[i], cfg.policy, res.ledger, cfg.validate_unitarity);
            ++res.stats.gates_applied;
        }
        const std::size_t chi = res.state.max_bond();
        res.stats.layer_max_chi.push_back(chi);
        res.stats.max_chi = std::max(res.stats.max_chi, chi);
        if (cfg.progress_hook) {
            cfg.progress_hook(layer, res.state);
        }
    }
    res.stats.truncation_count = res.ledger.truncation_count;
    res.stats.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace tnsim
