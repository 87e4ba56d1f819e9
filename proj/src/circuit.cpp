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

#include "tnsim/circuit.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "tnsim/error.hpp"

namespace tnsim {

std::size_t Gate::min_qubit() const {
    return *std::min_element(qubits.begin(), qubits.end());
}

std::size_t Gate::max_qubit() const {
    return *std::max_element(qubits.begin(), qubits.end());
}

bool Gate::is_adjacent() const {
    return max_qubit() - min_qubit() + 1 == qubits.size();
}

Tensor Gate::matrix() const {
    return gate_matrix(kind, params, qubits.size());
}

Tensor Gate::site_ordered_tensor() const {
    const std::size_t n = qubits.size();
    Tensor t = gate_tensor(kind, params, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return qubits[a] < qubits[b]; });
    if (std::is_sorted(qubits.begin(), qubits.end())) {
        return t;
    }
    std::vector<std::size_t> perm(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        perm[k] = order[k];
        perm[n + k] = n + order[k];
    }
    return t.permuted(perm);
}

bool Gate::operator==(const Gate &other) const {
    return kind == other.kind && qubits == other.qubits && params == other.params && layer == other.layer;
}

Gate make_gate(GateKind kind, std::vector<std::size_t> qubits, std::vector<double> params) {
    Gate g;
    g.kind = kind;
    g.qubits = std::move(qubits);
    g.params = std::move(params);
    return g;
}

Circuit::Circuit(std::size_t num_qubits) : num_qubits_(num_qubits), last_(num_qubits, 0) {
}

void Circuit::add(Gate gate) {
    const std::string name(gate_name(gate.kind));
    if (gate.qubits.empty()) {
        throw Error(ErrorCode::BadArity, name + " has no qubits");
    }
    const std::size_t arity = gate_arity(gate.kind);
    if (arity != 0 && gate.qubits.size() != arity) {
        throw Error(ErrorCode::BadArity, name + " acts on " + std::to_string(arity) + " qubit(s), got " +
                                             std::to_string(gate.qubits.size()));
    }
    if (gate.params.size() != gate_param_count(gate.kind)) {
        throw Error(ErrorCode::BadArity, name + " expects " + std::to_string(gate_param_count(gate.kind)) +
                                             " parameter(s)");
    }
    std::vector<std::size_t> sorted = gate.qubits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorCode::InvalidParams, name + " repeats a qubit");
    }
    if (sorted.back() >= num_qubits_) {
        throw Error(ErrorCode::IndexOutOfRange,
                    name + " touches qubit " + std::to_string(sorted.back()) + " of " + std::to_string(num_qubits_));
    }
    std::size_t layer = 0;
    for (std::size_t q : gate.qubits) {
        layer = std::max(layer, last_[q]);
    }
    ++layer;
    for (std::size_t q : gate.qubits) {
        last_[q] = layer;
    }
    gate.layer = layer;
    num_layers_ = std::max(num_layers_, layer);
    gates_.push_back(std::move(gate));
}

void Circuit::append(const Circuit &other) {
    if (other.num_qubits_ != num_qubits_) {
        throw Error(ErrorCode::LengthMismatch, "appending a circuit of different width");
    }
    for (const Gate &g : other.gates_) {
        add(g);
    }
}

std::vector<Gate> Circuit::layer_range(std::size_t first, std::size_t last) const {
    std::vector<Gate> out;
    for (const Gate &g : gates_) {
        if (g.layer >= first && g.layer <= last) {
            out.push_back(g);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Gate &a, const Gate &b) {
        if (a.layer != b.layer) {
            return a.layer < b.layer;
        }
        return a.min_qubit() < b.min_qubit();
    });
    return out;
}

bool Circuit::operator==(const Circuit &other) const {
    return num_qubits_ == other.num_qubits_ && gates_ == other.gates_;
}

Circuit assign_layers(std::size_t num_qubits, const std::vector<Gate> &gates) {
    Circuit c(num_qubits);
    for (Gate g : gates) {
        g.layer = 0;
        c.add(std::move(g));
    }
    return c;
}

}  // namespace tnsim
