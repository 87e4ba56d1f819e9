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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tnsim/gates.hpp"
#include "tnsim/tensor.hpp"

namespace tnsim {

struct Gate {
    GateKind kind = GateKind::Id;
    std::vector<std::size_t> qubits;  // 0-based; first listed is the matrix MSB
    std::vector<double> params;       // radians
    std::size_t layer = 0;            // 1-based, assigned by the circuit

    std::size_t arity() const {
        return qubits.size();
    }
    std::size_t min_qubit() const;
    std::size_t max_qubit() const;
    /// True when the qubits form a contiguous run (in any order).
    bool is_adjacent() const;

    Tensor matrix() const;
    /// Operator tensor with axes reordered to ascending qubit order, ready to
    /// apply on sites min_qubit()..max_qubit().
    Tensor site_ordered_tensor() const;

    bool operator==(const Gate &other) const;
};

Gate make_gate(GateKind kind, std::vector<std::size_t> qubits, std::vector<double> params = {});

/// Ordered gate list with layer indices.
///
/// Layers follow the greedy rule layer(g) = 1 + max over g's qubits of the
/// last layer touching that qubit (0 if none).
class Circuit {
   public:
    explicit Circuit(std::size_t num_qubits = 0);

    /// Validate, assign the layer and append.
    void add(Gate gate);
    void add(GateKind kind, std::vector<std::size_t> qubits, std::vector<double> params = {}) {
        add(make_gate(kind, std::move(qubits), std::move(params)));
    }
    void append(const Circuit &other);

    std::size_t num_qubits() const noexcept {
        return num_qubits_;
    }
    const std::vector<Gate> &gates() const noexcept {
        return gates_;
    }
    std::size_t num_layers() const noexcept {
        return num_layers_;
    }
    std::size_t size() const noexcept {
        return gates_.size();
    }
    /// Layer that the next gate touching q would not precede.
    std::size_t last_layer(std::size_t q) const {
        return last_.at(q);
    }

    /// Gates with first <= layer <= last, sorted by (layer, min qubit).
    std::vector<Gate> layer_range(std::size_t first, std::size_t last) const;
    /// All gates in execution order: by layer, ties by ascending min qubit.
    std::vector<Gate> execution_order() const {
        return layer_range(1, num_layers_);
    }

    bool operator==(const Circuit &other) const;

   private:
    std::size_t num_qubits_;
    std::size_t num_layers_ = 0;
    std::vector<std::size_t> last_;
    std::vector<Gate> gates_;
};

/// Recompute layers for a program-ordered gate list.
Circuit assign_layers(std::size_t num_qubits, const std::vector<Gate> &gates);

enum class GateFamily { Clifford, NonClifford };
std::string_view family_name(GateFamily family);
GateFamily family_from_name(std::string_view name);

/// Random-structured circuit on nearest-neighbour pairs, filled until every
/// qubit reaches layer L.
Circuit generate_random_structured(std::size_t num_qubits, std::size_t num_layers, GateFamily family,
                                   std::uint64_t seed);

/// Circuit file: JSON {version: 1, num_qubits, gates: [{name, qubits, params}]}.
std::string circuit_to_json(const Circuit &circuit);
Circuit circuit_from_json(const std::string &text);
void write_circuit(const Circuit &circuit, const std::filesystem::path &path);
Circuit read_circuit(const std::filesystem::path &path);

}  // namespace tnsim
