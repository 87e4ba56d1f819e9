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

#include <array>
#include <numbers>
#include <string>

#include "tnsim/circuit.hpp"
#include "tnsim/error.hpp"
#include "tnsim/rng.hpp"

namespace tnsim {

namespace {

struct Choice {
    GateKind kind;
    double param;  // only used by P
};

constexpr std::array<Choice, 8> kSingle{{
    {GateKind::H, 0},
    {GateKind::X, 0},
    {GateKind::Y, 0},
    {GateKind::Z, 0},
    {GateKind::T, 0},
    {GateKind::P, 3 * std::numbers::pi / 4},
    {GateKind::X4, 0},
    {GateKind::SqrtW, 0},
}};

constexpr std::array<Choice, 8> kDouble{{
    {GateKind::CX, 0},
    {GateKind::CY, 0},
    {GateKind::CZ, 0},
    {GateKind::Swap, 0},
    {GateKind::CH, 0},
    {GateKind::CS, 0},
    {GateKind::CT, 0},
    {GateKind::SqrtSwap, 0},
}};

}  // namespace

std::string_view family_name(GateFamily family) {
    return family == GateFamily::Clifford ? "clifford" : "nonclifford";
}

GateFamily family_from_name(std::string_view name) {
    if (name == "clifford") {
        return GateFamily::Clifford;
    }
    if (name == "nonclifford") {
        return GateFamily::NonClifford;
    }
    throw Error(ErrorCode::InvalidParams, "unknown gate family '" + std::string(name) + "'");
}

// Each step draws one- or two-qubit with probability 1/2, then a gate from
// the family's set, then a position: any qubit for one-qubit gates, a
// neighbour pair (i, i+1) in random orientation for two-qubit gates.
// Positions that would open layer L+1 are redrawn; the gate kind is redrawn
// when no pair can take a two-qubit gate any more. Generation stops once
// every qubit has reached layer L.
Circuit generate_random_structured(std::size_t num_qubits, std::size_t num_layers, GateFamily family,
                                   std::uint64_t seed) {
    if (num_qubits < 2 || num_layers < 1) {
        throw Error(ErrorCode::InvalidParams, "random circuits need N >= 2 and L >= 1");
    }
    const std::size_t set_size = family == GateFamily::Clifford ? 4 : 8;
    Rng rng(seed, Rng::kCircuit);
    Circuit circuit(num_qubits);

    std::size_t open_qubits = num_qubits;
    std::size_t open_pairs = num_qubits - 1;
    auto qubit_open = [&](std::size_t q) { return circuit.last_layer(q) < num_layers; };
    auto pair_open = [&](std::size_t i) { return qubit_open(i) && qubit_open(i + 1); };
    auto place = [&](Gate g) {
        const std::size_t lo = g.min_qubit();
        const std::size_t hi = g.max_qubit();
        const std::size_t first_pair = lo > 0 ? lo - 1 : 0;
        const std::size_t last_pair = std::min(hi, num_qubits - 2);
        std::size_t pairs_before = 0;
        std::size_t qubits_before = 0;
        for (std::size_t i = first_pair; i <= last_pair; ++i) {
            pairs_before += pair_open(i);
        }
        for (std::size_t q = lo; q <= hi; ++q) {
            qubits_before += qubit_open(q);
        }
        circuit.add(std::move(g));
        for (std::size_t i = first_pair; i <= last_pair; ++i) {
            pairs_before -= pair_open(i);
        }
        for (std::size_t q = lo; q <= hi; ++q) {
            qubits_before -= qubit_open(q);
        }
        open_pairs -= pairs_before;
        open_qubits -= qubits_before;
    };

    while (open_qubits > 0) {
        const bool two = rng.bernoulli(0.5);
        if (two && open_pairs == 0) {
            continue;
        }
        if (!two) {
            const Choice c = kSingle[rng.uniform_int(set_size)];
            std::size_t q;
            do {
                q = rng.uniform_int(num_qubits);
            } while (!qubit_open(q));
            std::vector<double> params;
            if (c.kind == GateKind::P) {
                params.push_back(c.param);
            }
            place(make_gate(c.kind, {q}, std::move(params)));
        } else {
            const Choice c = kDouble[rng.uniform_int(set_size)];
            std::size_t i;
            do {
                i = rng.uniform_int(num_qubits - 1);
            } while (!pair_open(i));
            const bool flip = rng.bernoulli(0.5);
            std::vector<std::size_t> qubits = flip ? std::vector<std::size_t>{i + 1, i}
                                                   : std::vector<std::size_t>{i, i + 1};
            place(make_gate(c.kind, std::move(qubits)));
        }
    }
    return circuit;
}

}  // namespace tnsim
