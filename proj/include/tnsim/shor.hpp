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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tnsim/circuit.hpp"
#include "tnsim/cluster_tebd.hpp"
#include "tnsim/dmrg.hpp"
#include "tnsim/mps.hpp"

namespace tnsim {

struct ShorParams {
    std::uint64_t n_to_factor = 15;
    std::uint64_t a = 7;
    double epsilon = 1e-3;
    std::uint64_t seed = 0;
    /// Overrides the counting-register size (small test instances).
    std::optional<std::size_t> counting_qubits;

    /// Throws InvalidParams for even, prime, prime-power or non-coprime input.
    void validate() const;
};

/// Qubit positions of every register. Multi-bit registers list the qubit of
/// bit m (weight 2^m) at index m.
struct ShorRegisters {
    std::vector<std::size_t> counting;
    std::vector<std::size_t> x;
    std::size_t bus = 0;
    std::vector<std::size_t> b;
    std::size_t anc = 0;
};

struct ShorCircuitReport {
    std::size_t qubit_count = 0;
    std::size_t gate_count = 0;
    std::size_t layer_count = 0;
    std::size_t swap_count = 0;  // inserted by routing
    ShorRegisters registers;
};

std::size_t bit_length(std::uint64_t v);
/// ceil(log2(2 + 1/(2 eps))) extra counting bits beyond 2n.
std::size_t precision_bits(double epsilon);
std::size_t counting_register_size(std::uint64_t n_to_factor, double epsilon);
/// 4n + 4 + precision_bits(eps).
std::size_t shor_qubit_count(std::uint64_t n_to_factor, double epsilon);

std::pair<Circuit, ShorCircuitReport> build_order_finding_circuit(const ShorParams &p);

/// Rewrite every multi-qubit gate as adjacent: the highest qubit stays, the
/// others are swapped next to it, and the swaps are undone afterwards.
std::vector<Gate> route_adjacent(const std::vector<Gate> &gates, std::size_t *swap_count = nullptr);

/// Quantum-quantum Draper adder on [a: bits][b: bits+1], both registers most
/// significant bit first: |a>|b> -> |a>|a+b mod 2^(bits+1)>.
Circuit build_draper_adder(std::size_t bits, double epsilon = 0.0);

/// Modular adder on [ctrl][b: n+2 bits, LSB first][anc]:
/// |1>|b> -> |1>|(b + a) mod N> for b < N.
Circuit build_modular_adder_block(std::uint64_t a, std::uint64_t n_to_factor, double epsilon = 0.0);

/// Multiplier blocks on [c][x: n, MSB first][bus][b: n+2, LSB first][anc].
/// cmult: |1>|x>|b> -> |1>|x>|(b + a x) mod N>; full: |1>|x>|0> -> |1>|a x mod N>|0>.
Circuit build_multiplier_block(std::uint64_t a, std::uint64_t n_to_factor, bool full, double epsilon = 0.0);
ShorRegisters multiplier_block_registers(std::uint64_t n_to_factor);

/// Run the controlled U_a block (control on) on |x> with the dense oracle and
/// read the work register. Empty when the output is not a clean basis state.
std::optional<std::uint64_t> modular_multiplier_check(std::uint64_t a, std::uint64_t n_to_factor, std::uint64_t x);

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);
std::uint64_t multiplicative_order(std::uint64_t a, std::uint64_t n);
std::uint64_t modular_inverse(std::uint64_t a, std::uint64_t n);

struct PostprocessResult {
    std::optional<std::uint64_t> order;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> factors;
    std::string note;  // why a retry is needed
    bool retry() const {
        return !factors.has_value();
    }
};

/// Factors from an order r: gcd(a^(r/2) +- 1, N) when r is even and
/// a^(r/2) != -1 mod N.
PostprocessResult factors_from_order(std::uint64_t a, std::uint64_t n, std::uint64_t r);

/// Continued-fraction expansion of measured/2^bits; each convergent
/// denominator and its multiples up to N are tried as the order.
PostprocessResult postprocess(std::uint64_t measured, std::size_t bits, std::uint64_t a, std::uint64_t n);

enum class ShorBackend { Tebd, ClusterTebd, Dmrg, Statevector };
const char *shor_backend_name(ShorBackend b);
ShorBackend shor_backend_from_name(const std::string &name);

struct ShorRunConfig {
    ShorBackend backend = ShorBackend::ClusterTebd;
    TruncationPolicy policy = TruncationPolicy::capped(64);
    ClusterConfig cluster;
    DmrgConfig dmrg;
    std::size_t max_attempts = 10;
};

struct ShorResult {
    ShorCircuitReport report;
    std::string backend;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> factors;
    std::size_t attempts = 0;
    std::vector<std::uint64_t> measurements;
    std::vector<std::string> notes;
    double build_seconds = 0.0;
    double simulate_seconds = 0.0;
    double fidelity_estimate = 1.0;
    std::size_t max_chi = 1;
};

ShorResult run_shor(const ShorParams &p, const ShorRunConfig &cfg);

}  // namespace tnsim
