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
#include <span>
#include <vector>

#include "tnsim/circuit.hpp"
#include "tnsim/mps.hpp"

namespace tnsim {

/// Qubit cap for dense simulation: 20 unless TNSIM_ORACLE_CAP is set.
std::size_t oracle_qubit_cap();

/// Dense 2^n amplitude vector; qubit 0 is the most significant bit.
class Statevector {
   public:
    /// Basis state |bits>; throws TooLarge above the oracle cap.
    explicit Statevector(std::span<const int> bits);
    Statevector(std::size_t num_qubits, std::vector<Complex> amplitudes);

    static Statevector zero(std::size_t num_qubits);
    static Statevector basis(std::size_t num_qubits, std::uint64_t index);

    std::size_t num_qubits() const noexcept {
        return num_qubits_;
    }
    const std::vector<Complex> &amplitudes() const noexcept {
        return amps_;
    }

    /// Apply a gate on arbitrary (not necessarily adjacent) qubits.
    void apply(const Gate &gate);
    double norm() const;

   private:
    std::size_t num_qubits_;
    std::vector<Complex> amps_;
};

/// Run every gate in execution order on |bits>.
Statevector simulate_dense(const Circuit &circuit, std::span<const int> bits);
/// Same, from |0...0>.
Statevector simulate_dense(const Circuit &circuit);

/// <a|b> over dense vectors.
Complex inner(const std::vector<Complex> &a, const std::vector<Complex> &b);

/// |<s|dense(m)>|^2.
double exact_fidelity(const Mps &m, const Statevector &s);

}  // namespace tnsim
