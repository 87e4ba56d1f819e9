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

#include "tnsim/oracle.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "tnsim/error.hpp"

namespace tnsim {

namespace {

constexpr std::size_t kDefaultCap = 20;

void check_cap(std::size_t n) {
    const std::size_t cap = oracle_qubit_cap();
    if (n > cap) {
        throw Error(ErrorCode::TooLarge,
                    std::to_string(n) + " qubits exceed the dense oracle cap of " + std::to_string(cap));
    }
}

}  // namespace

std::size_t oracle_qubit_cap() {
    if (const char *env = std::getenv("TNSIM_ORACLE_CAP")) {
        char *end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v < 40) {
            return v;
        }
    }
    return kDefaultCap;
}

Statevector::Statevector(std::span<const int> bits) : num_qubits_(bits.size()) {
    if (bits.empty()) {
        throw Error(ErrorCode::EmptyInput, "statevector needs at least one qubit");
    }
    check_cap(num_qubits_);
    std::uint64_t index = 0;
    for (int b : bits) {
        index = (index << 1) | static_cast<std::uint64_t>(b != 0);
    }
    amps_.assign(std::size_t{1} << num_qubits_, Complex{});
    amps_[index] = 1.0;
}

Statevector::Statevector(std::size_t num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    check_cap(num_qubits_);
    if (amps_.size() != (std::size_t{1} << num_qubits_)) {
        throw Error(ErrorCode::LengthMismatch, "amplitude count is not 2^n");
    }
}

Statevector Statevector::zero(std::size_t num_qubits) {
    return basis(num_qubits, 0);
}

Statevector Statevector::basis(std::size_t num_qubits, std::uint64_t index) {
    check_cap(num_qubits);
    std::vector<Complex> amps(std::size_t{1} << num_qubits);
    amps.at(index) = 1.0;
    return Statevector(num_qubits, std::move(amps));
}

// For each assignment of the untouched qubits, gather the 2^k amplitudes the
// gate acts on, multiply by the matrix and scatter back.
void Statevector::apply(const Gate &gate) {
    const std::size_t k = gate.qubits.size();
    for (std::size_t q : gate.qubits) {
        if (q >= num_qubits_) {
            throw Error(ErrorCode::IndexOutOfRange, "gate qubit outside the statevector");
        }
    }
    const Tensor m = gate.matrix();
    const std::size_t dim = std::size_t{1} << k;
    std::vector<std::size_t> offset(dim, 0);
    std::size_t mask = 0;
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t b = 0; b < k; ++b) {
            if ((j >> (k - 1 - b)) & 1) {
                offset[j] |= std::size_t{1} << (num_qubits_ - 1 - gate.qubits[b]);
            }
        }
    }
    for (std::size_t q : gate.qubits) {
        mask |= std::size_t{1} << (num_qubits_ - 1 - q);
    }
    // Gates in practice are sparse (permutations, diagonal phases), so
    // only the nonzero entries are visited.
    struct Entry {
        std::size_t r;
        std::size_t c;
        Complex v;
    };
    std::vector<Entry> entries;
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            if (m[r * dim + c] != Complex{0.0, 0.0}) {
                entries.push_back({r, c, m[r * dim + c]});
            }
        }
    }
    std::vector<Complex> in(dim);
    std::vector<Complex> out(dim);
    const std::size_t count = amps_.size() >> k;
    std::size_t base = 0;
    // Visit exactly the indices with zeros at the gate's qubits.
    for (std::size_t step = 0; step < count; ++step, base = ((base | mask) + 1) & ~mask) {
        for (std::size_t j = 0; j < dim; ++j) {
            in[j] = amps_[base | offset[j]];
            out[j] = Complex{0.0, 0.0};
        }
        for (const Entry &e : entries) {
            out[e.r] += e.v * in[e.c];
        }
        for (std::size_t j = 0; j < dim; ++j) {
            amps_[base | offset[j]] = out[j];
        }
    }
}

double Statevector::norm() const {
    double s = 0.0;
    for (const Complex &a : amps_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

Statevector simulate_dense(const Circuit &circuit, std::span<const int> bits) {
    if (bits.size() != circuit.num_qubits()) {
        throw Error(ErrorCode::LengthMismatch, "initial state width differs from the circuit");
    }
    Statevector s(bits);
    for (const Gate &g : circuit.execution_order()) {
        s.apply(g);
    }
    return s;
}

Statevector simulate_dense(const Circuit &circuit) {
    std::vector<int> bits(circuit.num_qubits(), 0);
    return simulate_dense(circuit, bits);
}

Complex inner(const std::vector<Complex> &a, const std::vector<Complex> &b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::LengthMismatch, "inner product of vectors with different lengths");
    }
    Complex acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

double exact_fidelity(const Mps &m, const Statevector &s) {
    if (m.size() != s.num_qubits()) {
        throw Error(ErrorCode::LengthMismatch, "MPS and statevector widths differ");
    }
    check_cap(m.size());
    return std::norm(inner(s.amplitudes(), m.to_dense()));
}

}  // namespace tnsim
