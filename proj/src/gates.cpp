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

#include "tnsim/gates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "tnsim/error.hpp"

namespace tnsim {

namespace {

using std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

struct GateSpec {
    GateKind kind;
    std::string_view name;
    std::size_t arity;
    std::size_t params;
};

constexpr std::array<GateSpec, 21> kGateTable{{
    {GateKind::Id, "id", 0, 0},
    {GateKind::H, "h", 1, 0},
    {GateKind::X, "x", 1, 0},
    {GateKind::Y, "y", 1, 0},
    {GateKind::Z, "z", 1, 0},
    {GateKind::S, "s", 1, 0},
    {GateKind::T, "t", 1, 0},
    {GateKind::P, "p", 1, 1},
    {GateKind::X4, "x4", 1, 0},
    {GateKind::SqrtW, "sqrt_w", 1, 0},
    {GateKind::CX, "cx", 2, 0},
    {GateKind::CY, "cy", 2, 0},
    {GateKind::CZ, "cz", 2, 0},
    {GateKind::Swap, "swap", 2, 0},
    {GateKind::CH, "ch", 2, 0},
    {GateKind::CS, "cs", 2, 0},
    {GateKind::CT, "ct", 2, 0},
    {GateKind::SqrtSwap, "sqrt_swap", 2, 0},
    {GateKind::CP, "cp", 2, 1},
    {GateKind::CCX, "ccx", 3, 0},
    {GateKind::CCP, "ccp", 3, 1},
}};

const GateSpec &spec_of(GateKind kind) {
    return kGateTable[static_cast<std::size_t>(kind)];
}

Tensor matrix2(Complex a, Complex b, Complex c, Complex d) {
    return Tensor(Shape{2, 2}, {a, b, c, d});
}

// Embed a single-qubit block u as the target of `controls` control qubits.
Tensor controlled(const Tensor &u, std::size_t controls) {
    const std::size_t dim = std::size_t{2} << controls;
    Tensor m = Tensor::identity(dim);
    const std::size_t base = dim - 2;
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            m[(base + r) * dim + base + c] = u[r * 2 + c];
        }
    }
    return m;
}

Tensor phase(double phi) {
    return matrix2(1.0, 0.0, 0.0, std::exp(kI * phi));
}

Tensor single_qubit(GateKind kind, std::span<const double> params) {
    const double r2 = 1.0 / std::numbers::sqrt2;
    switch (kind) {
        case GateKind::H:
            return matrix2(r2, r2, r2, -r2);
        case GateKind::X:
            return matrix2(0.0, 1.0, 1.0, 0.0);
        case GateKind::Y:
            return matrix2(0.0, -kI, kI, 0.0);
        case GateKind::Z:
            return matrix2(1.0, 0.0, 0.0, -1.0);
        case GateKind::S:
            return phase(pi / 2);
        case GateKind::T:
            return phase(pi / 4);
        case GateKind::P:
            return phase(params[0]);
        case GateKind::X4: {
            const Complex g = std::exp(kI * (pi / 8));
            const double c = std::cos(pi / 8);
            const double s = std::sin(pi / 8);
            return matrix2(g * c, -kI * g * s, -kI * g * s, g * c);
        }
        case GateKind::SqrtW: {
            const Complex e = std::exp(kI * (pi / 4));
            return matrix2(r2 * e, -kI * r2, r2, r2 * e);
        }
        default:
            throw Error(ErrorCode::UnknownGate, "not a single-qubit gate");
    }
}

}  // namespace

std::string_view gate_name(GateKind kind) {
    return spec_of(kind).name;
}

GateKind gate_kind_from_name(std::string_view name) {
    for (const GateSpec &s : kGateTable) {
        if (s.name == name) {
            return s.kind;
        }
    }
    throw Error(ErrorCode::UnknownGate, "unknown gate '" + std::string(name) + "'");
}

std::size_t gate_arity(GateKind kind) {
    return spec_of(kind).arity;
}

std::size_t gate_param_count(GateKind kind) {
    return spec_of(kind).params;
}

Tensor gate_matrix(GateKind kind, std::span<const double> params, std::size_t num_qubits) {
    const GateSpec &spec = spec_of(kind);
    if (params.size() != spec.params) {
        throw Error(ErrorCode::BadArity, std::string(spec.name) + " takes " + std::to_string(spec.params) +
                                             " parameter(s), got " + std::to_string(params.size()));
    }
    if (spec.arity != 0 && num_qubits != 0 && num_qubits != spec.arity) {
        throw Error(ErrorCode::BadArity, std::string(spec.name) + " acts on " + std::to_string(spec.arity) +
                                             " qubit(s), got " + std::to_string(num_qubits));
    }
    switch (kind) {
        case GateKind::Id:
            if (num_qubits == 0 || num_qubits > 16) {
                throw Error(ErrorCode::BadArity, "identity needs between 1 and 16 qubits");
            }
            return Tensor::identity(std::size_t{1} << num_qubits);
        case GateKind::CX:
            return controlled(single_qubit(GateKind::X, {}), 1);
        case GateKind::CY:
            return controlled(single_qubit(GateKind::Y, {}), 1);
        case GateKind::CZ:
            return controlled(single_qubit(GateKind::Z, {}), 1);
        case GateKind::CH:
            return controlled(single_qubit(GateKind::H, {}), 1);
        case GateKind::CS:
            return controlled(phase(pi / 2), 1);
        case GateKind::CT:
            return controlled(phase(pi / 4), 1);
        case GateKind::CP:
            return controlled(phase(params[0]), 1);
        case GateKind::CCX:
            return controlled(single_qubit(GateKind::X, {}), 2);
        case GateKind::CCP:
            return controlled(phase(params[0]), 2);
        case GateKind::Swap: {
            Tensor m(Shape{4, 4});
            m[0] = m[1 * 4 + 2] = m[2 * 4 + 1] = m[15] = 1.0;
            return m;
        }
        case GateKind::SqrtSwap: {
            Tensor m(Shape{4, 4});
            const Complex a = 0.5 * (1.0 + kI);
            const Complex b = 0.5 * (1.0 - kI);
            m[0] = m[15] = 1.0;
            m[1 * 4 + 1] = m[2 * 4 + 2] = a;
            m[1 * 4 + 2] = m[2 * 4 + 1] = b;
            return m;
        }
        default:
            return single_qubit(kind, params);
    }
}

Tensor gate_tensor(GateKind kind, std::span<const double> params, std::size_t num_qubits) {
    Tensor m = gate_matrix(kind, params, num_qubits);
    std::size_t n = 0;
    while ((std::size_t{1} << n) < m.dim(0)) {
        ++n;
    }
    return std::move(m).reshaped(Shape(2 * n, 2));
}

Tensor matmul(const Tensor &a, const Tensor &b) {
    return contract(a, b, {{1, 0}});
}

double unitarity_error(const Tensor &matrix) {
    if (matrix.rank() != 2 || matrix.dim(0) != matrix.dim(1)) {
        throw Error(ErrorCode::BadShape, "unitarity check needs a square matrix");
    }
    const std::size_t d = matrix.dim(0);
    Tensor prod = contract(matrix.conj(), matrix, {{0, 0}});
    double worst = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            Complex expect = i == j ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(prod[i * d + j] - expect));
        }
    }
    return worst;
}

}  // namespace tnsim
