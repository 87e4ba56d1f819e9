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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "fixtures.hpp"
#include "test_util.hpp"
#include "tnsim/error.hpp"

using namespace tnsim;

TEST(oracle, hadamard) {
    Circuit c(1);
    c.add(GateKind::H, {0});
    Statevector s = simulate_dense(c);
    EXPECT_NEAR(s.amplitudes()[0].real(), 1.0 / std::numbers::sqrt2, 1e-15);
    EXPECT_NEAR(s.amplitudes()[1].real(), 1.0 / std::numbers::sqrt2, 1e-15);
}

TEST(oracle, identity_circuit) {
    std::vector<int> bits{1, 0, 0, 1, 1, 0, 1, 0};
    Statevector s = simulate_dense(testutil::fig1_circuit(true), bits);
    Statevector basis(bits);
    EXPECT_EQ(s.amplitudes(), basis.amplitudes());
}

TEST(oracle, basis_states_match_product_mps) {
    for (std::size_t n = 1; n <= 6; ++n) {
        for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << n); ++idx) {
            std::vector<int> bits(n);
            for (std::size_t i = 0; i < n; ++i) {
                bits[i] = static_cast<int>((idx >> (n - 1 - i)) & 1);
            }
            std::vector<Complex> dense = Mps::from_product_state(bits).to_dense();
            for (std::size_t j = 0; j < dense.size(); ++j) {
                ASSERT_EQ(dense[j], Complex(j == idx ? 1.0 : 0.0));
            }
        }
    }
}

TEST(oracle, non_adjacent_gate_matches_pair_oracle) {
    // cx(0, 2) on 3 qubits equals swap(1,2) cx(0,1) swap(1,2).
    Rng rng(21);
    std::vector<Complex> psi(8);
    for (auto &x : psi) {
        x = rng.complex_normal();
    }
    Statevector s(3, psi);
    s.apply(make_gate(GateKind::CX, {0, 2}));
    std::vector<Complex> ref = psi;
    testutil::apply_pair_dense(ref, 3, 1, gate_matrix(GateKind::Swap, {}));
    testutil::apply_pair_dense(ref, 3, 0, gate_matrix(GateKind::CX, {}));
    testutil::apply_pair_dense(ref, 3, 1, gate_matrix(GateKind::Swap, {}));
    EXPECT_LT(testutil::max_abs_diff(s.amplitudes(), ref), 1e-14);
}

TEST(oracle, same_layer_order_invariance) {
    Circuit c = generate_random_structured(8, 6, GateFamily::NonClifford, 4);
    Statevector a = simulate_dense(c);
    // Reverse the order of gates inside each layer and run directly.
    std::vector<Gate> order = c.execution_order();
    std::vector<Gate> shuffled;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && order[j].layer == order[i].layer) {
            ++j;
        }
        for (std::size_t k = j; k > i; --k) {
            shuffled.push_back(order[k - 1]);
        }
        i = j;
    }
    Statevector b = Statevector::zero(8);
    for (const Gate &g : shuffled) {
        b.apply(g);
    }
    EXPECT_LT(testutil::max_abs_diff(a.amplitudes(), b.amplitudes()), 1e-12);
    EXPECT_NEAR(a.norm(), 1.0, 1e-12);
}

TEST(oracle, exact_fidelity_values) {
    Mps m = Mps::from_product_state({0, 1, 1});
    EXPECT_NEAR(exact_fidelity(m, Statevector(std::vector<int>{0, 1, 1})), 1.0, 1e-15);
    EXPECT_NEAR(exact_fidelity(m, Statevector(std::vector<int>{1, 1, 1})), 0.0, 1e-15);

    Circuit bell(2);
    bell.add(GateKind::H, {0});
    bell.add(GateKind::CX, {0, 1});
    Statevector exact = simulate_dense(bell);
    Mps t = Mps::from_product_state({0, 0});
    FidelityLedger ledger;
    t.apply_single(gate_tensor(GateKind::H, {}), 0);
    t.apply_adjacent_gate(gate_tensor(GateKind::CX, {}), 0, TruncationPolicy::capped(1), ledger);
    EXPECT_NEAR(exact_fidelity(t, exact), 0.5, 1e-14);
}

TEST(oracle, cap) {
    EXPECT_EQ(oracle_qubit_cap(), 20u);
    setenv("TNSIM_ORACLE_CAP", "4", 1);
    EXPECT_EQ(oracle_qubit_cap(), 4u);
    try {
        Statevector::zero(5);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::TooLarge);
    }
    unsetenv("TNSIM_ORACLE_CAP");
    EXPECT_NO_THROW(Statevector::zero(5));
}
