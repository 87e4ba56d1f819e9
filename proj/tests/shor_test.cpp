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

#include "tnsim/shor.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "tnsim/cluster_tebd.hpp"
#include "tnsim/error.hpp"
#include "tnsim/oracle.hpp"
#include "tnsim/tebd.hpp"

using namespace tnsim;

namespace {

// Bit of qubit q in a dense index (qubit 0 is the MSB).
int bit_of(std::uint64_t index, std::size_t num_qubits, std::size_t q) {
    return static_cast<int>((index >> (num_qubits - 1 - q)) & 1u);
}

// Value of a register whose m-th entry is bit m (LSB first).
std::uint64_t read_lsb_first(std::uint64_t index, std::size_t num_qubits, const std::vector<std::size_t> &reg) {
    std::uint64_t v = 0;
    for (std::size_t m = 0; m < reg.size(); ++m) {
        v |= static_cast<std::uint64_t>(bit_of(index, num_qubits, reg[m])) << m;
    }
    return v;
}

void write_lsb_first(std::vector<int> &bits, const std::vector<std::size_t> &reg, std::uint64_t value) {
    for (std::size_t m = 0; m < reg.size(); ++m) {
        bits[reg[m]] = static_cast<int>((value >> m) & 1u);
    }
}

// Index of the single basis state carrying the output; fails the test if the
// output is not a basis state.
std::uint64_t dominant_basis(const Statevector &s) {
    const auto &amps = s.amplitudes();
    std::size_t best = 0;
    for (std::size_t i = 1; i < amps.size(); ++i) {
        if (std::norm(amps[i]) > std::norm(amps[best])) {
            best = i;
        }
    }
    EXPECT_NEAR(std::norm(amps[best]), 1.0, 1e-9);
    return best;
}

std::vector<std::size_t> iota_range(std::size_t first, std::size_t count) {
    std::vector<std::size_t> v(count);
    std::iota(v.begin(), v.end(), first);
    return v;
}

std::vector<std::size_t> reversed(std::vector<std::size_t> v) {
    return {v.rbegin(), v.rend()};
}

bool all_adjacent(const Circuit &c) {
    for (const Gate &g : c.gates()) {
        if (g.arity() > 1 && g.max_qubit() - g.min_qubit() + 1 != g.arity()) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST(shor_sizes, qubit_counts_for_reference_instances) {
    struct Case {
        std::uint64_t n;
        double eps;
        std::size_t qubits;
    };
    const std::vector<Case> cases{{15, 1e-3, 29}, {21, 1e-4, 37}, {35, 1e-5, 44}, {91, 1e-5, 48}, {221, 1e-9, 65}};
    for (const Case &c : cases) {
        EXPECT_EQ(shor_qubit_count(c.n, c.eps), c.qubits) << "N=" << c.n;
    }
    EXPECT_EQ(precision_bits(1e-3), 9u);
    EXPECT_EQ(counting_register_size(15, 1e-3), 17u);
}

TEST(shor_sizes, built_circuit_matches_formula) {
    ShorParams p;
    auto [c, report] = build_order_finding_circuit(p);
    EXPECT_EQ(report.qubit_count, 29u);
    EXPECT_EQ(c.num_qubits(), 29u);
    EXPECT_EQ(report.gate_count, c.size());
    EXPECT_EQ(report.layer_count, c.num_layers());
    EXPECT_EQ(report.registers.counting.size(), 17u);
    EXPECT_EQ(report.registers.x.size(), 4u);
    EXPECT_EQ(report.registers.b.size(), 6u);
    EXPECT_GT(report.swap_count, 0u);
    EXPECT_TRUE(all_adjacent(c));

    std::set<std::size_t> used(report.registers.counting.begin(), report.registers.counting.end());
    used.insert(report.registers.x.begin(), report.registers.x.end());
    used.insert(report.registers.b.begin(), report.registers.b.end());
    used.insert(report.registers.bus);
    used.insert(report.registers.anc);
    EXPECT_EQ(used.size(), 29u);
}

TEST(shor_sizes, thirty_seven_qubits_for_21) {
    ShorParams p;
    p.n_to_factor = 21;
    p.a = 2;
    p.epsilon = 1e-4;
    auto [c, report] = build_order_finding_circuit(p);
    EXPECT_EQ(report.qubit_count, 37u);
    EXPECT_TRUE(all_adjacent(c));
}

TEST(shor_params, validation) {
    ShorParams p;
    EXPECT_NO_THROW(p.validate());
    auto code_of = [](ShorParams q) -> std::optional<ErrorCode> {
        try {
            q.validate();
        } catch (const Error &e) {
            return e.code();
        }
        return std::nullopt;
    };
    ShorParams q = p;
    q.n_to_factor = 9;
    EXPECT_EQ(code_of(q), ErrorCode::InvalidParams);  // 3^2
    q.n_to_factor = 27;
    q.a = 2;
    EXPECT_EQ(code_of(q), ErrorCode::InvalidParams);  // 3^3
    q.n_to_factor = 16;
    q.a = 3;
    EXPECT_EQ(code_of(q), ErrorCode::InvalidParams);  // even
    q.n_to_factor = 17;
    EXPECT_EQ(code_of(q), ErrorCode::InvalidParams);  // prime
    q = p;
    q.a = 5;
    EXPECT_EQ(code_of(q), ErrorCode::InvalidParams);  // gcd(5, 15) = 5
    q = p;
    q.a = 1;
    EXPECT_EQ(code_of(q), ErrorCode::InvalidParams);
    q = p;
    q.epsilon = 0.0;
    EXPECT_EQ(code_of(q), ErrorCode::InvalidParams);
    q = p;
    q.epsilon = 1.5;
    EXPECT_EQ(code_of(q), ErrorCode::InvalidParams);
    EXPECT_THROW(build_order_finding_circuit(ShorParams{9, 2, 1e-3, 0, std::nullopt}), Error);
}

TEST(shor_routing, long_range_gates_become_adjacent_and_restore_order) {
    const std::vector<Gate> gates{make_gate(GateKind::CX, {0, 4}), make_gate(GateKind::CCX, {5, 1, 3}),
                                  make_gate(GateKind::CP, {2, 3}, {0.4}), make_gate(GateKind::H, {2})};
    std::size_t swaps = 0;
    const std::vector<Gate> routed = route_adjacent(gates, &swaps);
    // CX(0,4): 3 swaps each way. CCX(5,1,3): qubit 3 -> 4, qubit 1 -> 3.
    EXPECT_EQ(swaps, 2u * 3u + 2u * (1u + 2u));
    const Circuit a = assign_layers(6, gates);
    const Circuit b = assign_layers(6, routed);
    EXPECT_TRUE(all_adjacent(b));
    EXPECT_FALSE(all_adjacent(a));
    for (std::uint64_t basis : {0ull, 5ull, 19ull, 42ull, 63ull}) {
        const Statevector in = Statevector::basis(6, basis);
        Statevector x = in;
        Statevector y = in;
        for (const Gate &g : a.execution_order()) {
            x.apply(g);
        }
        for (const Gate &g : b.execution_order()) {
            y.apply(g);
        }
        EXPECT_NEAR(std::abs(inner(x.amplitudes(), y.amplitudes())), 1.0, 1e-12) << basis;
    }
}

TEST(shor_blocks, draper_adder_three_plus_four) {
    // [a: 3 bits, MSB first][b: 4 bits, MSB first]
    const Circuit c = build_draper_adder(3);
    ASSERT_EQ(c.num_qubits(), 7u);
    EXPECT_TRUE(all_adjacent(c));
    std::vector<int> bits{0, 1, 1, 0, 1, 0, 0};
    const std::uint64_t out = dominant_basis(simulate_dense(c, bits));
    EXPECT_EQ(out, (3u << 4) | 7u);
}

TEST(shor_blocks, draper_adder_all_inputs) {
    const std::size_t w = 3;
    const Circuit c = build_draper_adder(w);
    const auto a_reg = reversed(iota_range(0, w));
    const auto b_reg = reversed(iota_range(w, w + 1));
    for (std::uint64_t a = 0; a < 8; ++a) {
        for (std::uint64_t b = 0; b < 8; ++b) {
            std::vector<int> bits(2 * w + 1, 0);
            write_lsb_first(bits, a_reg, a);
            write_lsb_first(bits, b_reg, b);
            const std::uint64_t out = dominant_basis(simulate_dense(c, bits));
            EXPECT_EQ(read_lsb_first(out, 2 * w + 1, a_reg), a);
            EXPECT_EQ(read_lsb_first(out, 2 * w + 1, b_reg), a + b);
        }
    }
}

TEST(shor_blocks, modular_adder_on_all_residues) {
    // [ctrl][b: n+2 bits, LSB first][ancilla]
    for (std::uint64_t n_val : {std::uint64_t{15}, std::uint64_t{21}}) {
        const std::size_t n = bit_length(n_val);
        const auto b_reg = iota_range(1, n + 2);
        const std::size_t total = n + 4;
        for (std::uint64_t a : {std::uint64_t{1}, std::uint64_t{7}, n_val - 1}) {
            const Circuit c = build_modular_adder_block(a, n_val);
            EXPECT_TRUE(all_adjacent(c));
            for (std::uint64_t b = 0; b < n_val; ++b) {
                for (int ctrl : {0, 1}) {
                    std::vector<int> bits(total, 0);
                    bits[0] = ctrl;
                    write_lsb_first(bits, b_reg, b);
                    const std::uint64_t out = dominant_basis(simulate_dense(c, bits));
                    const std::uint64_t want = ctrl ? (a + b) % n_val : b;
                    EXPECT_EQ(read_lsb_first(out, total, b_reg), want) << "N=" << n_val << " a=" << a << " b=" << b;
                    EXPECT_EQ(bit_of(out, total, 0), ctrl);
                    EXPECT_EQ(bit_of(out, total, total - 1), 0) << "ancilla not restored";
                }
            }
        }
    }
}

TEST(shor_blocks, controlled_multiply_accumulate) {
    const std::uint64_t n_val = 15;
    const ShorRegisters r = multiplier_block_registers(n_val);
    const std::size_t total = r.anc + 1;
    for (std::uint64_t a : {2ull, 7ull}) {
        const Circuit c = build_multiplier_block(a, n_val, false);
        for (std::uint64_t x = 0; x < 16; x += 3) {
            for (std::uint64_t b0 : {0ull, 4ull, 14ull}) {
                for (int ctrl : {0, 1}) {
                    std::vector<int> bits(total, 0);
                    bits[0] = ctrl;
                    write_lsb_first(bits, r.x, x);
                    write_lsb_first(bits, r.b, b0);
                    const std::uint64_t out = dominant_basis(simulate_dense(c, bits));
                    const std::uint64_t want = ctrl ? (b0 + a * x) % n_val : b0;
                    EXPECT_EQ(read_lsb_first(out, total, r.b), want) << "a=" << a << " x=" << x << " b=" << b0;
                    EXPECT_EQ(read_lsb_first(out, total, r.x), x);
                    EXPECT_EQ(bit_of(out, total, r.bus), 0);
                    EXPECT_EQ(bit_of(out, total, r.anc), 0);
                }
            }
        }
    }
}

TEST(shor_blocks, modular_multiplier_examples) {
    EXPECT_EQ(modular_multiplier_check(7, 15, 1), std::optional<std::uint64_t>(7));
    EXPECT_EQ(modular_multiplier_check(7, 15, 0), std::optional<std::uint64_t>(0));
    EXPECT_EQ(modular_multiplier_check(4, 15, 7), std::optional<std::uint64_t>(13));
}

TEST(shor_blocks, modular_multiplier_all_residues) {
    for (std::uint64_t a : {2ull, 4ull, 7ull, 8ull, 11ull, 13ull, 14ull}) {
        for (std::uint64_t x = 0; x < 15; ++x) {
            EXPECT_EQ(modular_multiplier_check(a, 15, x), std::optional<std::uint64_t>(a * x % 15))
                << "a=" << a << " x=" << x;
        }
    }
    for (std::uint64_t x : {1ull, 5ull, 20ull}) {
        EXPECT_EQ(modular_multiplier_check(2, 21, x), std::optional<std::uint64_t>(2 * x % 21));
    }
    EXPECT_THROW(modular_multiplier_check(7, 15, 16), Error);
}

TEST(shor_blocks, multiplier_block_respects_oracle_cap) {
    // N = 221 has 8 bits, so the block needs 21 qubits.
    try {
        modular_multiplier_check(2, 221, 1);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::OracleTooLarge);
    }
}

TEST(shor_classical, number_theory) {
    EXPECT_EQ(powmod(7, 4, 15), 1u);
    EXPECT_EQ(powmod(2, 10, 1000), 24u);
    EXPECT_EQ(multiplicative_order(7, 15), 4u);
    EXPECT_EQ(multiplicative_order(14, 15), 2u);
    EXPECT_EQ(multiplicative_order(2, 21), 6u);
    EXPECT_EQ(modular_inverse(7, 15), 13u);
    EXPECT_EQ(7u * modular_inverse(7, 15) % 15, 1u);
    EXPECT_THROW(modular_inverse(5, 15), Error);
}

TEST(shor_classical, factors_from_order) {
    auto r = factors_from_order(7, 15, 4);
    ASSERT_TRUE(r.factors);
    EXPECT_EQ(*r.factors, (std::pair<std::uint64_t, std::uint64_t>{3, 5}));

    r = factors_from_order(2, 21, 6);
    ASSERT_TRUE(r.factors);
    EXPECT_EQ(*r.factors, (std::pair<std::uint64_t, std::uint64_t>{3, 7}));

    // 14 = -1 mod 15: a^(r/2) = -1 gives only trivial factors.
    r = factors_from_order(14, 15, 2);
    EXPECT_TRUE(r.retry());
    EXPECT_FALSE(r.note.empty());

    // Odd order.
    r = factors_from_order(4, 21, 3);
    EXPECT_TRUE(r.retry());
}

TEST(shor_classical, postprocess_phases) {
    // Phase k/4 read from a 12-bit register.
    for (std::uint64_t k : {1ull, 3ull}) {
        const auto r = postprocess(k << 10, 12, 7, 15);
        ASSERT_TRUE(r.order);
        EXPECT_EQ(*r.order, 4u);
        ASSERT_TRUE(r.factors);
        EXPECT_EQ(*r.factors, (std::pair<std::uint64_t, std::uint64_t>{3, 5}));
    }
    EXPECT_TRUE(postprocess(0, 12, 7, 15).retry());
    // 1/2 only reveals r/2; trying multiples of the denominator recovers 4.
    EXPECT_FALSE(postprocess(2ull << 10, 12, 7, 15).retry());
    // Approximate phase: 683/4096 ~ 1/6.
    const auto near = postprocess(683, 12, 2, 21);
    ASSERT_TRUE(near.factors);
    EXPECT_EQ(*near.factors, (std::pair<std::uint64_t, std::uint64_t>{3, 7}));
    EXPECT_TRUE(postprocess(1ull << 11, 12, 14, 15).retry());
}

TEST(shor_backends, names_round_trip) {
    for (ShorBackend b : {ShorBackend::Tebd, ShorBackend::ClusterTebd, ShorBackend::Dmrg, ShorBackend::Statevector}) {
        EXPECT_EQ(shor_backend_from_name(shor_backend_name(b)), b);
    }
    EXPECT_EQ(shor_backend_from_name("cluster_tebd"), ShorBackend::ClusterTebd);
    EXPECT_THROW(shor_backend_from_name("qpu"), Error);
}

TEST(shor_backends, statevector_refuses_full_instance) {
    ShorRunConfig cfg;
    cfg.backend = ShorBackend::Statevector;
    try {
        run_shor(ShorParams{}, cfg);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::OracleTooLarge);
    }
}

// Three counting qubits give a 15-qubit instance that the dense oracle can
// check end to end.
TEST(shor_end_to_end, small_instance_matches_oracle) {
    ShorParams p;
    p.counting_qubits = 3;
    auto [c, report] = build_order_finding_circuit(p);
    ASSERT_EQ(report.qubit_count, 15u);
    const Statevector exact = simulate_dense(c);

    TebdConfig tc;
    tc.policy = TruncationPolicy::capped(64);
    TebdResult tr = run_tebd(c, Mps::from_product_state(std::vector<int>(15, 0)), tc);
    EXPECT_GT(exact_fidelity(tr.state, exact), 1.0 - 1e-9);

    ClusterConfig cc;
    cc.policy = TruncationPolicy::capped(64);
    cc.q_max = 8;
    ClusterTebdResult cr = run_cluster_tebd(c, Mps::from_product_state(std::vector<int>(15, 0)), cc);
    EXPECT_GT(exact_fidelity(cr.state, exact), 1.0 - 1e-9);

    // Order 4 with a 3-bit register: outcomes 0, 2, 4, 6 with weight 1/4.
    const std::vector<double> dist = tr.state.prefix_distribution(3);
    for (std::size_t y = 0; y < 8; ++y) {
        EXPECT_NEAR(dist[y], y % 2 == 0 ? 0.25 : 0.0, 1e-9) << y;
    }
}

TEST(shor_end_to_end, small_instance_factors_on_each_backend) {
    ShorParams p;
    p.counting_qubits = 3;
    p.seed = 5;
    for (ShorBackend b : {ShorBackend::Statevector, ShorBackend::Tebd, ShorBackend::ClusterTebd}) {
        ShorRunConfig cfg;
        cfg.backend = b;
        cfg.cluster.q_max = 8;
        const ShorResult res = run_shor(p, cfg);
        ASSERT_TRUE(res.factors) << shor_backend_name(b);
        EXPECT_EQ(*res.factors, (std::pair<std::uint64_t, std::uint64_t>{3, 5}));
        EXPECT_GE(res.attempts, 1u);
        EXPECT_LE(res.attempts, cfg.max_attempts);
        EXPECT_EQ(res.measurements.size(), res.attempts);
        EXPECT_EQ(res.backend, shor_backend_name(b));
    }
}

TEST(shor_end_to_end, sampling_is_seeded) {
    ShorParams p;
    p.counting_qubits = 4;
    p.seed = 11;
    ShorRunConfig cfg;
    cfg.backend = ShorBackend::Tebd;
    const ShorResult a = run_shor(p, cfg);
    const ShorResult b = run_shor(p, cfg);
    EXPECT_EQ(a.measurements, b.measurements);
}

// Full 29-qubit instance: the two MPS engines must agree on the counting
// register distribution.
TEST(shor_end_to_end, full_instance_engines_agree) {
    ShorParams p;
    auto [c, report] = build_order_finding_circuit(p);
    const std::size_t n = report.qubit_count;
    const std::size_t t = report.registers.counting.size();

    TebdConfig tc;
    tc.policy = TruncationPolicy::capped(64);
    TebdResult tr = run_tebd(c, Mps::from_product_state(std::vector<int>(n, 0)), tc);
    ClusterConfig cc;
    cc.policy = TruncationPolicy::capped(64);
    cc.q_max = 10;
    ClusterTebdResult cr = run_cluster_tebd(c, Mps::from_product_state(std::vector<int>(n, 0)), cc);

    EXPECT_NEAR(std::abs(overlap(tr.state, cr.state)), 1.0, 1e-9);
    const std::vector<double> pt = tr.state.prefix_distribution(t);
    const std::vector<double> pc = cr.state.prefix_distribution(t);
    double tv = 0.0;
    double peaks = 0.0;
    for (std::size_t y = 0; y < pt.size(); ++y) {
        tv += 0.5 * std::abs(pt[y] - pc[y]);
        if (y % (pt.size() / 4) == 0) {
            peaks += pt[y];
        }
    }
    EXPECT_LT(tv, 1e-6);
    // Order 4 divides 2^17, so the outcomes k * 2^15 carry all the weight.
    EXPECT_NEAR(peaks, 1.0, 1e-6);
}
