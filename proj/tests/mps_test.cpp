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

#include "tnsim/mps.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "test_util.hpp"
#include "tnsim/error.hpp"
#include "tnsim/gates.hpp"

using namespace tnsim;

namespace {

// Amplitude <bits|m> as a product of matrices A[i][:, b_i, :], by explicit loops.
Complex amplitude_by_loops(const Mps &m, std::uint64_t index) {
    const std::size_t n = m.size();
    std::vector<Complex> row{1.0};
    for (std::size_t i = 0; i < n; ++i) {
        const Tensor &a = m.site(i);
        const std::size_t b = (index >> (n - 1 - i)) & 1;
        std::vector<Complex> next(a.dim(2));
        for (std::size_t l = 0; l < a.dim(0); ++l) {
            for (std::size_t r = 0; r < a.dim(2); ++r) {
                next[r] += row[l] * a.at({l, b, r});
            }
        }
        row = std::move(next);
    }
    return row[0];
}

std::vector<Complex> dense_by_loops(const Mps &m) {
    std::vector<Complex> out(std::size_t{1} << m.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = amplitude_by_loops(m, i);
    }
    return out;
}

Mps bell() {
    Mps m = Mps::from_product_state({0, 0});
    FidelityLedger ledger;
    m.apply_single(gate_tensor(GateKind::H, {}), 0);
    m.apply_adjacent_gate(gate_tensor(GateKind::CX, {}), 0, TruncationPolicy::exact(), ledger);
    return m;
}

Mps ghz(std::size_t n) {
    Mps m = Mps::from_product_state(std::vector<int>(n, 0));
    FidelityLedger ledger;
    m.apply_single(gate_tensor(GateKind::H, {}), 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        m.apply_adjacent_gate(gate_tensor(GateKind::CX, {}), i, TruncationPolicy::exact(), ledger);
    }
    return m;
}

Tensor ghz_dense_tensor(std::size_t n) {
    Shape shape{1};
    for (std::size_t i = 0; i < n; ++i) {
        shape.push_back(2);
    }
    shape.push_back(1);
    Tensor t(shape);
    t[0] = 1.0 / std::numbers::sqrt2;
    t[t.size() - 1] = 1.0 / std::numbers::sqrt2;
    return t;
}

bool left_isometric(const Tensor &a, double tol) {
    Tensor g = contract(a.conj(), a, {{0, 0}, {1, 1}});
    return relative_distance(g, Tensor::identity(a.dim(2))) < tol;
}

bool right_isometric(const Tensor &a, double tol) {
    Tensor g = contract(a, a.conj(), {{1, 1}, {2, 2}});
    return relative_distance(g, Tensor::identity(a.dim(0))) < tol;
}

}  // namespace

TEST(mps, product_state_basics) {
    Mps m = Mps::from_product_state({0, 0, 0});
    EXPECT_EQ(m.bond_dims(), (std::vector<std::size_t>{1, 1}));
    EXPECT_NEAR(m.norm(), 1.0, 1e-15);
    Mps one = Mps::from_product_state({1});
    EXPECT_EQ(one.site(0)[0], Complex(0.0));
    EXPECT_EQ(one.site(0)[1], Complex(1.0));
    EXPECT_THROW(Mps::from_product_state(std::vector<int>{}), Error);
}

TEST(mps, product_state_dense) {
    Mps m = Mps::from_product_state({0, 1, 0, 1});
    std::vector<Complex> d = dense_by_loops(m);
    for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_EQ(d[i], Complex(i == 5 ? 1.0 : 0.0));
    }
    EXPECT_LT(testutil::max_abs_diff(m.to_dense(), d), 1e-15);
}

TEST(mps, orthogonalize_product_state_unchanged) {
    Mps m = Mps::from_product_state({1, 0, 1});
    Mps before = m;
    m.orthogonalize(0);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_LT(relative_distance(m.site(i), before.site(i)), 1e-15);
    }
}

TEST(mps, orthogonalize_bell_overlap) {
    Mps m = bell();
    Mps original = m;
    m.orthogonalize(1);
    m.orthogonalize(0);
    EXPECT_NEAR(std::abs(overlap(original, m)), 1.0, 1e-12);
}

TEST(mps, orthogonalize_random_isometries) {
    Rng rng(11);
    Mps m = Mps::random(6, 4, rng);
    const std::vector<Complex> dense = m.to_dense();
    m.set_site(0, m.site(0));  // forget the center
    m.orthogonalize(2);
    ASSERT_EQ(m.ortho_center(), std::optional<std::size_t>(2));
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_TRUE(left_isometric(m.site(i), 1e-10));
    }
    for (std::size_t i = 3; i < 6; ++i) {
        EXPECT_TRUE(right_isometric(m.site(i), 1e-10));
    }
    EXPECT_NEAR(m.site(2).norm_squared(), 1.0, 1e-12);
    EXPECT_LT(testutil::max_abs_diff(m.to_dense(), dense), 1e-12);
    EXPECT_THROW(m.orthogonalize(6), Error);
}

TEST(mps, orthogonalize_idempotent) {
    Rng rng(12);
    Mps m = Mps::random(5, 4, rng);
    m.orthogonalize(3);
    Mps once = m;
    m.orthogonalize(3);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_LT(relative_distance(m.site(i), once.site(i)), 1e-12);
    }
}

TEST(mps, cnot_on_10) {
    Mps m = Mps::from_product_state({1, 0});
    FidelityLedger ledger;
    m.apply_adjacent_gate(gate_tensor(GateKind::CX, {}), 0, TruncationPolicy::exact(), ledger);
    EXPECT_NEAR(std::abs(amplitude_by_loops(m, 3)), 1.0, 1e-14);
    EXPECT_DOUBLE_EQ(ledger.fidelity(), 1.0);
    EXPECT_EQ(m.ortho_center(), std::optional<std::size_t>(1));
}

TEST(mps, single_qubit_keeps_bonds) {
    Rng rng(13);
    Mps m = Mps::random(5, 4, rng);
    auto bonds = m.bond_dims();
    m.apply_single(gate_tensor(GateKind::Z, {}), 2);
    EXPECT_EQ(m.bond_dims(), bonds);
    EXPECT_NEAR(m.norm(), 1.0, 1e-12);
}

TEST(mps, bell_truncated_to_chi1) {
    Mps m = Mps::from_product_state({0, 0});
    FidelityLedger ledger;
    m.apply_single(gate_tensor(GateKind::H, {}), 0);
    m.apply_adjacent_gate(gate_tensor(GateKind::CX, {}), 0, TruncationPolicy::capped(1), ledger);
    ASSERT_EQ(ledger.factors.size(), 1u);
    EXPECT_NEAR(ledger.factors[0], 0.5, 1e-14);
    EXPECT_NEAR(ledger.fidelity(), 0.5, 1e-14);
    EXPECT_EQ(m.max_bond(), 1u);
    EXPECT_NEAR(m.norm(), 1.0, 1e-14);
}

TEST(mps, three_site_gate) {
    Mps m = Mps::from_product_state({1, 1, 0});
    FidelityLedger ledger;
    m.apply_adjacent_gate(gate_tensor(GateKind::CCX, {}), 0, TruncationPolicy::exact(), ledger);
    EXPECT_NEAR(std::abs(amplitude_by_loops(m, 7)), 1.0, 1e-14);
    EXPECT_EQ(m.ortho_center(), std::optional<std::size_t>(2));
}

TEST(mps, gate_application_matches_dense_product) {
    // Apply a random unitary on sites 1..2 of a random 4-qubit state and
    // compare with the explicit matrix action on the dense vector.
    Rng rng(14);
    Mps m = Mps::random(4, 4, rng);
    std::vector<Complex> psi = dense_by_loops(m);
    QrResult f = qr(testutil::random_tensor({4, 4}, rng), {0});
    Tensor u = f.q;
    FidelityLedger ledger;
    m.apply_adjacent_gate(u.reshaped({2, 2, 2, 2}), 1, TruncationPolicy::exact(), ledger);
    std::vector<Complex> expect(16);
    for (std::size_t q0 = 0; q0 < 2; ++q0) {
        for (std::size_t q3 = 0; q3 < 2; ++q3) {
            for (std::size_t r = 0; r < 4; ++r) {
                Complex acc = 0.0;
                for (std::size_t c = 0; c < 4; ++c) {
                    acc += u[r * 4 + c] * psi[q0 * 8 + c * 2 + q3];
                }
                expect[q0 * 8 + r * 2 + q3] = acc;
            }
        }
    }
    EXPECT_LT(testutil::max_abs_diff(dense_by_loops(m), expect), 1e-12);
    EXPECT_NEAR(m.norm(), 1.0, 1e-12);
}

TEST(mps, swap_adjacent_exchanges_qubits) {
    Rng rng(31);
    Mps m = Mps::random(4, 4, rng);
    const std::vector<Complex> psi = dense_by_loops(m);
    FidelityLedger ledger;
    m.swap_adjacent(1, TruncationPolicy::exact(), ledger);
    std::vector<Complex> expect(16);
    for (std::size_t i = 0; i < 16; ++i) {
        const std::size_t b1 = (i >> 2) & 1, b2 = (i >> 1) & 1;
        expect[(i & 0b1001) | (b2 << 2) | (b1 << 1)] = psi[i];
    }
    EXPECT_LT(testutil::max_abs_diff(dense_by_loops(m), expect), 1e-12);
    EXPECT_EQ(m.ortho_center(), std::optional<std::size_t>(2));
    EXPECT_DOUBLE_EQ(ledger.fidelity(), 1.0);
}

TEST(mps, decompose_dense_product) {
    Tensor psi(Shape{1, 2, 2, 2, 1});
    psi[0] = 1.0;
    FidelityLedger ledger;
    auto sites = decompose_dense(psi, TruncationPolicy::exact(), ledger);
    ASSERT_EQ(sites.size(), 3u);
    for (const Tensor &s : sites) {
        EXPECT_EQ(s.dim(0), 1u);
        EXPECT_EQ(s.dim(2), 1u);
    }
    EXPECT_DOUBLE_EQ(ledger.fidelity(), 1.0);
}

TEST(mps, decompose_dense_right_to_left) {
    Rng rng(43);
    Tensor psi = testutil::random_tensor({3, 2, 2, 2, 4}, rng);
    FidelityLedger ledger;
    auto sites = decompose_dense(psi, TruncationPolicy::exact(), ledger, SweepDirection::RightToLeft);
    ASSERT_EQ(sites.size(), 3u);
    Tensor back = sites[0];
    for (std::size_t i = 1; i < sites.size(); ++i) {
        back = contract(back, sites[i], {{back.rank() - 1, 0}});
        Tensor gram = contract(sites[i], sites[i].conj(), {{1, 1}, {2, 2}});
        EXPECT_LT(relative_distance(gram, Tensor::identity(sites[i].dim(0))), 1e-12);
    }
    EXPECT_LT(relative_distance(back, psi), 1e-12);
    EXPECT_DOUBLE_EQ(ledger.fidelity(), 1.0);

    FidelityLedger cut;
    auto ghz = decompose_dense(ghz_dense_tensor(4), TruncationPolicy::capped(1), cut, SweepDirection::RightToLeft);
    EXPECT_NEAR(cut.fidelity(), 0.5, 1e-12);
}

TEST(mps, decompose_dense_ghz) {
    FidelityLedger ledger;
    auto sites = decompose_dense(ghz_dense_tensor(4), TruncationPolicy::capped(2), ledger);
    Mps m = Mps::from_sites(sites);
    EXPECT_EQ(m.bond_dims(), (std::vector<std::size_t>{2, 2, 2}));
    EXPECT_DOUBLE_EQ(ledger.fidelity(), 1.0);

    // With chi = 1 the first cut keeps one GHZ branch; the remainder is then
    // a product state and later cuts lose nothing. The ledger must agree with
    // the exact overlap against the untruncated state.
    FidelityLedger cut;
    Mps truncated = Mps::from_sites(decompose_dense(ghz_dense_tensor(4), TruncationPolicy::capped(1), cut));
    const double exact = std::norm(overlap(m, truncated));
    EXPECT_NEAR(exact, 0.5, 1e-12);
    EXPECT_NEAR(cut.fidelity(), exact, 1e-12);
    EXPECT_EQ(cut.truncation_count, 1u);

    EXPECT_THROW(decompose_dense(Tensor(Shape{1, 3, 1}), TruncationPolicy::exact(), ledger), Error);
}

TEST(mps, entanglement_entropy) {
    Mps p = Mps::from_product_state({0, 1, 0});
    EXPECT_NEAR(p.entanglement_entropy(0), 0.0, 1e-12);
    EXPECT_NEAR(p.entanglement_entropy(1), 0.0, 1e-12);
    Mps b = bell();
    EXPECT_NEAR(b.entanglement_entropy(0), 1.0, 1e-12);
    Mps g = ghz(4);
    EXPECT_NEAR(g.entanglement_entropy(1), 1.0, 1e-12);
    EXPECT_THROW(g.entanglement_entropy(3), Error);
}

TEST(mps, overlap_values) {
    Mps a = Mps::from_product_state({0, 0, 0});
    Mps b = Mps::from_product_state({1, 0, 0});
    EXPECT_NEAR(std::abs(overlap(a, a) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(overlap(a, b)), 0.0, 1e-15);
    Mps bl = bell();
    Mps zz = Mps::from_product_state({0, 0});
    EXPECT_NEAR(std::abs(overlap(bl, zz)), 1.0 / std::numbers::sqrt2, 1e-14);
    EXPECT_THROW(overlap(a, zz), Error);
}

TEST(mps, unitary_preserves_norm_and_dense_state) {
    Rng rng(15);
    Mps m = Mps::random(8, 8, rng);
    std::vector<Complex> psi = m.to_dense();
    FidelityLedger ledger;
    for (std::size_t start = 0; start + 1 < 8; ++start) {
        m.apply_adjacent_gate(gate_tensor(GateKind::SqrtSwap, {}), start, TruncationPolicy::exact(), ledger);
    }
    Tensor u = gate_matrix(GateKind::SqrtSwap, {});
    for (std::size_t start = 0; start + 1 < 8; ++start) {
        testutil::apply_pair_dense(psi, 8, start, u);
    }
    EXPECT_NEAR(m.norm(), 1.0, 1e-10);
    EXPECT_DOUBLE_EQ(ledger.fidelity(), 1.0);
    EXPECT_LT(testutil::max_abs_diff(m.to_dense(), psi), 1e-10);
}

TEST(mps, bond_caps_respected) {
    Rng rng(16);
    Mps m = Mps::random(8, 16, rng);
    for (std::size_t b = 0; b < 7; ++b) {
        std::size_t cap = std::size_t{1} << std::min(b + 1, 7 - b);
        EXPECT_LE(m.bond_dims()[b], cap);
    }
    FidelityLedger ledger;
    for (std::size_t start = 0; start + 1 < 8; ++start) {
        m.apply_adjacent_gate(gate_tensor(GateKind::CH, {}), start, TruncationPolicy::capped(3), ledger);
        EXPECT_LE(m.bond_dims()[start], 3u);
    }
}

TEST(mps, sampling_distribution) {
    Mps m = bell();
    Rng rng(17, Rng::kSampling);
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < 2000; ++i) {
        auto bits = m.sample_prefix(2, rng);
        counts[bits[0] * 2 + bits[1]]++;
    }
    EXPECT_EQ(counts[1] + counts[2], 0);
    EXPECT_NEAR(counts[0] / 2000.0, 0.5, 0.05);
}

TEST(mps, snapshot_round_trip) {
    Rng rng(18);
    Mps m = Mps::random(5, 4, rng);
    auto path = std::filesystem::temp_directory_path() / "tnsim_snapshot_test.bin";
    m.write_snapshot(path);
    Mps back = Mps::read_snapshot(path);
    std::filesystem::remove(path);
    ASSERT_EQ(back.bond_dims(), m.bond_dims());
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(testutil::max_abs_diff(back.site(i).data(), m.site(i).data()), 0.0);
    }
}
