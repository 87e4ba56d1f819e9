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

#include "tnsim/cluster_tebd.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "test_util.hpp"
#include "tnsim/error.hpp"
#include "tnsim/oracle.hpp"
#include "tnsim/tebd.hpp"

using namespace tnsim;

namespace {

ClusterConfig config(std::size_t q_max, std::size_t chi = TruncationPolicy::kUnbounded) {
    ClusterConfig cfg;
    cfg.q_max = q_max;
    cfg.policy = TruncationPolicy::capped(chi);
    return cfg;
}

std::vector<std::size_t> unit_bonds(std::size_t n) {
    return std::vector<std::size_t>(n - 1, 1);
}

}  // namespace

TEST(contraction, matches_loop_oracle) {
    Rng rng(31);
    Tensor a = testutil::random_tensor({2, 3}, rng);
    Tensor b = testutil::random_tensor({3, 4}, rng);
    Tensor c = testutil::random_tensor({4, 5}, rng);
    TensorNetwork net;
    net.add(a, {0, 1});
    net.add(b, {1, 2});
    net.add(c, {2, 3});
    ContractionStats stats;
    Tensor r = contract_greedy(std::move(net), {3, 0}, &stats);
    ASSERT_EQ(r.shape(), (Shape{5, 2}));
    auto ab = testutil::naive_matmul({a.data().begin(), a.data().end()}, {b.data().begin(), b.data().end()}, 2, 3, 4);
    auto abc = testutil::naive_matmul(ab, {c.data().begin(), c.data().end()}, 2, 4, 5);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            EXPECT_LT(std::abs(r.at({j, i}) - abc[i * 5 + j]), 1e-12);
        }
    }
    EXPECT_EQ(stats.steps, 2u);
    EXPECT_GT(stats.flops, 0.0);
}

TEST(contraction, disconnected_outer_product) {
    TensorNetwork net;
    net.add(Tensor(Shape{2}, {1.0, 2.0}), {7});
    net.add(Tensor(Shape{2}, {3.0, 5.0}), {9});
    Tensor r = contract_greedy(std::move(net), {9, 7});
    EXPECT_EQ(r.at({1, 0}), Complex(5.0));
    EXPECT_EQ(r.at({0, 1}), Complex(6.0));
}

TEST(contraction, rejects_bad_labels) {
    TensorNetwork net;
    net.add(Tensor(Shape{2}), {1});
    net.add(Tensor(Shape{3}), {1});
    EXPECT_THROW(contract_greedy(std::move(net), {}), Error);
}

TEST(cluster_scan, fig7_example) {
    Circuit c = testutil::fig1_circuit();
    ClusterPlan plan = scan_clusters(c, 1, unit_bonds(8), config(5));
    EXPECT_FALSE(plan.fallback);
    EXPECT_EQ(plan.horizon_layer, 4u);
    ASSERT_EQ(plan.clusters.size(), 3u);
    EXPECT_EQ(plan.clusters[0].first, 0u);
    EXPECT_EQ(plan.clusters[0].last, 1u);
    EXPECT_EQ(plan.clusters[1].first, 2u);
    EXPECT_EQ(plan.clusters[1].last, 3u);
    EXPECT_EQ(plan.clusters[2].first, 4u);
    EXPECT_EQ(plan.clusters[2].last, 7u);
    EXPECT_TRUE(plan.loose_gates.empty());
    std::size_t absorbed = 0;
    for (const Cluster &k : plan.clusters) {
        absorbed += k.gates.size();
    }
    EXPECT_EQ(absorbed, c.layer_range(1, 4).size());
}

TEST(cluster_scan, single_qubit_only) {
    Circuit c(4);
    for (int l = 0; l < 6; ++l) {
        for (std::size_t q = 0; q < 4; ++q) {
            c.add(GateKind::H, {q});
        }
    }
    ClusterConfig cfg = config(4);
    cfg.l_max = 3;
    ClusterPlan plan = scan_clusters(c, 1, unit_bonds(4), cfg);
    EXPECT_EQ(plan.horizon_layer, 3u);
    EXPECT_TRUE(plan.clusters.empty());
    EXPECT_EQ(plan.loose_gates.size(), 12u);
}

TEST(cluster_scan, three_qubit_chain) {
    Circuit c(3);
    c.add(GateKind::CX, {0, 1});
    c.add(GateKind::CX, {1, 2});
    ClusterPlan plan = scan_clusters(c, 1, unit_bonds(3), config(3));
    EXPECT_EQ(plan.horizon_layer, 2u);
    ASSERT_EQ(plan.clusters.size(), 1u);
    EXPECT_EQ(plan.clusters[0].first, 0u);
    EXPECT_EQ(plan.clusters[0].last, 2u);
}

TEST(cluster_scan, boundary_bonds_count) {
    Circuit c(4);
    c.add(GateKind::CX, {1, 2});
    c.add(GateKind::CX, {1, 2});
    // Cluster {1,2} with boundary bonds 4 and 4: 2 + 2 + 2 = 6 > 5.
    ClusterPlan plan = scan_clusters(c, 1, {4, 2, 4}, config(5));
    EXPECT_TRUE(plan.fallback);
    EXPECT_EQ(plan.horizon_layer, 1u);
    ClusterPlan fits = scan_clusters(c, 1, {4, 2, 4}, config(6));
    EXPECT_FALSE(fits.fallback);
    EXPECT_EQ(fits.horizon_layer, 2u);
}

TEST(contract_cluster, bell) {
    Mps m = Mps::from_product_state({0, 0});
    Cluster k{0, 1, {make_gate(GateKind::H, {0}), make_gate(GateKind::CX, {0, 1})}};
    Tensor psi = contract_cluster(k, m.sites(), 4);
    ASSERT_EQ(psi.shape(), (Shape{1, 2, 2, 1}));
    const double s = 1.0 / std::numbers::sqrt2;
    EXPECT_NEAR(std::abs(psi[0] - s), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(psi[3] - s), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(psi[1]) + std::abs(psi[2]), 0.0, 1e-15);
}

TEST(contract_cluster, identity_gates_give_segment) {
    Rng rng(32);
    Mps m = Mps::random(5, 4, rng);
    Cluster k{1, 3, {make_gate(GateKind::Id, {1, 2}), make_gate(GateKind::Id, {3})}};
    std::vector<Tensor> segment(m.sites().begin() + 1, m.sites().begin() + 4);
    Tensor psi = contract_cluster(k, segment, 10);
    EXPECT_LT(relative_distance(psi, m.contract_segment(1, 3)), 1e-14);
}

TEST(contract_cluster, random_cluster_matches_dense_oracle) {
    Circuit c = generate_random_structured(4, 3, GateFamily::NonClifford, 33);
    Cluster k{0, 3, c.execution_order()};
    Mps m = Mps::from_product_state({0, 1, 1, 0});
    Tensor psi = contract_cluster(k, m.sites(), 6);
    Statevector s = simulate_dense(c, std::vector<int>{0, 1, 1, 0});
    EXPECT_LT(testutil::max_abs_diff(psi.data(), s.amplitudes()), 1e-13);
}

TEST(contract_cluster, memory_bound) {
    Mps m = Mps::from_product_state({0, 0, 0});
    Cluster k{0, 2, {make_gate(GateKind::CX, {0, 1})}};
    try {
        contract_cluster(k, m.sites(), 2);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::MemoryBoundExceeded);
    }
}

TEST(cluster_tebd, whole_circuit_one_cluster) {
    Circuit c = generate_random_structured(8, 10, GateFamily::NonClifford, 34);
    ClusterTebdResult r = run_cluster_tebd(c, Mps::from_product_state(std::vector<int>(8, 0)), config(10));
    EXPECT_EQ(r.stats.iterations.size(), 1u);
    EXPECT_GE(exact_fidelity(r.state, simulate_dense(c)), 1.0 - 1e-9);
}

TEST(cluster_tebd, matches_tebd_exact_regime) {
    Circuit c = generate_random_structured(10, 20, GateFamily::NonClifford, 35);
    Mps init = Mps::from_product_state(std::vector<int>(10, 0));
    TebdConfig tcfg;
    tcfg.policy = TruncationPolicy::capped(32);
    TebdResult t = run_tebd(c, init, tcfg);
    ClusterTebdResult k = run_cluster_tebd(c, init, config(6, 32));
    EXPECT_GT(k.stats.iterations.size(), 1u);
    EXPECT_GE(std::norm(overlap(t.state, k.state)), 1.0 - 1e-9);
    EXPECT_GE(exact_fidelity(k.state, simulate_dense(c)), 1.0 - 1e-9);
    EXPECT_LE(k.stats.max_cluster_log2_size, 6.0 + 1e-9);
    EXPECT_EQ(k.stats.bound_violations, 0u);
}

TEST(cluster_tebd, fig1_with_fallback_layers) {
    std::vector<int> bits{1, 0, 1, 0, 1, 0, 1, 0};
    Circuit c = testutil::fig1_circuit();
    ClusterTebdResult r = run_cluster_tebd(c, Mps::from_product_state(bits), config(3));
    EXPECT_GE(exact_fidelity(r.state, simulate_dense(c, bits)), 1.0 - 1e-10);
    EXPECT_LE(r.stats.max_cluster_log2_size, 3.0 + 1e-9);
}

TEST(cluster_tebd, truncation_tracks_exact_fidelity) {
    Circuit c = generate_random_structured(10, 20, GateFamily::NonClifford, 6);
    ClusterTebdResult r = run_cluster_tebd(c, Mps::from_product_state(std::vector<int>(10, 0)), config(6, 2));
    const double exact = exact_fidelity(r.state, simulate_dense(c));
    EXPECT_LT(r.ledger.fidelity(), 1.0);
    EXPECT_NEAR(r.ledger.fidelity(), exact, 0.1);
    EXPECT_LE(r.stats.max_chi, 2u);
}

TEST(cluster_tebd, parallel_matches_serial) {
    Circuit c = generate_random_structured(12, 10, GateFamily::NonClifford, 36);
    Mps init = Mps::from_product_state(std::vector<int>(12, 0));
    ClusterConfig cfg = config(5, 8);
    ClusterTebdResult serial = run_cluster_tebd(c, init, cfg);
    cfg.parallel_clusters = true;
    ClusterTebdResult parallel = run_cluster_tebd(c, init, cfg);
    EXPECT_EQ(serial.ledger.fidelity(), parallel.ledger.fidelity());
    for (std::size_t i = 0; i < 12; ++i) {
        EXPECT_EQ(testutil::max_abs_diff(serial.state.site(i).data(), parallel.state.site(i).data()), 0.0);
    }
}
