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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <optional>
#include <string>
#include <thread>

#include "tnsim/error.hpp"
#include "tnsim/tebd.hpp"

namespace tnsim {

namespace {

constexpr double kLog2Slack = 1e-9;

using Layers = std::vector<std::vector<Gate>>;

Layers split_layers(const Circuit &circuit) {
    Layers layers(circuit.num_layers());
    for (Gate &g : circuit.execution_order()) {
        layers[g.layer - 1].push_back(std::move(g));
    }
    return layers;
}

// Maximal runs of set bonds, as qubit intervals.
std::vector<std::pair<std::size_t, std::size_t>> bond_runs(const std::vector<bool> &bonds) {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t b = 0;
    while (b < bonds.size()) {
        if (!bonds[b]) {
            ++b;
            continue;
        }
        std::size_t e = b;
        while (e + 1 < bonds.size() && bonds[e + 1]) {
            ++e;
        }
        runs.emplace_back(b, e + 1);
        b = e + 1;
    }
    return runs;
}

ClusterPlan scan_layers(const Layers &layers, std::size_t num_qubits, std::size_t start_layer,
                        const std::vector<std::size_t> &bond_dims, const ClusterConfig &cfg) {
    if (start_layer < 1 || start_layer > layers.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "start layer " + std::to_string(start_layer) + " outside the circuit");
    }
    if (bond_dims.size() + 1 != num_qubits) {
        throw Error(ErrorCode::LengthMismatch, "bond dimension list does not match the circuit width");
    }
    std::vector<bool> bonds(num_qubits - 1, false);
    std::vector<bool> accepted;
    std::size_t horizon = 0;
    for (std::size_t l = start_layer; l <= layers.size(); ++l) {
        if (l - start_layer + 1 > cfg.l_max) {
            break;
        }
        for (const Gate &g : layers[l - 1]) {
            if (g.arity() < 2) {
                continue;
            }
            for (std::size_t b = g.min_qubit(); b < g.max_qubit(); ++b) {
                bonds[b] = true;
            }
        }
        bool fits = true;
        for (auto [first, last] : bond_runs(bonds)) {
            if (cluster_log2_size(first, last, bond_dims) > static_cast<double>(cfg.q_max) + kLog2Slack) {
                fits = false;
                break;
            }
        }
        if (!fits) {
            break;
        }
        horizon = l;
        accepted = bonds;
    }

    ClusterPlan plan;
    plan.start_layer = start_layer;
    if (horizon == 0) {
        plan.horizon_layer = start_layer;
        plan.fallback = true;
        return plan;
    }
    plan.horizon_layer = horizon;
    std::vector<std::size_t> owner(num_qubits, static_cast<std::size_t>(-1));
    for (auto [first, last] : bond_runs(accepted)) {
        for (std::size_t q = first; q <= last; ++q) {
            owner[q] = plan.clusters.size();
        }
        plan.clusters.push_back({first, last, {}});
    }
    for (std::size_t l = start_layer; l <= horizon; ++l) {
        for (const Gate &g : layers[l - 1]) {
            const std::size_t k = owner[g.min_qubit()];
            if (k == static_cast<std::size_t>(-1)) {
                plan.loose_gates.push_back(g);
            } else {
                plan.clusters[k].gates.push_back(g);
            }
        }
    }
    return plan;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void ClusterConfig::validate() const {
    if (q_max < 2) {
        throw Error(ErrorCode::InvalidParams, "q_max must be at least 2");
    }
    if (l_max < 1) {
        throw Error(ErrorCode::InvalidParams, "l_max must be at least 1");
    }
    policy.validate();
}

double cluster_log2_size(std::size_t first, std::size_t last, const std::vector<std::size_t> &bond_dims) {
    const double left = first == 0 ? 1.0 : static_cast<double>(bond_dims.at(first - 1));
    const double right = last >= bond_dims.size() ? 1.0 : static_cast<double>(bond_dims.at(last));
    return static_cast<double>(last - first + 1) + std::log2(left) + std::log2(right);
}

ClusterPlan scan_clusters(const Circuit &circuit, std::size_t start_layer, const std::vector<std::size_t> &bond_dims,
                          const ClusterConfig &cfg) {
    cfg.validate();
    return scan_layers(split_layers(circuit), circuit.num_qubits(), start_layer, bond_dims, cfg);
}

Tensor contract_cluster(const Cluster &cluster, const std::vector<Tensor> &segment, std::size_t q_max,
                        ContractionStats *stats) {
    const std::size_t m = cluster.width();
    if (segment.size() != m) {
        throw Error(ErrorCode::LengthMismatch, "segment length differs from the cluster width");
    }
    const double log2_size = std::log2(static_cast<double>(segment.front().dim(0))) + static_cast<double>(m) +
                             std::log2(static_cast<double>(segment.back().dim(2)));
    if (log2_size > static_cast<double>(q_max) + kLog2Slack) {
        throw Error(ErrorCode::MemoryBoundExceeded, "cluster tensor needs 2^" + std::to_string(log2_size) +
                                                        " elements, bound is 2^" + std::to_string(q_max));
    }
    TensorNetwork net;
    int next_label = 0;
    std::vector<int> bond(m + 1);
    std::vector<int> wire(m);
    for (auto &b : bond) {
        b = next_label++;
    }
    for (auto &w : wire) {
        w = next_label++;
    }
    for (std::size_t i = 0; i < m; ++i) {
        net.add(segment[i], {bond[i], wire[i], bond[i + 1]});
    }
    for (const Gate &g : cluster.gates) {
        if (g.kind == GateKind::Id) {
            continue;
        }
        if (g.min_qubit() < cluster.first || g.max_qubit() > cluster.last) {
            throw Error(ErrorCode::IndexOutOfRange, "gate reaches outside its cluster");
        }
        if (g.kind == GateKind::Swap) {
            // A SWAP only exchanges which open leg belongs to which qubit.
            std::swap(wire[g.qubits[0] - cluster.first], wire[g.qubits[1] - cluster.first]);
            continue;
        }
        std::vector<std::size_t> sites = g.qubits;
        std::sort(sites.begin(), sites.end());
        std::vector<int> labels;
        for (std::size_t k = 0; k < sites.size(); ++k) {
            labels.push_back(next_label++);
        }
        for (std::size_t k = 0; k < sites.size(); ++k) {
            const std::size_t rel = sites[k] - cluster.first;
            labels.push_back(wire[rel]);
            wire[rel] = labels[k];
        }
        net.add(g.site_ordered_tensor(), std::move(labels));
    }
    std::vector<int> output{bond.front()};
    output.insert(output.end(), wire.begin(), wire.end());
    output.push_back(bond.back());
    return contract_greedy(std::move(net), output, stats);
}

ClusterTebdResult run_cluster_tebd(const Circuit &circuit, Mps initial, const ClusterConfig &cfg) {
    cfg.validate();
    if (initial.size() != circuit.num_qubits()) {
        throw Error(ErrorCode::LengthMismatch, "initial state width differs from the circuit");
    }
    const auto t_run = std::chrono::steady_clock::now();
    ClusterTebdResult res{std::move(initial), {}, {}};
    Mps &state = res.state;
    const Layers layers = split_layers(circuit);

    std::size_t start = 1;
    while (start <= layers.size()) {
        const auto t_iter = std::chrono::steady_clock::now();
        ClusterPlan plan = scan_layers(layers, circuit.num_qubits(), start, state.bond_dims(), cfg);
        ClusterIterationStats it;
        it.start_layer = start;
        it.horizon_layer = plan.horizon_layer;
        it.fallback = plan.fallback;

        if (plan.fallback) {
            for (const Gate &g : layers[start - 1]) {
                apply_gate(state, g, cfg.policy, res.ledger);
            }
        } else {
            for (const Gate &g : plan.loose_gates) {
                if (g.kind != GateKind::Id) {
                    state.apply_single(g.site_ordered_tensor(), g.qubits.front());
                }
            }
            const std::size_t k_count = plan.clusters.size();
            if (k_count > 0) {
                // Sweep toward the far end of the span from wherever the
                // center already sits, so it never has to travel back.
                const std::size_t span_first = plan.clusters.front().first;
                const std::size_t span_last = plan.clusters.back().last;
                const std::optional<std::size_t> center = state.ortho_center();
                const bool leftward = center && *center > span_first && *center - span_first > span_last - std::min(*center, span_last);
                state.orthogonalize(leftward ? span_last : span_first);
                const std::vector<std::size_t> bonds = state.bond_dims();
                std::vector<Tensor> psis(k_count);
                std::vector<ContractionStats> cstats(k_count);
                auto work = [&](std::size_t k) {
                    const Cluster &c = plan.clusters[k];
                    std::vector<Tensor> segment(state.sites().begin() + static_cast<std::ptrdiff_t>(c.first),
                                                state.sites().begin() + static_cast<std::ptrdiff_t>(c.last + 1));
                    psis[k] = contract_cluster(c, segment, cfg.q_max, &cstats[k]);
                };
                if (cfg.parallel_clusters && k_count > 1) {
                    std::vector<std::exception_ptr> errors(k_count);
                    std::vector<std::thread> threads;
                    for (std::size_t k = 0; k < k_count; ++k) {
                        threads.emplace_back([&, k] {
                            try {
                                work(k);
                            } catch (...) {
                                errors[k] = std::current_exception();
                            }
                        });
                    }
                    for (auto &t : threads) {
                        t.join();
                    }
                    for (auto &e : errors) {
                        if (e) {
                            std::rethrow_exception(e);
                        }
                    }
                } else {
                    for (std::size_t k = 0; k < k_count; ++k) {
                        work(k);
                    }
                }
                for (std::size_t step = 0; step < k_count; ++step) {
                    const std::size_t k = leftward ? k_count - 1 - step : step;
                    const Cluster &c = plan.clusters[k];
                    const double log2_size = cluster_log2_size(c.first, c.last, bonds);
                    it.intervals.emplace_back(c.first, c.last);
                    it.log2_sizes.push_back(log2_size);
                    it.flops += cstats[k].flops;
                    res.stats.max_cluster_log2_size = std::max(res.stats.max_cluster_log2_size, log2_size);
                    if (log2_size > static_cast<double>(cfg.q_max) + kLog2Slack) {
                        ++res.stats.bound_violations;
                    }
                    Tensor psi = std::move(psis[k]);
                    if (step > 0 && !leftward) {
                        // Move the center next to the cluster and fold the
                        // remaining R factor into the cluster tensor.
                        state.orthogonalize(c.first - 1);
                        QrResult f = qr(state.site(c.first - 1), {0, 1});
                        state.splice(c.first - 1, {std::move(f.q)}, std::nullopt);
                        psi = contract(f.r, psi, {{1, 0}});
                    } else if (step > 0) {
                        state.orthogonalize(c.last + 1);
                        QrResult f = qr(state.site(c.last + 1), {1, 2});
                        state.splice(c.last + 1, {f.q.permuted({2, 0, 1})}, std::nullopt);
                        psi = contract(psi, f.r, {{psi.rank() - 1, 1}});
                    }
                    if (leftward) {
                        state.splice(c.first,
                                     decompose_dense(psi, cfg.policy, res.ledger, SweepDirection::RightToLeft),
                                     c.first);
                    } else {
                        state.splice(c.first, decompose_dense(psi, cfg.policy, res.ledger), c.last);
                    }
                }
            }
        }
        res.stats.max_chi = std::max(res.stats.max_chi, state.max_bond());
        it.wall_time_seconds = seconds_since(t_iter);
        res.stats.iterations.push_back(std::move(it));
        start = plan.horizon_layer + 1;
    }
    res.stats.truncation_count = res.ledger.truncation_count;
    res.stats.wall_time_seconds = seconds_since(t_run);
    return res;
}

}  // namespace tnsim
