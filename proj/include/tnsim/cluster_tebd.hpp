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
#include <vector>

#include "tnsim/circuit.hpp"
#include "tnsim/contraction.hpp"
#include "tnsim/mps.hpp"

namespace tnsim {

struct ClusterConfig {
    static constexpr std::size_t kUnboundedLayers = static_cast<std::size_t>(-1);

    std::size_t q_max = 14;                  // log2 element bound per cluster tensor
    std::size_t l_max = kUnboundedLayers;    // layers per iteration
    TruncationPolicy policy;                 // used when splitting clusters back
    bool parallel_clusters = false;

    void validate() const;
};

/// Contiguous qubit interval [first, last] and the gates it absorbs.
struct Cluster {
    std::size_t first = 0;
    std::size_t last = 0;
    std::vector<Gate> gates;  // execution order, absolute qubit indices

    std::size_t width() const {
        return last - first + 1;
    }
};

struct ClusterPlan {
    std::size_t start_layer = 1;
    std::size_t horizon_layer = 1;  // last layer contracted this iteration
    std::vector<Cluster> clusters;
    std::vector<Gate> loose_gates;  // single-qubit gates outside every cluster
    /// The first layer alone already breaks the memory bound; it is applied
    /// gate by gate instead.
    bool fallback = false;
};

/// log2 of the element count of a cluster tensor over [first, last] given
/// the current bond dimensions (bond b sits between qubits b and b+1).
double cluster_log2_size(std::size_t first, std::size_t last, const std::vector<std::size_t> &bond_dims);

/// Grow entanglement clusters layer by layer from `start_layer` and stop
/// before the first layer that would break the memory bound or the layer
/// horizon.
ClusterPlan scan_clusters(const Circuit &circuit, std::size_t start_layer, const std::vector<std::size_t> &bond_dims,
                          const ClusterConfig &cfg);

/// Exactly contract the MPS sites of the cluster with its gates. The result
/// has shape (chi_left, 2, ..., 2, chi_right).
Tensor contract_cluster(const Cluster &cluster, const std::vector<Tensor> &segment, std::size_t q_max,
                        ContractionStats *stats = nullptr);

struct ClusterIterationStats {
    std::size_t start_layer = 0;
    std::size_t horizon_layer = 0;
    bool fallback = false;
    std::vector<std::pair<std::size_t, std::size_t>> intervals;
    std::vector<double> log2_sizes;
    double flops = 0.0;
    double wall_time_seconds = 0.0;
};

struct ClusterTebdStats {
    double wall_time_seconds = 0.0;
    std::size_t max_chi = 1;
    std::size_t truncation_count = 0;
    double max_cluster_log2_size = 0.0;
    std::size_t bound_violations = 0;  // clusters whose tensor broke q_max
    std::vector<ClusterIterationStats> iterations;
};

struct ClusterTebdResult {
    Mps state;
    FidelityLedger ledger;
    ClusterTebdStats stats;
};

ClusterTebdResult run_cluster_tebd(const Circuit &circuit, Mps initial, const ClusterConfig &cfg);

}  // namespace tnsim
