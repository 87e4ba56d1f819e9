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
#include "tnsim/grouping.hpp"
#include "tnsim/mps.hpp"
#include "tnsim/rng.hpp"

namespace tnsim {

enum class GroupingMode { Adaptive, Fixed };

const char *grouping_mode_name(GroupingMode mode);
GroupingMode grouping_mode_from_name(const std::string &name);

struct DmrgConfig {
    std::size_t l_max = 4;
    std::size_t chi_max_dmrg = 256;
    std::size_t chi_max_svd = TruncationPolicy::kUnbounded;
    double cutoff_eta = 0.0;  // relative cutoff used when ungrouping
    std::size_t q_max = 20;
    std::size_t n_sweeps = 3;
    double sweep_tol = 1e-10;
    GroupingMode grouping_mode = GroupingMode::Adaptive;
    EntanglingWeight weight = EntanglingWeight::SchmidtRank;
    std::uint64_t seed = 0;

    void validate() const;
};

/// MPS whose site t has shape (chi_left, 2^d_t, chi_right); the middle index
/// enumerates the group's qubits with the lowest qubit most significant.
class GroupedMps {
   public:
    GroupedMps() = default;
    GroupedMps(std::vector<std::pair<std::size_t, std::size_t>> groups, std::vector<Tensor> sites);

    std::size_t size() const noexcept {
        return sites_.size();
    }
    std::size_t num_qubits() const {
        return groups_.empty() ? 0 : groups_.back().second + 1;
    }
    const std::vector<std::pair<std::size_t, std::size_t>> &groups() const noexcept {
        return groups_;
    }
    const Tensor &site(std::size_t t) const {
        return sites_.at(t);
    }
    const std::vector<Tensor> &sites() const noexcept {
        return sites_;
    }
    std::optional<std::size_t> ortho_center() const noexcept {
        return center_;
    }
    std::vector<std::size_t> bond_dims() const;

    /// Index of the group holding qubit q.
    std::size_t group_of(std::size_t q) const;

    void set_site(std::size_t t, Tensor site);
    void set_center(std::optional<std::size_t> c) {
        center_ = c;
    }
    void orthogonalize(std::size_t center);
    double norm() const;
    std::vector<Complex> to_dense() const;

    /// Apply a gate exactly. A gate spanning several groups merges them,
    /// acts, and splits back with exact SVDs, so shared bonds may grow.
    void apply_gate(const Gate &gate);

   private:
    void move_right(std::size_t from);
    void move_left(std::size_t from);

    std::vector<std::pair<std::size_t, std::size_t>> groups_;
    std::vector<Tensor> sites_;
    std::optional<std::size_t> center_;
};

Complex overlap(const GroupedMps &a, const GroupedMps &b);

/// Contract the MPS sites of every group. The scheme is rechecked against
/// q_max first (MemoryBoundExceeded).
GroupedMps group_mps(const Mps &m, const GroupingScheme &scheme, std::size_t q_max);

/// Random grouped MPS with the given groups and inter-group bonds, right
/// canonical and normalized.
GroupedMps random_grouped(const std::vector<std::pair<std::size_t, std::size_t>> &groups,
                          const std::vector<std::size_t> &bonds, Rng &rng);

struct DmrgStepResult {
    GroupedMps state;
    std::vector<std::vector<double>> f_history;  // one entry per sweep, one f per site
    double final_f = 1.0;
    std::size_t sweeps = 0;
};

/// Fit a grouped MPS with the given inter-group bonds to (window gates)|initial>
/// by single-site sweeps. `start` replaces the random initial guess.
DmrgStepResult dmrg_step(const GroupedMps &initial, const std::vector<Gate> &window,
                         const std::vector<std::size_t> &bonds, const DmrgConfig &cfg, Rng &rng,
                         const GroupedMps *start = nullptr);

/// Split every grouped site back into qubit sites with successive SVDs.
Mps ungroup(GroupedMps m, const TruncationPolicy &policy, FidelityLedger &ledger);

struct DmrgStepStats {
    std::size_t first_layer = 0;
    std::size_t last_layer = 0;
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    std::vector<std::size_t> chi_tilde;
    std::vector<double> group_log2_sizes;
    std::vector<std::vector<double>> f_history;
    double final_f = 1.0;
    double wall_time_seconds = 0.0;
};

struct DmrgStats {
    double wall_time_seconds = 0.0;
    std::size_t max_chi = 1;
    std::size_t truncation_count = 0;
    std::size_t monotonicity_violations = 0;
    double max_group_log2_size = 0.0;
    std::vector<DmrgStepStats> steps;
};

struct DmrgResult {
    Mps state;
    double fidelity = 1.0;  // product of final f per step times ungroup factors
    FidelityLedger ledger;  // ungroup truncations only
    DmrgStats stats;
};

DmrgResult run_dmrg(const Circuit &circuit, Mps initial, const DmrgConfig &cfg);

}  // namespace tnsim
