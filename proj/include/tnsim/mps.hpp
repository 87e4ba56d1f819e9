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
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "tnsim/rng.hpp"
#include "tnsim/tensor.hpp"

namespace tnsim {

/// Running product of truncation fidelities, kept in log space.
struct FidelityLedger {
    double log_fidelity = 0.0;
    std::size_t svd_count = 0;
    std::size_t truncation_count = 0;  // SVDs with f_i < 1
    std::vector<double> factors;       // every f_i < 1, in order

    void record(double f);
    void merge(const FidelityLedger &other);
    double fidelity() const;
};

/// Open-boundary matrix product state over qubits.
///
/// Sites are 0-based here (the CLI and file formats use the same indexing).
/// Site i holds a rank-3 tensor with axes (left bond, physical, right bond);
/// the two outer bonds have dimension 1. Bond b (0-based, 0 <= b < N-1)
/// sits between sites b and b+1.
class Mps {
   public:
    static Mps from_product_state(std::span<const int> bits);
    static Mps from_product_state(std::initializer_list<int> bits) {
        return from_product_state(std::span<const int>(bits.begin(), bits.size()));
    }
    /// Build from arbitrary site tensors; no canonical form is assumed.
    static Mps from_sites(std::vector<Tensor> sites);
    /// Random state with the given interior bond cap, useful for tests.
    static Mps random(std::size_t n, std::size_t chi, Rng &rng);

    std::size_t size() const noexcept {
        return sites_.size();
    }
    const Tensor &site(std::size_t i) const {
        return sites_.at(i);
    }
    const std::vector<Tensor> &sites() const noexcept {
        return sites_;
    }
    std::vector<std::size_t> bond_dims() const;
    std::size_t max_bond() const;
    std::optional<std::size_t> ortho_center() const noexcept {
        return center_;
    }

    /// Replace one site; the canonical form is forgotten.
    void set_site(std::size_t i, Tensor t);
    /// Replace sites [first, first + segment.size()) and declare the
    /// orthogonality center. The caller guarantees the isometry conditions.
    void splice(std::size_t first, std::vector<Tensor> segment, std::optional<std::size_t> center);

    /// Move the orthogonality center to `center` with QR sweeps.
    void orthogonalize(std::size_t center);

    /// Contract a single-qubit operator (2x2, out x in) into site q.
    void apply_single(const Tensor &gate, std::size_t q);

    /// Apply an operator on sites start..start+n-1. `gate` has rank 2n with
    /// axes (out_0..out_{n-1}, in_0..in_{n-1}) in ascending site order.
    /// The center ends on start+n-1.
    void apply_adjacent_gate(const Tensor &gate, std::size_t start, const TruncationPolicy &policy,
                             FidelityLedger &ledger);

    /// Exchange the physical indices of sites start and start+1. Same result
    /// as applying a SWAP gate, without the gate contraction. The center ends
    /// on start+1.
    void swap_adjacent(std::size_t start, const TruncationPolicy &policy, FidelityLedger &ledger);

    /// Contract sites [first, last] into (chi_left, 2, ..., 2, chi_right).
    Tensor contract_segment(std::size_t first, std::size_t last) const;

    double norm() const;
    void normalize();

    /// Von Neumann entropy (bits) across bond b.
    double entanglement_entropy(std::size_t bond);
    /// Normalized Schmidt weights across bond b.
    std::vector<double> schmidt_weights(std::size_t bond);

    /// Dense amplitudes; qubit 0 is the most significant bit.
    std::vector<Complex> to_dense() const;

    /// Draw the first `count` qubits by sequential conditional sampling.
    /// Bits come back in site order.
    std::vector<int> sample_prefix(std::size_t count, Rng &rng);

    /// Exact marginal distribution of the first `count` qubits (at most 24),
    /// normalized. Entry k is the prefix whose site-0 bit is the MSB of k.
    std::vector<double> prefix_distribution(std::size_t count);

    void write_snapshot(const std::filesystem::path &path) const;
    static Mps read_snapshot(const std::filesystem::path &path);

   private:
    void move_center_right(std::size_t from);
    void move_center_left(std::size_t from);

    std::vector<Tensor> sites_;
    std::optional<std::size_t> center_;
};

/// <a|b>, conjugating a.
Complex overlap(const Mps &a, const Mps &b);

enum class SweepDirection { LeftToRight, RightToLeft };

/// Split psi with shape (chi_left, 2, ..., 2, chi_right) into a chain of
/// rank-3 tensors by successive truncated SVDs. Swept left to right, all but
/// the last tensor are left isometries and the last carries the weight;
/// swept right to left, the first carries the weight.
std::vector<Tensor> decompose_dense(const Tensor &psi, const TruncationPolicy &policy, FidelityLedger &ledger,
                                    SweepDirection direction = SweepDirection::LeftToRight);

}  // namespace tnsim
