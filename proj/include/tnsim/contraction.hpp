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

#include "tnsim/tensor.hpp"

namespace tnsim {

/// A closed-form tensor network: every label appears on one tensor (open)
/// or on two tensors (contracted).
class TensorNetwork {
   public:
    /// Add a tensor with one label per axis; returns its node index.
    std::size_t add(Tensor t, std::vector<int> labels);
    std::size_t size() const noexcept {
        return nodes_.size();
    }

    struct Node {
        Tensor tensor;
        std::vector<int> labels;
    };
    const std::vector<Node> &nodes() const noexcept {
        return nodes_;
    }
    std::vector<Node> take_nodes() && {
        return std::move(nodes_);
    }

   private:
    std::vector<Node> nodes_;
};

struct ContractionStats {
    double flops = 0.0;                 // complex multiply-adds
    std::size_t max_intermediate = 0;   // elements
    std::size_t steps = 0;
};

/// Contract the whole network pairwise in greedy order and return the
/// result with axes in `output` label order.
///
/// At each step the connected pair whose product is smallest is contracted;
/// ties go to the lower flop count, then to the lower (first, second) node
/// index. Disconnected parts are joined by outer products at the end.
Tensor contract_greedy(TensorNetwork network, const std::vector<int> &output, ContractionStats *stats = nullptr);

}  // namespace tnsim
