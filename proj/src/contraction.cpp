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

#include "tnsim/contraction.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>

#include "tnsim/error.hpp"

namespace tnsim {

std::size_t TensorNetwork::add(Tensor t, std::vector<int> labels) {
    if (labels.size() != t.rank()) {
        throw Error(ErrorCode::BadShape, "one label per tensor axis is required");
    }
    nodes_.push_back({std::move(t), std::move(labels)});
    return nodes_.size() - 1;
}

namespace {

struct Candidate {
    double size;
    double flops;
    std::size_t a;
    std::size_t b;

    // Min-heap order for std::priority_queue.
    bool operator<(const Candidate &o) const {
        if (size != o.size) {
            return size > o.size;
        }
        if (flops != o.flops) {
            return flops > o.flops;
        }
        if (a != o.a) {
            return a > o.a;
        }
        return b > o.b;
    }
};

class GreedyContractor {
   public:
    GreedyContractor(TensorNetwork &&net, ContractionStats *stats) : stats_(stats) {
        for (auto &node : std::move(net).take_nodes()) {
            const std::size_t id = nodes_.size();
            for (std::size_t ax = 0; ax < node.labels.size(); ++ax) {
                const int label = node.labels[ax];
                auto [it, fresh] = dims_.emplace(label, node.tensor.dim(ax));
                if (!fresh && it->second != node.tensor.dim(ax)) {
                    throw Error(ErrorCode::DimensionMismatch, "label " + std::to_string(label) +
                                                                  " has inconsistent dimensions");
                }
                auto &owners = owners_[label];
                if (!owners.empty() && owners.back() == id) {
                    throw Error(ErrorCode::BadShape, "label " + std::to_string(label) + " repeated on one tensor");
                }
                owners.push_back(id);
                if (owners.size() > 2) {
                    throw Error(ErrorCode::BadShape, "label " + std::to_string(label) + " appears more than twice");
                }
            }
            nodes_.push_back(std::move(node));
            alive_.push_back(true);
        }
    }

    Tensor run(const std::vector<int> &output) {
        for (const auto &[label, owners] : owners_) {
            if (owners.size() == 2) {
                push(std::min(owners[0], owners[1]), std::max(owners[0], owners[1]));
            }
        }
        while (!heap_.empty()) {
            Candidate c = heap_.top();
            heap_.pop();
            if (!alive_[c.a] || !alive_[c.b]) {
                continue;
            }
            const std::size_t merged = merge(c.a, c.b);
            std::vector<std::size_t> neighbours;
            for (int label : nodes_[merged].labels) {
                for (std::size_t o : owners_[label]) {
                    if (o != merged && alive_[o]) {
                        neighbours.push_back(o);
                    }
                }
            }
            std::sort(neighbours.begin(), neighbours.end());
            neighbours.erase(std::unique(neighbours.begin(), neighbours.end()), neighbours.end());
            for (std::size_t o : neighbours) {
                push(std::min(o, merged), std::max(o, merged));
            }
        }
        // Join disconnected components by outer products, lowest index first.
        std::vector<std::size_t> remaining;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (alive_[i]) {
                remaining.push_back(i);
            }
        }
        if (remaining.empty()) {
            throw Error(ErrorCode::EmptyInput, "cannot contract an empty network");
        }
        std::size_t acc = remaining.front();
        for (std::size_t i = 1; i < remaining.size(); ++i) {
            acc = merge(acc, remaining[i]);
        }
        const auto &labels = nodes_[acc].labels;
        if (labels.size() != output.size()) {
            throw Error(ErrorCode::BadShape, "output labels do not match the open labels of the network");
        }
        std::vector<std::size_t> perm;
        for (int label : output) {
            auto it = std::find(labels.begin(), labels.end(), label);
            if (it == labels.end()) {
                throw Error(ErrorCode::BadShape, "output label " + std::to_string(label) + " is not open");
            }
            perm.push_back(static_cast<std::size_t>(it - labels.begin()));
        }
        return nodes_[acc].tensor.permuted(perm);
    }

   private:
    void push(std::size_t a, std::size_t b) {
        const auto &la = nodes_[a].labels;
        const auto &lb = nodes_[b].labels;
        double shared = 1.0;
        for (int l : la) {
            if (std::find(lb.begin(), lb.end(), l) != lb.end()) {
                shared *= static_cast<double>(dims_[l]);
            }
        }
        const double sa = static_cast<double>(nodes_[a].tensor.size());
        const double sb = static_cast<double>(nodes_[b].tensor.size());
        const double result = sa * sb / (shared * shared);
        heap_.push({result, result * shared, a, b});
    }

    // When the labels shared with a smaller operand sit in one contiguous
    // run of the larger tensor, contract in place without permuting it.
    std::optional<Tensor> merge_in_place(std::size_t big, std::size_t small, std::vector<int> &out_labels) {
        const auto &lb = nodes_[big].labels;
        const auto &ls = nodes_[small].labels;
        std::size_t first = lb.size();
        std::size_t count = 0;
        for (std::size_t i = 0; i < lb.size(); ++i) {
            if (std::find(ls.begin(), ls.end(), lb[i]) == ls.end()) {
                continue;
            }
            if (count == 0) {
                first = i;
            } else if (i != first + count) {
                return std::nullopt;
            }
            ++count;
        }
        if (count == 0) {
            return std::nullopt;
        }
        std::vector<std::size_t> perm;
        std::vector<int> free_labels;
        for (std::size_t i = 0; i < ls.size(); ++i) {
            if (std::find(lb.begin() + static_cast<std::ptrdiff_t>(first),
                          lb.begin() + static_cast<std::ptrdiff_t>(first + count), ls[i]) ==
                lb.begin() + static_cast<std::ptrdiff_t>(first + count)) {
                perm.push_back(i);
                free_labels.push_back(ls[i]);
            }
        }
        for (std::size_t j = first; j < first + count; ++j) {
            perm.push_back(static_cast<std::size_t>(std::find(ls.begin(), ls.end(), lb[j]) - ls.begin()));
        }
        out_labels.assign(lb.begin(), lb.begin() + static_cast<std::ptrdiff_t>(first));
        out_labels.insert(out_labels.end(), free_labels.begin(), free_labels.end());
        out_labels.insert(out_labels.end(), lb.begin() + static_cast<std::ptrdiff_t>(first + count), lb.end());
        return apply_block(nodes_[small].tensor.permuted(perm), nodes_[big].tensor, first, count);
    }

    std::size_t merge(std::size_t a, std::size_t b) {
        const auto &la = nodes_[a].labels;
        const auto &lb = nodes_[b].labels;
        AxisPairs pairs;
        std::vector<int> out_labels;
        double shared = 1.0;
        for (std::size_t i = 0; i < la.size(); ++i) {
            auto it = std::find(lb.begin(), lb.end(), la[i]);
            if (it != lb.end()) {
                pairs.emplace_back(i, static_cast<std::size_t>(it - lb.begin()));
                shared *= static_cast<double>(dims_[la[i]]);
            } else {
                out_labels.push_back(la[i]);
            }
        }
        for (int l : lb) {
            if (std::find(la.begin(), la.end(), l) == la.end()) {
                out_labels.push_back(l);
            }
        }
        const bool a_big = nodes_[a].tensor.size() >= nodes_[b].tensor.size();
        std::optional<Tensor> fast = merge_in_place(a_big ? a : b, a_big ? b : a, out_labels);
        Tensor t = fast ? std::move(*fast) : contract(nodes_[a].tensor, nodes_[b].tensor, pairs);
        if (stats_) {
            stats_->flops += static_cast<double>(t.size()) * shared;
            stats_->max_intermediate = std::max(stats_->max_intermediate, t.size());
            ++stats_->steps;
        }
        alive_[a] = false;
        alive_[b] = false;
        nodes_[a].tensor = Tensor();
        nodes_[b].tensor = Tensor();
        const std::size_t id = nodes_.size();
        for (int l : out_labels) {
            auto &owners = owners_[l];
            for (auto &o : owners) {
                if (o == a || o == b) {
                    o = id;
                }
            }
        }
        nodes_.push_back({std::move(t), std::move(out_labels)});
        alive_.push_back(true);
        return id;
    }

    ContractionStats *stats_;
    std::vector<TensorNetwork::Node> nodes_;
    std::vector<bool> alive_;
    std::unordered_map<int, std::size_t> dims_;
    std::unordered_map<int, std::vector<std::size_t>> owners_;
    std::priority_queue<Candidate> heap_;
};

}  // namespace

Tensor contract_greedy(TensorNetwork network, const std::vector<int> &output, ContractionStats *stats) {
    GreedyContractor g(std::move(network), stats);
    return g.run(output);
}

}  // namespace tnsim
