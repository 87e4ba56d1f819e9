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

#include "tnsim/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "tnsim/error.hpp"

namespace tnsim {
namespace {

double log2_of(std::size_t x) {
    return std::log2(static_cast<double>(x));
}

std::size_t gate_weight(const Gate &g, EntanglingWeight weight) {
    if (g.kind == GateKind::Id || g.qubits.size() < 2) return 0;
    if (weight == EntanglingWeight::Unit) return 1;
    switch (g.kind) {
        case GateKind::Swap:
        case GateKind::SqrtSwap:
            return 2;
        default:
            return 1;
    }
}

constexpr double kSlack = 1e-9;

struct Partitioner {
    const std::vector<double> &w;  // log2 chi~ per bond
    std::size_t n;
    double q_max;
    std::vector<std::pair<std::size_t, std::size_t>> out;

    double size(std::size_t lo, std::size_t hi) const {
        double s = static_cast<double>(hi - lo + 1);
        if (lo > 0) s += w[lo - 1];
        if (hi + 1 < n) s += w[hi];
        return s;
    }

    void split(std::size_t lo, std::size_t hi) {
        if (size(lo, hi) <= q_max + kSlack) {
            out.emplace_back(lo, hi);
            return;
        }
        if (lo == hi) {
            throw Error(ErrorCode::UnsatisfiableGrouping,
                        "qubit " + std::to_string(lo) + " alone needs 2^" + std::to_string(size(lo, hi)) +
                            " elements, above 2^" + std::to_string(q_max));
        }
        std::size_t best = lo;
        for (std::size_t b = lo; b < hi; ++b) {
            if (w[b] < w[best] - kSlack) {
                best = b;
            } else if (std::abs(w[b] - w[best]) <= kSlack) {
                auto imbalance = [&](std::size_t c) {
                    long left = static_cast<long>(c - lo + 1);
                    long right = static_cast<long>(hi - c);
                    return std::labs(left - right);
                };
                if (imbalance(b) < imbalance(best)) best = b;
            }
        }
        split(lo, best);
        split(best + 1, hi);
    }
};

}  // namespace

std::vector<std::size_t> count_entangling(const Circuit &circuit, std::size_t first_layer, std::size_t last_layer,
                                          EntanglingWeight weight) {
    const std::size_t n = circuit.num_qubits();
    std::vector<std::size_t> e(n > 0 ? n - 1 : 0, 0);
    for (const Gate &g : circuit.gates()) {
        if (g.layer < first_layer || g.layer > last_layer) continue;
        const std::size_t add = gate_weight(g, weight);
        if (add == 0) continue;
        for (std::size_t b = g.min_qubit(); b < g.max_qubit(); ++b) e[b] += add;
    }
    return e;
}

VirtualMps build_virtual_mps(const std::vector<std::size_t> &entangling, const std::vector<std::size_t> &chi,
                             std::size_t chi_cap) {
    if (entangling.size() != chi.size()) {
        throw Error(ErrorCode::LengthMismatch, "entangling counts and bond dimensions differ in length");
    }
    if (chi_cap == 0) throw Error(ErrorCode::InvalidParams, "chi cap must be positive");
    const std::size_t n = entangling.size() + 1;
    VirtualMps v;
    v.entangling = entangling;
    v.chi_tilde.resize(entangling.size());
    // Saturating 2^E * chi with everything capped below 2^62.
    constexpr std::size_t kExpLimit = 62;
    for (std::size_t b = 0; b < entangling.size(); ++b) {
        const std::size_t edge = std::min(b + 1, n - b - 1);
        std::size_t value = std::min(chi_cap, edge >= kExpLimit ? chi_cap : (std::size_t{1} << edge));
        if (entangling[b] < kExpLimit) {
            const std::size_t grow = std::size_t{1} << entangling[b];
            if (chi[b] <= value / grow) value = std::min(value, grow * chi[b]);
        }
        v.chi_tilde[b] = std::max<std::size_t>(value, 1);
    }
    return v;
}

double GroupingScheme::group_log2_size(std::size_t t) const {
    const auto [lo, hi] = groups.at(t);
    double s = static_cast<double>(hi - lo + 1);
    if (t > 0) s += log2_of(cut_chi[t - 1]);
    if (t + 1 < groups.size()) s += log2_of(cut_chi[t]);
    return s;
}

void validate_scheme(const GroupingScheme &scheme, std::size_t num_qubits, std::size_t q_max) {
    if (scheme.groups.empty()) throw Error(ErrorCode::UnsatisfiableGrouping, "empty grouping");
    if (scheme.cut_chi.size() + 1 != scheme.groups.size()) {
        throw Error(ErrorCode::UnsatisfiableGrouping, "cut count does not match group count");
    }
    std::size_t next = 0;
    for (std::size_t t = 0; t < scheme.groups.size(); ++t) {
        const auto [lo, hi] = scheme.groups[t];
        if (lo != next || hi < lo) {
            throw Error(ErrorCode::UnsatisfiableGrouping, "groups are not a contiguous cover at group " + std::to_string(t));
        }
        next = hi + 1;
        if (scheme.group_log2_size(t) > static_cast<double>(q_max) + kSlack) {
            throw Error(ErrorCode::UnsatisfiableGrouping,
                        "group " + std::to_string(t) + " exceeds 2^" + std::to_string(q_max) + " elements");
        }
    }
    if (next != num_qubits) throw Error(ErrorCode::UnsatisfiableGrouping, "groups do not cover every qubit");
}

GroupingScheme make_scheme(std::vector<std::pair<std::size_t, std::size_t>> groups,
                           const std::vector<std::size_t> &chi_tilde) {
    GroupingScheme s;
    s.groups = std::move(groups);
    for (std::size_t t = 0; t + 1 < s.groups.size(); ++t) s.cut_chi.push_back(chi_tilde.at(s.groups[t].second));
    return s;
}

GroupingScheme partition_recursive(const VirtualMps &v, std::size_t q_max) {
    const std::size_t n = v.chi_tilde.size() + 1;
    std::vector<double> w(v.chi_tilde.size());
    for (std::size_t b = 0; b < w.size(); ++b) w[b] = log2_of(v.chi_tilde[b]);
    Partitioner p{w, n, static_cast<double>(q_max), {}};
    p.split(0, n - 1);
    GroupingScheme s = make_scheme(std::move(p.out), v.chi_tilde);
    validate_scheme(s, n, q_max);
    return s;
}

}  // namespace tnsim
