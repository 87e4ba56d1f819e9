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

#include "tnsim/dmrg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tnsim/error.hpp"

namespace tnsim {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t pow2_saturating(std::size_t e) {
    return e >= 62 ? (std::size_t{1} << 62) : (std::size_t{1} << e);
}

// Monotonicity slack for f within a sweep.
constexpr double kMonotoneSlack = 1e-12;

void check_virtual_bounds(const VirtualMps &v, std::size_t chi_cap) {
    const std::size_t n = v.chi_tilde.size() + 1;
    for (std::size_t b = 0; b < v.chi_tilde.size(); ++b) {
        if (v.chi_tilde[b] > chi_cap || v.chi_tilde[b] > pow2_saturating(std::min(b + 1, n - b - 1))) {
            throw std::logic_error("virtual bond estimate above its cap at bond " + std::to_string(b));
        }
    }
}

}  // namespace

const char *grouping_mode_name(GroupingMode mode) {
    return mode == GroupingMode::Adaptive ? "adaptive" : "fixed";
}

GroupingMode grouping_mode_from_name(const std::string &name) {
    if (name == "adaptive") return GroupingMode::Adaptive;
    if (name == "fixed") return GroupingMode::Fixed;
    throw Error(ErrorCode::InvalidParams, "unknown grouping mode '" + name + "'");
}

void DmrgConfig::validate() const {
    if (l_max < 1) throw Error(ErrorCode::InvalidParams, "l_max must be at least 1");
    if (n_sweeps < 1) throw Error(ErrorCode::InvalidParams, "n_sweeps must be at least 1");
    if (chi_max_dmrg < 1) throw Error(ErrorCode::InvalidParams, "chi_max_dmrg must be at least 1");
    if (chi_max_svd < chi_max_dmrg) throw Error(ErrorCode::InvalidParams, "chi_max_svd must be >= chi_max_dmrg");
    if (q_max < 1 || q_max > 40) throw Error(ErrorCode::InvalidParams, "q_max must lie in 1..40");
    if (!(sweep_tol >= 0.0) || !(cutoff_eta >= 0.0) || cutoff_eta >= 1.0) {
        throw Error(ErrorCode::InvalidParams, "sweep_tol and cutoff must be non-negative, cutoff below 1");
    }
}

// GroupedMps

GroupedMps::GroupedMps(std::vector<std::pair<std::size_t, std::size_t>> groups, std::vector<Tensor> sites)
    : groups_(std::move(groups)), sites_(std::move(sites)) {
    if (sites_.empty() || sites_.size() != groups_.size()) {
        throw Error(ErrorCode::LengthMismatch, "grouped MPS needs one site per group");
    }
    std::size_t next = 0;
    for (std::size_t t = 0; t < sites_.size(); ++t) {
        const auto [lo, hi] = groups_[t];
        if (lo != next || hi < lo || hi - lo >= 40) {
            throw Error(ErrorCode::BadShape, "groups must cover the qubit line contiguously");
        }
        next = hi + 1;
        const Tensor &s = sites_[t];
        if (s.rank() != 3 || s.dim(1) != (std::size_t{1} << (hi - lo + 1))) {
            throw Error(ErrorCode::BadShape, "grouped site " + std::to_string(t) + " has the wrong shape");
        }
        if (t > 0 && sites_[t - 1].dim(2) != s.dim(0)) {
            throw Error(ErrorCode::DimensionMismatch, "bond mismatch before grouped site " + std::to_string(t));
        }
    }
    if (sites_.front().dim(0) != 1 || sites_.back().dim(2) != 1) {
        throw Error(ErrorCode::BadShape, "boundary bonds must have dimension 1");
    }
}

std::vector<std::size_t> GroupedMps::bond_dims() const {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t + 1 < sites_.size(); ++t) out.push_back(sites_[t].dim(2));
    return out;
}

std::size_t GroupedMps::group_of(std::size_t q) const {
    for (std::size_t t = 0; t < groups_.size(); ++t) {
        if (q >= groups_[t].first && q <= groups_[t].second) return t;
    }
    throw Error(ErrorCode::IndexOutOfRange, "qubit " + std::to_string(q) + " is outside the grouped MPS");
}

void GroupedMps::set_site(std::size_t t, Tensor site) {
    sites_.at(t) = std::move(site);
    center_.reset();
}

void GroupedMps::move_right(std::size_t from) {
    QrResult f = qr(sites_[from], {0, 1});
    sites_[from] = std::move(f.q);
    sites_[from + 1] = contract(f.r, sites_[from + 1], {{1, 0}});
}

void GroupedMps::move_left(std::size_t from) {
    QrResult f = qr(sites_[from], {1, 2});
    sites_[from] = f.q.permuted({2, 0, 1});
    sites_[from - 1] = contract(sites_[from - 1], f.r, {{2, 1}});
}

void GroupedMps::orthogonalize(std::size_t center) {
    if (center >= sites_.size()) throw Error(ErrorCode::IndexOutOfRange, "center outside the grouped MPS");
    if (center_) {
        for (std::size_t t = *center_; t < center; ++t) move_right(t);
        for (std::size_t t = *center_; t > center; --t) move_left(t);
    } else {
        for (std::size_t t = 0; t < center; ++t) move_right(t);
        for (std::size_t t = sites_.size() - 1; t > center; --t) move_left(t);
    }
    center_ = center;
}

double GroupedMps::norm() const {
    return std::sqrt(std::max(0.0, overlap(*this, *this).real()));
}

std::vector<Complex> GroupedMps::to_dense() const {
    Tensor acc = sites_[0];
    for (std::size_t t = 1; t < sites_.size(); ++t) acc = contract(acc, sites_[t], {{acc.rank() - 1, 0}});
    auto d = acc.data();
    return {d.begin(), d.end()};
}

void GroupedMps::apply_gate(const Gate &gate) {
    if (gate.kind == GateKind::Id) return;
    const std::size_t t0 = group_of(gate.min_qubit());
    const std::size_t t1 = group_of(gate.max_qubit());
    if (t0 != t1) orthogonalize(t0);

    Tensor block = sites_[t0];
    for (std::size_t t = t0 + 1; t <= t1; ++t) block = contract(block, sites_[t], {{block.rank() - 1, 0}});
    const std::size_t base = groups_[t0].first;
    const std::size_t width = groups_[t1].second - base + 1;
    const std::size_t chi_l = block.dim(0);
    const std::size_t chi_r = block.dim(block.rank() - 1);

    Shape fine{chi_l};
    fine.insert(fine.end(), width, 2);
    fine.push_back(chi_r);
    block = std::move(block).reshaped(fine);

    const std::size_t n = gate.qubits.size();
    const Tensor g = gate_tensor(gate.kind, gate.params, n);
    AxisPairs pairs;
    std::vector<std::size_t> slot(width + 2, static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ax = 1 + gate.qubits[i] - base;
        pairs.emplace_back(n + i, ax);
        slot[ax] = i;
    }
    Tensor out = contract(g, block, pairs);
    // out axes: gate outputs, then the untouched block axes in order.
    std::vector<std::size_t> perm(width + 2);
    std::size_t rest = n;
    for (std::size_t ax = 0; ax < width + 2; ++ax) perm[ax] = slot[ax] != static_cast<std::size_t>(-1) ? slot[ax] : rest++;
    block = out.permuted(perm);

    if (t0 == t1) {
        sites_[t0] = std::move(block).reshaped({chi_l, sites_[t0].dim(1), chi_r});
        return;
    }
    Shape coarse{chi_l};
    for (std::size_t t = t0; t <= t1; ++t) coarse.push_back(sites_[t].dim(1));
    coarse.push_back(chi_r);
    Tensor remaining = std::move(block).reshaped(coarse);
    for (std::size_t t = t0; t < t1; ++t) {
        SvdResult f = svd_truncated(remaining, {0, 1}, TruncationPolicy::exact());
        scale_axis(f.v, 0, f.s);
        sites_[t] = std::move(f.u);
        remaining = std::move(f.v);
    }
    sites_[t1] = std::move(remaining);
    center_ = t1;
}

Complex overlap(const GroupedMps &a, const GroupedMps &b) {
    if (a.groups() != b.groups()) throw Error(ErrorCode::DimensionMismatch, "grouped MPS with different groups");
    Tensor env = Tensor::identity(1);
    for (std::size_t t = 0; t < a.size(); ++t) {
        Tensor tmp = contract(env, a.site(t).conj(), {{0, 0}});
        env = contract(tmp, b.site(t), {{0, 0}, {1, 1}});
    }
    return env[0];
}

GroupedMps group_mps(const Mps &m, const GroupingScheme &scheme, std::size_t q_max) {
    try {
        validate_scheme(scheme, m.size(), q_max);
    } catch (const Error &e) {
        throw Error(ErrorCode::MemoryBoundExceeded, e.what());
    }
    std::vector<Tensor> sites;
    for (const auto &[lo, hi] : scheme.groups) {
        Tensor seg = m.contract_segment(lo, hi);
        const std::size_t chi_l = seg.dim(0);
        const std::size_t chi_r = seg.dim(seg.rank() - 1);
        sites.push_back(std::move(seg).reshaped({chi_l, std::size_t{1} << (hi - lo + 1), chi_r}));
    }
    GroupedMps g(scheme.groups, std::move(sites));
    if (auto c = m.ortho_center()) g.set_center(g.group_of(*c));
    return g;
}

GroupedMps random_grouped(const std::vector<std::pair<std::size_t, std::size_t>> &groups,
                          const std::vector<std::size_t> &bonds, Rng &rng) {
    if (bonds.size() + 1 != groups.size()) throw Error(ErrorCode::LengthMismatch, "need one bond per group boundary");
    const std::size_t n = groups.empty() ? 0 : groups.back().second + 1;
    std::vector<std::size_t> dims(groups.size() + 1, 1);
    for (std::size_t t = 0; t < bonds.size(); ++t) {
        const std::size_t left = groups[t].second + 1;
        dims[t + 1] = std::max<std::size_t>(1, std::min({bonds[t], pow2_saturating(left), pow2_saturating(n - left)}));
    }
    std::vector<Tensor> sites;
    for (std::size_t t = 0; t < groups.size(); ++t) {
        Tensor s({dims[t], std::size_t{1} << (groups[t].second - groups[t].first + 1), dims[t + 1]});
        for (Complex &z : s.data()) z = rng.complex_normal();
        sites.push_back(std::move(s));
    }
    GroupedMps g(groups, std::move(sites));
    g.orthogonalize(0);
    Tensor s0 = g.site(0);
    s0 *= Complex{1.0 / s0.norm(), 0.0};
    g.set_site(0, std::move(s0));
    g.set_center(0);
    return g;
}

DmrgStepResult dmrg_step(const GroupedMps &initial, const std::vector<Gate> &window,
                         const std::vector<std::size_t> &bonds, const DmrgConfig &cfg, Rng &rng,
                         const GroupedMps *start) {
    GroupedMps phi = initial;
    for (const Gate &g : window) phi.apply_gate(g);
    const double phi_norm2 = overlap(phi, phi).real();
    if (!(phi_norm2 > 0.0)) throw Error(ErrorCode::EmptySpectrum, "target state has zero norm");

    GroupedMps m = start ? *start : random_grouped(initial.groups(), bonds, rng);
    if (m.groups() != initial.groups()) throw Error(ErrorCode::DimensionMismatch, "start state has different groups");
    m.orthogonalize(0);
    {
        Tensor s0 = m.site(0);
        s0 *= Complex{1.0 / s0.norm(), 0.0};
        m.set_site(0, std::move(s0));
        m.set_center(0);
    }

    const std::size_t g = m.size();
    std::vector<Tensor> sites(m.sites());
    std::vector<Tensor> left(g), right(g);
    auto right_update = [&](std::size_t t) {
        Tensor tmp = contract(phi.site(t), right[t], {{2, 1}});
        right[t - 1] = contract(sites[t].conj(), tmp, {{1, 1}, {2, 2}});
    };
    auto rebuild_right = [&] {
        right[g - 1] = Tensor::identity(1);
        for (std::size_t t = g - 1; t > 0; --t) right_update(t);
    };
    rebuild_right();
    left[0] = Tensor::identity(1);

    DmrgStepResult res;
    double prev_min = -1.0;
    for (std::size_t sweep = 0; sweep < cfg.n_sweeps; ++sweep) {
        std::vector<double> fs;
        for (std::size_t t = 0; t < g; ++t) {
            Tensor f_site = contract(contract(left[t], phi.site(t), {{1, 0}}), right[t], {{2, 1}});
            const double nrm2 = f_site.norm_squared();
            if (!(nrm2 > 0.0)) throw Error(ErrorCode::EmptySpectrum, "environment has zero overlap with the target");
            fs.push_back(std::min(1.0, nrm2 / phi_norm2));  // Cauchy-Schwarz; clamp rounding
            f_site *= Complex{1.0 / std::sqrt(nrm2), 0.0};
            if (t + 1 < g) {
                QrResult f = qr(f_site, {0, 1});
                sites[t] = std::move(f.q);
                sites[t + 1] = contract(f.r, sites[t + 1], {{1, 0}});
                Tensor tmp = contract(left[t], phi.site(t), {{1, 0}});
                left[t + 1] = contract(sites[t].conj(), tmp, {{0, 0}, {1, 1}});
            } else {
                sites[t] = std::move(f_site);
            }
        }
        const double cur_min = *std::min_element(fs.begin(), fs.end());
        res.final_f = fs.back();
        res.f_history.push_back(std::move(fs));
        res.sweeps = sweep + 1;
        if (g == 1 || (prev_min >= 0.0 && cur_min - prev_min < cfg.sweep_tol)) break;
        prev_min = cur_min;
        if (sweep + 1 < cfg.n_sweeps) {
            for (std::size_t t = g - 1; t > 0; --t) {
                QrResult f = qr(sites[t], {1, 2});
                sites[t] = f.q.permuted({2, 0, 1});
                sites[t - 1] = contract(sites[t - 1], f.r, {{2, 1}});
                right_update(t);
            }
        }
    }
    res.state = GroupedMps(initial.groups(), std::move(sites));
    res.state.set_center(g - 1);
    return res;
}

Mps ungroup(GroupedMps m, const TruncationPolicy &policy, FidelityLedger &ledger) {
    m.orthogonalize(0);
    std::vector<Tensor> sites(m.sites());
    std::vector<Tensor> out;
    for (std::size_t t = 0; t < sites.size(); ++t) {
        const auto [lo, hi] = m.groups()[t];
        const std::size_t d = hi - lo + 1;
        Shape fine{sites[t].dim(0)};
        fine.insert(fine.end(), d, 2);
        fine.push_back(sites[t].dim(2));
        std::vector<Tensor> pieces;
        if (d == 1) {
            pieces.push_back(sites[t]);
        } else {
            pieces = decompose_dense(sites[t].reshaped(fine), policy, ledger);
        }
        if (t + 1 < sites.size()) {
            QrResult f = qr(pieces.back(), {0, 1});
            pieces.back() = std::move(f.q);
            sites[t + 1] = contract(f.r, sites[t + 1], {{1, 0}});
        }
        for (Tensor &p : pieces) out.push_back(std::move(p));
    }
    Mps result = Mps::from_sites(std::move(out));
    result.splice(0, {}, result.size() - 1);
    return result;
}

DmrgResult run_dmrg(const Circuit &circuit, Mps initial, const DmrgConfig &cfg) {
    cfg.validate();
    if (initial.size() != circuit.num_qubits()) {
        throw Error(ErrorCode::LengthMismatch, "initial state and circuit differ in qubit count");
    }
    const auto t_start = Clock::now();
    Rng rng(cfg.seed, Rng::kDmrgInit);
    const TruncationPolicy svd_policy{cfg.chi_max_svd, cfg.cutoff_eta, true};
    svd_policy.validate();

    DmrgResult res{std::move(initial), 1.0, {}, {}};
    res.stats.max_chi = res.state.max_bond();
    double step_product = 1.0;
    const std::size_t layers = circuit.num_layers();

    auto record_step = [&](std::size_t lo, std::size_t hi, const GroupingScheme &scheme,
                           const std::vector<std::size_t> &chi_tilde, DmrgStepResult &step, Clock::time_point t0) {
        DmrgStepStats s;
        s.first_layer = lo;
        s.last_layer = hi;
        s.groups = scheme.groups;
        s.chi_tilde = chi_tilde;
        for (std::size_t t = 0; t < scheme.num_groups(); ++t) {
            s.group_log2_sizes.push_back(scheme.group_log2_size(t));
            res.stats.max_group_log2_size = std::max(res.stats.max_group_log2_size, s.group_log2_sizes.back());
        }
        for (const auto &fs : step.f_history) {
            for (std::size_t i = 1; i < fs.size(); ++i) {
                if (fs[i] < fs[i - 1] - kMonotoneSlack) ++res.stats.monotonicity_violations;
            }
        }
        for (std::size_t b : step.state.bond_dims()) res.stats.max_chi = std::max(res.stats.max_chi, b);
        s.f_history = std::move(step.f_history);
        s.final_f = step.final_f;
        step_product *= step.final_f;
        s.wall_time_seconds = seconds_since(t0);
        res.stats.steps.push_back(std::move(s));
    };

    if (cfg.grouping_mode == GroupingMode::Fixed) {
        const auto e = count_entangling(circuit, 1, std::max<std::size_t>(layers, 1), cfg.weight);
        const VirtualMps v = build_virtual_mps(e, res.state.bond_dims(), cfg.chi_max_dmrg);
        check_virtual_bounds(v, cfg.chi_max_dmrg);
        const GroupingScheme scheme = partition_recursive(v, cfg.q_max);
        GroupedMps grouped = group_mps(res.state, scheme, cfg.q_max);
        for (std::size_t lo = 1; lo <= layers; lo += cfg.l_max) {
            const auto t0 = Clock::now();
            const std::size_t hi = std::min(layers, lo + cfg.l_max - 1);
            DmrgStepResult step = dmrg_step(grouped, circuit.layer_range(lo, hi), scheme.cut_chi, cfg, rng);
            grouped = step.state;
            record_step(lo, hi, scheme, v.chi_tilde, step, t0);
        }
        res.state = ungroup(std::move(grouped), svd_policy, res.ledger);
    } else {
        for (std::size_t lo = 1; lo <= layers; lo += cfg.l_max) {
            const auto t0 = Clock::now();
            const std::size_t hi = std::min(layers, lo + cfg.l_max - 1);
            const auto e = count_entangling(circuit, lo, hi, cfg.weight);
            const VirtualMps v = build_virtual_mps(e, res.state.bond_dims(), cfg.chi_max_dmrg);
            check_virtual_bounds(v, cfg.chi_max_dmrg);
            const GroupingScheme scheme = partition_recursive(v, cfg.q_max);
            GroupedMps grouped = group_mps(res.state, scheme, cfg.q_max);
            DmrgStepResult step = dmrg_step(grouped, circuit.layer_range(lo, hi), scheme.cut_chi, cfg, rng);
            res.state = ungroup(step.state, svd_policy, res.ledger);
            record_step(lo, hi, scheme, v.chi_tilde, step, t0);
            res.stats.steps.back().wall_time_seconds = seconds_since(t0);
        }
    }
    res.stats.max_chi = std::max(res.stats.max_chi, res.state.max_bond());
    res.stats.truncation_count = res.ledger.truncation_count;
    res.fidelity = step_product * res.ledger.fidelity();
    res.stats.wall_time_seconds = seconds_since(t_start);
    return res;
}

}  // namespace tnsim
