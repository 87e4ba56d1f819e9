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

#include <algorithm>
#include <functional>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "tnsim/error.hpp"

namespace tnsim {

void FidelityLedger::record(double f) {
    ++svd_count;
    if (f < 1.0) {
        log_fidelity += std::log(f);
        ++truncation_count;
        factors.push_back(f);
    }
}

void FidelityLedger::merge(const FidelityLedger &other) {
    log_fidelity += other.log_fidelity;
    svd_count += other.svd_count;
    truncation_count += other.truncation_count;
    factors.insert(factors.end(), other.factors.begin(), other.factors.end());
}

double FidelityLedger::fidelity() const {
    return std::exp(log_fidelity);
}

Mps Mps::from_product_state(std::span<const int> bits) {
    if (bits.empty()) {
        throw Error(ErrorCode::EmptyInput, "product state needs at least one qubit");
    }
    Mps m;
    m.sites_.reserve(bits.size());
    for (int b : bits) {
        if (b != 0 && b != 1) {
            throw Error(ErrorCode::InvalidParams, "product-state bits must be 0 or 1");
        }
        Tensor t(Shape{1, 2, 1});
        t[static_cast<std::size_t>(b)] = 1.0;
        m.sites_.push_back(std::move(t));
    }
    m.center_ = 0;
    return m;
}

Mps Mps::from_sites(std::vector<Tensor> sites) {
    if (sites.empty()) {
        throw Error(ErrorCode::EmptyInput, "MPS needs at least one site");
    }
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const Tensor &t = sites[i];
        if (t.rank() != 3 || t.dim(1) != 2) {
            throw Error(ErrorCode::BadShape, "site " + std::to_string(i) + " is not (chi, 2, chi)");
        }
        if (i > 0 && sites[i - 1].dim(2) != t.dim(0)) {
            throw Error(ErrorCode::DimensionMismatch, "bond mismatch before site " + std::to_string(i));
        }
    }
    if (sites.front().dim(0) != 1 || sites.back().dim(2) != 1) {
        throw Error(ErrorCode::BadShape, "boundary bonds must have dimension 1");
    }
    Mps m;
    m.sites_ = std::move(sites);
    return m;
}

Mps Mps::random(std::size_t n, std::size_t chi, Rng &rng) {
    std::vector<std::size_t> bonds(n + 1, 1);
    for (std::size_t b = 1; b < n; ++b) {
        std::size_t cap = std::size_t{1} << std::min<std::size_t>({b, n - b, 30});
        bonds[b] = std::min(chi, cap);
    }
    std::vector<Tensor> sites;
    for (std::size_t i = 0; i < n; ++i) {
        Tensor t(Shape{bonds[i], 2, bonds[i + 1]});
        for (auto &x : t.data()) {
            x = rng.complex_normal();
        }
        sites.push_back(std::move(t));
    }
    Mps m = from_sites(std::move(sites));
    m.orthogonalize(0);
    m.normalize();
    return m;
}

std::vector<std::size_t> Mps::bond_dims() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i + 1 < sites_.size(); ++i) {
        out.push_back(sites_[i].dim(2));
    }
    return out;
}

std::size_t Mps::max_bond() const {
    std::size_t best = 1;
    for (std::size_t d : bond_dims()) {
        best = std::max(best, d);
    }
    return best;
}

void Mps::set_site(std::size_t i, Tensor t) {
    sites_.at(i) = std::move(t);
    center_.reset();
}

void Mps::splice(std::size_t first, std::vector<Tensor> segment, std::optional<std::size_t> center) {
    if (first + segment.size() > sites_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "segment runs past the end of the MPS");
    }
    for (std::size_t k = 0; k < segment.size(); ++k) {
        sites_[first + k] = std::move(segment[k]);
    }
    center_ = center;
}

void Mps::move_center_right(std::size_t from) {
    QrResult f = qr(sites_[from], {0, 1});
    sites_[from] = std::move(f.q);
    sites_[from + 1] = contract(f.r, sites_[from + 1], {{1, 0}});
}

void Mps::move_center_left(std::size_t from) {
    QrResult f = qr(sites_[from], {1, 2});
    sites_[from] = f.q.permuted({2, 0, 1});
    sites_[from - 1] = contract(sites_[from - 1], f.r, {{2, 1}});
}

void Mps::orthogonalize(std::size_t center) {
    const std::size_t n = sites_.size();
    if (center >= n) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "center " + std::to_string(center) + " outside " + std::to_string(n) + " sites");
    }
    if (center_) {
        for (std::size_t i = *center_; i < center; ++i) {
            move_center_right(i);
        }
        for (std::size_t i = *center_; i > center; --i) {
            move_center_left(i);
        }
    } else {
        for (std::size_t i = 0; i < center; ++i) {
            move_center_right(i);
        }
        for (std::size_t i = n - 1; i > center; --i) {
            move_center_left(i);
        }
    }
    center_ = center;
}

void Mps::apply_single(const Tensor &gate, std::size_t q) {
    if (q >= sites_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "qubit " + std::to_string(q) + " out of range");
    }
    sites_[q] = contract(gate, sites_[q], {{1, 1}}).permuted({1, 0, 2});
}

Tensor Mps::contract_segment(std::size_t first, std::size_t last) const {
    if (last < first || last >= sites_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "bad segment bounds");
    }
    Tensor t = sites_[first];
    for (std::size_t i = first + 1; i <= last; ++i) {
        t = contract(t, sites_[i], {{t.rank() - 1, 0}});
    }
    return t;
}

void Mps::apply_adjacent_gate(const Tensor &gate, std::size_t start, const TruncationPolicy &policy,
                              FidelityLedger &ledger) {
    const std::size_t n = gate.rank() / 2;
    if (gate.rank() != 2 * n || n == 0) {
        throw Error(ErrorCode::BadShape, "gate tensor must have even rank");
    }
    if (start + n > sites_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "gate runs past the last site");
    }
    if (n == 1) {
        apply_single(gate, start);
        return;
    }
    orthogonalize(start);
    Tensor psi = contract_segment(start, start + n - 1);
    AxisPairs pairs;
    for (std::size_t i = 0; i < n; ++i) {
        pairs.emplace_back(n + i, 1 + i);
    }
    Tensor applied = contract(gate, psi, pairs);
    std::vector<std::size_t> perm{n};
    for (std::size_t i = 0; i < n; ++i) {
        perm.push_back(i);
    }
    perm.push_back(n + 1);
    psi = applied.permuted(perm);
    splice(start, decompose_dense(psi, policy, ledger), start + n - 1);
}

void Mps::swap_adjacent(std::size_t start, const TruncationPolicy &policy, FidelityLedger &ledger) {
    if (start + 2 > sites_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "swap runs past the last site");
    }
    orthogonalize(start);
    const std::size_t perm[] = {0, 2, 1, 3};
    const Tensor psi = contract_segment(start, start + 1).permuted(perm);
    splice(start, decompose_dense(psi, policy, ledger), start + 1);
}

double Mps::norm() const {
    return std::sqrt(std::max(0.0, overlap(*this, *this).real()));
}

void Mps::normalize() {
    const double nrm = norm();
    if (nrm == 0.0) {
        return;
    }
    sites_[center_.value_or(0)] *= Complex{1.0 / nrm, 0.0};
}

std::vector<double> Mps::schmidt_weights(std::size_t bond) {
    if (bond + 1 >= sites_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "bond " + std::to_string(bond) + " out of range");
    }
    orthogonalize(bond);
    SvdResult f = svd_truncated(sites_[bond], {0, 1}, TruncationPolicy::exact());
    std::vector<double> w;
    double total = 0.0;
    for (double s : f.s) {
        w.push_back(s * s);
        total += s * s;
    }
    for (double &x : w) {
        x /= total;
    }
    return w;
}

double Mps::entanglement_entropy(std::size_t bond) {
    double entropy = 0.0;
    for (double p : schmidt_weights(bond)) {
        if (p > 0.0) {
            entropy -= p * std::log2(p);
        }
    }
    return std::max(0.0, entropy);
}

std::vector<Complex> Mps::to_dense() const {
    Tensor t = contract_segment(0, sites_.size() - 1);
    auto d = t.data();
    return {d.begin(), d.end()};
}

std::vector<int> Mps::sample_prefix(std::size_t count, Rng &rng) {
    if (count > sites_.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "cannot sample more qubits than sites");
    }
    orthogonalize(0);
    std::vector<Complex> env{1.0};
    std::vector<int> bits;
    for (std::size_t i = 0; i < count; ++i) {
        const Tensor &a = sites_[i];
        const std::size_t dl = a.dim(0);
        const std::size_t dr = a.dim(2);
        std::vector<Complex> branch[2] = {std::vector<Complex>(dr), std::vector<Complex>(dr)};
        double weight[2] = {0.0, 0.0};
        for (std::size_t p = 0; p < 2; ++p) {
            for (std::size_t l = 0; l < dl; ++l) {
                for (std::size_t r = 0; r < dr; ++r) {
                    branch[p][r] += env[l] * a[(l * 2 + p) * dr + r];
                }
            }
            for (const auto &x : branch[p]) {
                weight[p] += std::norm(x);
            }
        }
        const double total = weight[0] + weight[1];
        const int bit = rng.uniform01() * total < weight[0] ? 0 : 1;
        bits.push_back(bit);
        const double scale = 1.0 / std::sqrt(weight[bit]);
        env = std::move(branch[bit]);
        for (auto &x : env) {
            x *= scale;
        }
    }
    return bits;
}

std::vector<double> Mps::prefix_distribution(std::size_t count) {
    if (count > sites_.size() || count > 24) {
        throw Error(ErrorCode::IndexOutOfRange, "prefix length must not exceed the sites or 24");
    }
    orthogonalize(0);
    std::vector<double> probs(std::size_t{1} << count, 0.0);
    // Depth-first over prefixes; the sites right of the prefix are right
    // isometries, so the squared norm of the boundary vector is the weight.
    std::vector<std::vector<Complex>> stack(count + 1);
    stack[0] = {Complex{1.0, 0.0}};
    std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t depth, std::size_t prefix) {
        if (depth == count) {
            double w = 0.0;
            for (const auto &x : stack[depth]) {
                w += std::norm(x);
            }
            probs[prefix] = w;
            return;
        }
        const Tensor &a = sites_[depth];
        const std::size_t dl = a.dim(0);
        const std::size_t dr = a.dim(2);
        for (std::size_t p = 0; p < 2; ++p) {
            auto &next = stack[depth + 1];
            next.assign(dr, Complex{0.0, 0.0});
            for (std::size_t l = 0; l < dl; ++l) {
                for (std::size_t r = 0; r < dr; ++r) {
                    next[r] += stack[depth][l] * a[(l * 2 + p) * dr + r];
                }
            }
            visit(depth + 1, prefix * 2 + p);
        }
    };
    visit(0, 0);
    double total = 0.0;
    for (double p : probs) {
        total += p;
    }
    if (total > 0.0) {
        for (double &p : probs) {
            p /= total;
        }
    }
    return probs;
}

namespace {

constexpr char kSnapshotMagic[4] = {'T', 'N', 'S', 'M'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <typename T>
void write_le(std::ostream &out, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(std::begin(bytes), std::end(bytes));
    }
    out.write(reinterpret_cast<const char *>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream &in) {
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char *>(bytes), sizeof(T));
    if (!in) {
        throw Error(ErrorCode::Io, "truncated MPS snapshot");
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(std::begin(bytes), std::end(bytes));
    }
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

// Layout: "TNSM", u32 version, u64 N, u64 chi_b for each of the N-1 bonds,
// then every site's values as (f64 re, f64 im) pairs in row-major order.
void Mps::write_snapshot(const std::filesystem::path &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    out.write(kSnapshotMagic, 4);
    write_le<std::uint32_t>(out, kSnapshotVersion);
    write_le<std::uint64_t>(out, sites_.size());
    for (std::size_t chi : bond_dims()) {
        write_le<std::uint64_t>(out, chi);
    }
    for (const Tensor &t : sites_) {
        for (const Complex &x : t.data()) {
            write_le<double>(out, x.real());
            write_le<double>(out, x.imag());
        }
    }
    if (!out) {
        throw Error(ErrorCode::Io, "failed writing " + path.string());
    }
}

Mps Mps::read_snapshot(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kSnapshotMagic, 4) != 0) {
        throw Error(ErrorCode::ParseError, "not an MPS snapshot");
    }
    if (read_le<std::uint32_t>(in) != kSnapshotVersion) {
        throw Error(ErrorCode::VersionMismatch, "unsupported snapshot version");
    }
    const auto n = read_le<std::uint64_t>(in);
    std::vector<std::size_t> bonds{1};
    for (std::uint64_t b = 0; b + 1 < n; ++b) {
        bonds.push_back(read_le<std::uint64_t>(in));
    }
    bonds.push_back(1);
    std::vector<Tensor> sites;
    for (std::uint64_t i = 0; i < n; ++i) {
        Tensor t(Shape{bonds[i], 2, bonds[i + 1]});
        for (auto &x : t.data()) {
            double re = read_le<double>(in);
            double im = read_le<double>(in);
            x = {re, im};
        }
        sites.push_back(std::move(t));
    }
    return from_sites(std::move(sites));
}

Complex overlap(const Mps &a, const Mps &b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::LengthMismatch, "overlap of MPS with different lengths");
    }
    Tensor env(Shape{1, 1});
    env[0] = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Tensor tmp = contract(env, b.site(i), {{1, 0}});
        env = contract(a.site(i).conj(), tmp, {{0, 0}, {1, 1}});
    }
    return env[0];
}

std::vector<Tensor> decompose_dense(const Tensor &psi, const TruncationPolicy &policy, FidelityLedger &ledger,
                                    SweepDirection direction) {
    if (direction == SweepDirection::RightToLeft) {
        std::vector<std::size_t> reverse(psi.rank());
        for (std::size_t i = 0; i < reverse.size(); ++i) {
            reverse[i] = reverse.size() - 1 - i;
        }
        std::vector<Tensor> out = decompose_dense(psi.permuted(reverse), policy, ledger);
        std::reverse(out.begin(), out.end());
        for (Tensor &t : out) {
            t = t.permuted({2, 1, 0});
        }
        return out;
    }
    if (psi.rank() < 3) {
        throw Error(ErrorCode::BadShape, "dense segment needs (chi, 2, ..., chi) shape");
    }
    for (std::size_t ax = 1; ax + 1 < psi.rank(); ++ax) {
        if (psi.dim(ax) != 2) {
            throw Error(ErrorCode::BadShape, "physical axes must have dimension 2");
        }
    }
    const std::size_t m = psi.rank() - 2;
    std::vector<Tensor> out;
    out.reserve(m);
    Tensor rest = psi;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        SvdResult f = svd_truncated(rest, {0, 1}, policy);
        ledger.record(f.local_fidelity);
        scale_axis(f.v, 0, f.s);
        out.push_back(std::move(f.u));
        rest = std::move(f.v);
    }
    out.push_back(std::move(rest));
    return out;
}

}  // namespace tnsim
