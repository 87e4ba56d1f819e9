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

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace tnsim {

using Complex = std::complex<double>;
using Shape = std::vector<std::size_t>;

/// Dense complex tensor.
///
/// Values are stored in row-major order: the last axis varies fastest, so
/// element (i0, ..., ik) lives at sum_j i_j * stride_j with
/// stride_k = 1 and stride_j = stride_{j+1} * shape[j+1]. A rank-0 tensor
/// holds one scalar.
class Tensor {
   public:
    Tensor() : data_(1, Complex{0.0, 0.0}) {
    }
    explicit Tensor(Shape shape);
    Tensor(Shape shape, std::vector<Complex> data);

    static Tensor scalar(Complex value);
    /// Identity matrix of size n x n.
    static Tensor identity(std::size_t n);

    const Shape &shape() const noexcept {
        return shape_;
    }
    std::size_t rank() const noexcept {
        return shape_.size();
    }
    std::size_t dim(std::size_t axis) const {
        return shape_.at(axis);
    }
    std::size_t size() const noexcept {
        return data_.size();
    }

    std::span<const Complex> data() const noexcept {
        return data_;
    }
    std::span<Complex> data() noexcept {
        return data_;
    }

    Complex &at(std::initializer_list<std::size_t> index);
    const Complex &at(std::initializer_list<std::size_t> index) const;
    Complex &operator[](std::size_t flat) {
        return data_[flat];
    }
    const Complex &operator[](std::size_t flat) const {
        return data_[flat];
    }

    /// Same data, new shape; the element count must match.
    Tensor reshaped(Shape shape) const &;
    Tensor reshaped(Shape shape) &&;

    /// Axis permutation: result.shape()[i] == shape()[perm[i]].
    Tensor permuted(std::span<const std::size_t> perm) const;
    Tensor permuted(std::initializer_list<std::size_t> perm) const {
        return permuted(std::span<const std::size_t>(perm.begin(), perm.size()));
    }

    Tensor conj() const;
    double norm() const;
    double norm_squared() const;
    bool all_finite() const;

    Tensor &operator*=(Complex factor);
    friend Tensor operator*(Complex factor, Tensor t) {
        t *= factor;
        return t;
    }

   private:
    std::size_t flat_index(std::initializer_list<std::size_t> index) const;

    Shape shape_;
    std::vector<Complex> data_;
};

std::size_t shape_size(const Shape &shape);

/// Maximum relative deviation, used by tests: ||a - b|| / max(||b||, tiny).
double relative_distance(const Tensor &a, const Tensor &b);

using AxisPairs = std::vector<std::pair<std::size_t, std::size_t>>;

/// Contract `a` and `b` over the given (axis of a, axis of b) pairs.
/// The result carries the free axes of `a` in order, then the free axes of `b`.
Tensor contract(const Tensor &a, const Tensor &b, const AxisPairs &pairs);

/// Contract the trailing `k` axes of `op` with axes [first, first + k) of
/// `t`, in order. The free axes of `op` take the place of the contracted
/// block, so no axis of `t` moves.
Tensor apply_block(const Tensor &op, const Tensor &t, std::size_t first, std::size_t k);

/// Truncation settings for an SVD split.
///
/// Singular values below `cutoff_eta * s_1` are discarded, then at most
/// `chi_max` are kept. Independently of the cutoff, values below
/// `kRankFloor * s_1` are treated as numerical zeros and dropped.
struct TruncationPolicy {
    static constexpr double kRankFloor = 1e-10;
    static constexpr std::size_t kUnbounded = static_cast<std::size_t>(-1) >> 1;

    std::size_t chi_max = kUnbounded;
    double cutoff_eta = 0.0;
    bool renormalize = true;

    void validate() const;

    static TruncationPolicy exact() {
        return TruncationPolicy{};
    }
    static TruncationPolicy capped(std::size_t chi, double eta = 0.0) {
        return TruncationPolicy{chi, eta, true};
    }
};

struct SvdResult {
    Tensor u;                    // left axes + new bond
    std::vector<double> s;       // kept values, descending, > 0
    Tensor v;                    // new bond + remaining axes
    double local_fidelity = 1.0; // kept / total squared weight, before renormalization
    std::size_t kept_rank = 0;
};

/// Reshape `t` into a matrix (left_axes | remaining axes, both in the given
/// order), take a full SVD and truncate per `policy`.
///
/// Phase convention: the first entry of each right singular vector (row of
/// `v`) with magnitude above 1e-12 is real and non-negative.
SvdResult svd_truncated(const Tensor &t, std::span<const std::size_t> left_axes,
                        const TruncationPolicy &policy);
inline SvdResult svd_truncated(const Tensor &t, std::initializer_list<std::size_t> left_axes,
                               const TruncationPolicy &policy) {
    return svd_truncated(t, std::span<const std::size_t>(left_axes.begin(), left_axes.size()),
                         policy);
}

struct QrResult {
    Tensor q;  // left axes + new bond, orthonormal columns
    Tensor r;  // new bond + remaining axes, diagonal real and >= 0
};

/// Thin QR over the (left_axes | remaining axes) matricization.
QrResult qr(const Tensor &t, std::span<const std::size_t> left_axes);
inline QrResult qr(const Tensor &t, std::initializer_list<std::size_t> left_axes) {
    return qr(t, std::span<const std::size_t>(left_axes.begin(), left_axes.size()));
}

/// Multiply `t` by diag(s) along `axis`.
void scale_axis(Tensor &t, std::size_t axis, std::span<const double> s);

}  // namespace tnsim
