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

#include "tnsim/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tnsim/error.hpp"

namespace tnsim {

namespace {

using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ColMatrix = Eigen::MatrixXcd;

std::string shape_string(const Shape &shape) {
    std::string out = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        out += std::to_string(shape[i]);
        if (i + 1 < shape.size()) {
            out += ",";
        }
    }
    return out + ")";
}

bool is_identity_perm(std::span<const std::size_t> perm) {
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (perm[i] != i) {
            return false;
        }
    }
    return true;
}

// Splits the axes of `t` into (left_axes, complement) and returns the
// permutation that brings them into that order.
std::vector<std::size_t> matricize_perm(const Tensor &t, std::span<const std::size_t> left_axes) {
    std::vector<bool> used(t.rank(), false);
    std::vector<std::size_t> perm;
    perm.reserve(t.rank());
    for (std::size_t ax : left_axes) {
        if (ax >= t.rank()) {
            throw Error(ErrorCode::AxisOutOfRange,
                        "axis " + std::to_string(ax) + " for tensor of rank " + std::to_string(t.rank()));
        }
        if (used[ax]) {
            throw Error(ErrorCode::AxisOutOfRange, "axis " + std::to_string(ax) + " repeated");
        }
        used[ax] = true;
        perm.push_back(ax);
    }
    for (std::size_t ax = 0; ax < t.rank(); ++ax) {
        if (!used[ax]) {
            perm.push_back(ax);
        }
    }
    return perm;
}

// Column-major copy of the (left | rest) matricization.
ColMatrix to_matrix(const Tensor &t, std::span<const std::size_t> left_axes, Shape &left_dims,
                    Shape &right_dims) {
    auto perm = matricize_perm(t, left_axes);
    left_dims.clear();
    right_dims.clear();
    for (std::size_t i = 0; i < perm.size(); ++i) {
        (i < left_axes.size() ? left_dims : right_dims).push_back(t.dim(perm[i]));
    }
    const auto rows = static_cast<Eigen::Index>(shape_size(left_dims));
    const auto cols = static_cast<Eigen::Index>(shape_size(right_dims));
    if (is_identity_perm(perm)) {
        return Eigen::Map<const RowMatrix>(t.data().data(), rows, cols);
    }
    Tensor p = t.permuted(perm);
    return Eigen::Map<const RowMatrix>(p.data().data(), rows, cols);
}

Tensor from_matrix(const ColMatrix &m, Shape shape) {
    Tensor out(std::move(shape));
    Eigen::Map<RowMatrix>(out.data().data(), m.rows(), m.cols()) = m;
    return out;
}

}  // namespace

std::size_t shape_size(const Shape &shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), data_(shape_size(shape_), Complex{0.0, 0.0}) {
    for (std::size_t d : shape_) {
        if (d == 0) {
            throw Error(ErrorCode::BadShape, "zero dimension in shape " + shape_string(shape_));
        }
    }
}

Tensor::Tensor(Shape shape, std::vector<Complex> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_size(shape_) != data_.size()) {
        throw Error(ErrorCode::BadShape, "shape " + shape_string(shape_) + " does not hold " +
                                             std::to_string(data_.size()) + " values");
    }
    for (std::size_t d : shape_) {
        if (d == 0) {
            throw Error(ErrorCode::BadShape, "zero dimension in shape " + shape_string(shape_));
        }
    }
}

Tensor Tensor::scalar(Complex value) {
    return Tensor(Shape{}, {value});
}

Tensor Tensor::identity(std::size_t n) {
    Tensor t(Shape{n, n});
    for (std::size_t i = 0; i < n; ++i) {
        t.data_[i * n + i] = 1.0;
    }
    return t;
}

std::size_t Tensor::flat_index(std::initializer_list<std::size_t> index) const {
    if (index.size() != shape_.size()) {
        throw Error(ErrorCode::AxisOutOfRange, "index rank does not match tensor rank");
    }
    std::size_t flat = 0;
    std::size_t axis = 0;
    for (std::size_t i : index) {
        if (i >= shape_[axis]) {
            throw Error(ErrorCode::IndexOutOfRange, "index out of range on axis " + std::to_string(axis));
        }
        flat = flat * shape_[axis] + i;
        ++axis;
    }
    return flat;
}

Complex &Tensor::at(std::initializer_list<std::size_t> index) {
    return data_[flat_index(index)];
}

const Complex &Tensor::at(std::initializer_list<std::size_t> index) const {
    return data_[flat_index(index)];
}

Tensor Tensor::reshaped(Shape shape) const & {
    return Tensor(std::move(shape), data_);
}

Tensor Tensor::reshaped(Shape shape) && {
    return Tensor(std::move(shape), std::move(data_));
}

Tensor Tensor::permuted(std::span<const std::size_t> perm) const {
    const std::size_t r = rank();
    if (perm.size() != r) {
        throw Error(ErrorCode::AxisOutOfRange, "permutation length does not match rank");
    }
    std::vector<bool> seen(r, false);
    for (std::size_t p : perm) {
        if (p >= r || seen[p]) {
            throw Error(ErrorCode::AxisOutOfRange, "invalid axis permutation");
        }
        seen[p] = true;
    }
    if (is_identity_perm(perm)) {
        return *this;
    }

    std::vector<std::size_t> in_stride(r, 1);
    for (std::size_t i = r - 1; i > 0; --i) {
        in_stride[i - 1] = in_stride[i] * shape_[i];
    }
    Shape out_shape(r);
    std::vector<std::size_t> stride(r);
    for (std::size_t i = 0; i < r; ++i) {
        out_shape[i] = shape_[perm[i]];
        stride[i] = in_stride[perm[i]];
    }

    std::vector<Complex> out(data_.size());
    const std::size_t inner = out_shape[r - 1];
    const std::size_t inner_stride = stride[r - 1];
    std::vector<std::size_t> counter(r, 0);
    std::size_t src = 0;
    const Complex *in = data_.data();
    for (std::size_t dst = 0; dst < out.size(); dst += inner) {
        for (std::size_t k = 0; k < inner; ++k) {
            out[dst + k] = in[src + k * inner_stride];
        }
        for (std::size_t ax = r - 1; ax-- > 0;) {
            ++counter[ax];
            src += stride[ax];
            if (counter[ax] < out_shape[ax]) {
                break;
            }
            src -= stride[ax] * out_shape[ax];
            counter[ax] = 0;
        }
    }
    return Tensor(std::move(out_shape), std::move(out));
}

Tensor Tensor::conj() const {
    Tensor out = *this;
    for (auto &x : out.data_) {
        x = std::conj(x);
    }
    return out;
}

double Tensor::norm_squared() const {
    double acc = 0.0;
    for (const auto &x : data_) {
        acc += std::norm(x);
    }
    return acc;
}

double Tensor::norm() const {
    return std::sqrt(norm_squared());
}

bool Tensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const Complex &x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

Tensor &Tensor::operator*=(Complex factor) {
    for (auto &x : data_) {
        x *= factor;
    }
    return *this;
}

double relative_distance(const Tensor &a, const Tensor &b) {
    if (a.shape() != b.shape()) {
        throw Error(ErrorCode::DimensionMismatch, "relative_distance on differently shaped tensors");
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += std::norm(a[i] - b[i]);
    }
    return std::sqrt(diff) / std::max(b.norm(), 1e-300);
}

Tensor contract(const Tensor &a, const Tensor &b, const AxisPairs &pairs) {
    std::vector<bool> used_a(a.rank(), false);
    std::vector<bool> used_b(b.rank(), false);
    std::vector<std::size_t> perm_a;
    std::vector<std::size_t> perm_b;
    std::size_t k = 1;
    for (auto [ax, bx] : pairs) {
        if (ax >= a.rank() || bx >= b.rank()) {
            throw Error(ErrorCode::AxisOutOfRange, "contracted axis out of range");
        }
        if (used_a[ax] || used_b[bx]) {
            throw Error(ErrorCode::AxisOutOfRange, "contracted axis repeated");
        }
        if (a.dim(ax) != b.dim(bx)) {
            throw Error(ErrorCode::DimensionMismatch,
                        "axis " + std::to_string(ax) + " of " + shape_string(a.shape()) + " vs axis " +
                            std::to_string(bx) + " of " + shape_string(b.shape()));
        }
        used_a[ax] = true;
        used_b[bx] = true;
        k *= a.dim(ax);
    }
    Shape out_shape;
    std::size_t m = 1;
    for (std::size_t i = 0; i < a.rank(); ++i) {
        if (!used_a[i]) {
            perm_a.push_back(i);
            out_shape.push_back(a.dim(i));
            m *= a.dim(i);
        }
    }
    for (auto [ax, bx] : pairs) {
        perm_a.push_back(ax);
        perm_b.push_back(bx);
    }
    std::size_t n = 1;
    for (std::size_t i = 0; i < b.rank(); ++i) {
        if (!used_b[i]) {
            perm_b.push_back(i);
            out_shape.push_back(b.dim(i));
            n *= b.dim(i);
        }
    }

    Tensor pa;
    Tensor pb;
    const Complex *a_ptr = a.data().data();
    const Complex *b_ptr = b.data().data();
    if (!is_identity_perm(perm_a)) {
        pa = a.permuted(perm_a);
        a_ptr = pa.data().data();
    }
    if (!is_identity_perm(perm_b)) {
        pb = b.permuted(perm_b);
        b_ptr = pb.data().data();
    }

    Tensor out(out_shape);
    const auto M = static_cast<Eigen::Index>(m);
    const auto K = static_cast<Eigen::Index>(k);
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::Map<const RowMatrix> A(a_ptr, M, K);
    Eigen::Map<const RowMatrix> B(b_ptr, K, N);
    Eigen::Map<RowMatrix> C(out.data().data(), M, N);
    C.noalias() = A * B;
    return out;
}

Tensor apply_block(const Tensor &op, const Tensor &t, std::size_t first, std::size_t k) {
    if (k == 0 || k > op.rank() || first + k > t.rank()) {
        throw Error(ErrorCode::AxisOutOfRange, "block does not fit the tensor ranks");
    }
    const std::size_t free = op.rank() - k;
    for (std::size_t j = 0; j < k; ++j) {
        if (op.dim(free + j) != t.dim(first + j)) {
            throw Error(ErrorCode::DimensionMismatch,
                        "block of " + shape_string(op.shape()) + " vs " + shape_string(t.shape()));
        }
    }
    std::size_t outer = 1;
    std::size_t kk = 1;
    std::size_t inner = 1;
    Shape out_shape;
    for (std::size_t i = 0; i < first; ++i) {
        outer *= t.dim(i);
        out_shape.push_back(t.dim(i));
    }
    std::size_t f = 1;
    for (std::size_t i = 0; i < free; ++i) {
        f *= op.dim(i);
        out_shape.push_back(op.dim(i));
    }
    for (std::size_t i = first; i < first + k; ++i) {
        kk *= t.dim(i);
    }
    for (std::size_t i = first + k; i < t.rank(); ++i) {
        inner *= t.dim(i);
        out_shape.push_back(t.dim(i));
    }

    Tensor out(out_shape);
    const auto F = static_cast<Eigen::Index>(f);
    const auto K = static_cast<Eigen::Index>(kk);
    const auto I = static_cast<Eigen::Index>(inner);
    Eigen::Map<const RowMatrix> S(op.data().data(), F, K);
    if (inner == 1) {
        Eigen::Map<const RowMatrix> T(t.data().data(), static_cast<Eigen::Index>(outer), K);
        Eigen::Map<RowMatrix> C(out.data().data(), static_cast<Eigen::Index>(outer), F);
        C.noalias() = T * S.transpose();
        return out;
    }
    for (std::size_t o = 0; o < outer; ++o) {
        Eigen::Map<const RowMatrix> T(t.data().data() + o * kk * inner, K, I);
        Eigen::Map<RowMatrix> C(out.data().data() + o * f * inner, F, I);
        if (f * kk <= 16) {
            C.noalias() = S.lazyProduct(T);
        } else {
            C.noalias() = S * T;
        }
    }
    return out;
}

void TruncationPolicy::validate() const {
    if (chi_max < 1) {
        throw Error(ErrorCode::InvalidParams, "chi_max must be >= 1");
    }
    if (!(cutoff_eta >= 0.0 && cutoff_eta < 1.0)) {
        throw Error(ErrorCode::InvalidParams, "cutoff must lie in [0, 1)");
    }
}

namespace {

// Divide-and-conquer SVD in Eigen 3.4 occasionally returns orthonormal
// factors that do not reproduce the input when singular values are
// degenerate, so every result is checked before it is trusted.
// Below this size BDCSVD delegates to Jacobi anyway.
constexpr Eigen::Index kDivideAndConquerMin = 16;

bool svd_is_sound(const ColMatrix &mat, const ColMatrix &u, const Eigen::VectorXd &sv, const ColMatrix &v) {
    if (!u.allFinite() || !v.allFinite() || !sv.allFinite()) {
        return false;
    }
    const Eigen::Index k = sv.size();
    const double scale = k > 0 ? std::max(sv(0), 1e-300) : 1.0;
    constexpr double kTol = 1e-10;
    if (((u.adjoint() * u) - ColMatrix::Identity(k, k)).cwiseAbs().maxCoeff() > kTol ||
        ((v.adjoint() * v) - ColMatrix::Identity(k, k)).cwiseAbs().maxCoeff() > kTol) {
        return false;
    }
    return (u * sv.asDiagonal() * v.adjoint() - mat).cwiseAbs().maxCoeff() <= kTol * scale;
}

}  // namespace

SvdResult svd_truncated(const Tensor &t, std::span<const std::size_t> left_axes,
                        const TruncationPolicy &policy) {
    policy.validate();
    if (!t.all_finite()) {
        throw Error(ErrorCode::NonFinite, "svd input contains NaN or Inf");
    }
    Shape left_dims;
    Shape right_dims;
    ColMatrix mat = to_matrix(t, left_axes, left_dims, right_dims);

    ColMatrix u_full;
    ColMatrix v_full;
    Eigen::VectorXd sv;
    bool sound = false;
    if (std::min(mat.rows(), mat.cols()) >= kDivideAndConquerMin) {
        Eigen::BDCSVD<ColMatrix> bdc(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u_full = bdc.matrixU();
        v_full = bdc.matrixV();
        sv = bdc.singularValues();
        sound = svd_is_sound(mat, u_full, sv, v_full);
    }
    if (!sound) {
        Eigen::JacobiSVD<ColMatrix> jac(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u_full = jac.matrixU();
        v_full = jac.matrixV();
        sv = jac.singularValues();
    }
    if (sv.size() == 0 || !(sv(0) > 0.0)) {
        throw Error(ErrorCode::EmptySpectrum, "all singular values vanish");
    }
    if (!sv.allFinite()) {
        throw Error(ErrorCode::NonFinite, "svd produced non-finite singular values");
    }

    const double s1 = sv(0);
    const double threshold = std::max(policy.cutoff_eta, TruncationPolicy::kRankFloor) * s1;
    std::size_t keep = 0;
    while (keep < static_cast<std::size_t>(sv.size()) && sv(static_cast<Eigen::Index>(keep)) >= threshold) {
        ++keep;
    }
    keep = std::min(keep, policy.chi_max);

    double total = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        total += sv(i) * sv(i);
    }
    double kept = 0.0;
    for (std::size_t i = 0; i < keep; ++i) {
        kept += sv(static_cast<Eigen::Index>(i)) * sv(static_cast<Eigen::Index>(i));
    }

    SvdResult out;
    out.kept_rank = keep;
    out.local_fidelity = std::min(1.0, kept / total);
    const double scale = policy.renormalize ? std::sqrt(total / kept) : 1.0;
    out.s.resize(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        out.s[i] = sv(static_cast<Eigen::Index>(i)) * scale;
    }

    const auto k = static_cast<Eigen::Index>(keep);
    ColMatrix u = u_full.leftCols(k);
    ColMatrix vh = v_full.leftCols(k).adjoint();
    for (Eigen::Index mu = 0; mu < k; ++mu) {
        for (Eigen::Index j = 0; j < vh.cols(); ++j) {
            const double mag = std::abs(vh(mu, j));
            if (mag > 1e-12) {
                const Complex phase = vh(mu, j) / mag;
                vh.row(mu) *= std::conj(phase);
                u.col(mu) *= phase;
                break;
            }
        }
    }

    Shape u_shape = left_dims;
    u_shape.push_back(keep);
    Shape v_shape{keep};
    v_shape.insert(v_shape.end(), right_dims.begin(), right_dims.end());
    out.u = from_matrix(u, std::move(u_shape));
    out.v = from_matrix(vh, std::move(v_shape));
    return out;
}

QrResult qr(const Tensor &t, std::span<const std::size_t> left_axes) {
    if (!t.all_finite()) {
        throw Error(ErrorCode::NonFinite, "qr input contains NaN or Inf");
    }
    Shape left_dims;
    Shape right_dims;
    ColMatrix mat = to_matrix(t, left_axes, left_dims, right_dims);
    const Eigen::Index rows = mat.rows();
    const Eigen::Index cols = mat.cols();
    const Eigen::Index k = std::min(rows, cols);

    Eigen::HouseholderQR<ColMatrix> decomposition(mat);
    ColMatrix q = decomposition.householderQ() * ColMatrix::Identity(rows, k);
    ColMatrix r = decomposition.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < k; ++i) {
        const double mag = std::abs(r(i, i));
        if (mag > 0.0) {
            const Complex phase = r(i, i) / mag;
            r.row(i) *= std::conj(phase);
            q.col(i) *= phase;
            r(i, i) = Complex{r(i, i).real(), 0.0};
        }
    }

    Shape q_shape = left_dims;
    q_shape.push_back(static_cast<std::size_t>(k));
    Shape r_shape{static_cast<std::size_t>(k)};
    r_shape.insert(r_shape.end(), right_dims.begin(), right_dims.end());
    return QrResult{from_matrix(q, std::move(q_shape)), from_matrix(r, std::move(r_shape))};
}

void scale_axis(Tensor &t, std::size_t axis, std::span<const double> s) {
    if (axis >= t.rank()) {
        throw Error(ErrorCode::AxisOutOfRange, "scale_axis axis out of range");
    }
    if (s.size() != t.dim(axis)) {
        throw Error(ErrorCode::DimensionMismatch, "scale_axis length mismatch");
    }
    std::size_t inner = 1;
    for (std::size_t i = axis + 1; i < t.rank(); ++i) {
        inner *= t.dim(i);
    }
    const std::size_t d = t.dim(axis);
    auto data = t.data();
    for (std::size_t flat = 0; flat < data.size(); ++flat) {
        data[flat] *= s[(flat / inner) % d];
    }
}

}  // namespace tnsim
