// Copyright 2026 The tsgan Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "tsgan/tensor.hpp"

// Differentiable primitives. Every backward rule is itself written with these
// functions, so gradients can be differentiated again.
//
// Binary elementwise ops accept either equal shapes or a right operand whose
// shape is a suffix of the left operand's shape (batch-leading broadcast,
// including the scalar shape {}).

namespace tsgan {

/// Flat source index per output element; -1 produces a zero.
using IndexMap = std::shared_ptr<const std::vector<std::int64_t>>;

// Linear algebra and layout.
/// [..., M, K] x [K, N] or [B, M, K] x [B, K, N].
Tensor matmul(const Tensor& a, const Tensor& b);
/// Swaps the last two axes.
Tensor transpose(const Tensor& x);
Tensor reshape(const Tensor& x, Shape shape);
Tensor concat(std::span<const Tensor> parts, std::size_t axis);
Tensor slice(const Tensor& x, std::size_t axis, std::size_t start, std::size_t length);
Tensor gather(const Tensor& x, Shape out_shape, IndexMap index);
/// Adjoint of gather: out[index[i]] += y[i].
Tensor scatter_add(const Tensor& y, Shape out_shape, IndexMap index);

// Elementwise.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double offset);
Tensor neg(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
Tensor sqrt(const Tensor& x);
Tensor square(const Tensor& x);
Tensor leaky_relu(const Tensor& x, double slope);
Tensor elu(const Tensor& x);
Tensor sigmoid(const Tensor& x);

// Reductions and broadcasts.
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
/// Sum over one axis, keeping it with extent 1.
Tensor sum_axis(const Tensor& x, std::size_t axis);
/// Repeats an extent-1 axis `count` times.
Tensor expand_axis(const Tensor& x, std::size_t axis, std::size_t count);
/// Sums leading axes away so the result has `shape` (a suffix of x's shape).
Tensor reduce_to(const Tensor& x, const Shape& shape);
/// Tiles x over leading axes up to `shape`.
Tensor expand_to(const Tensor& x, const Shape& shape);

/// Softmax over the last axis.
Tensor softmax(const Tensor& x);

// Temporal ops on [B, T, C] tensors.
/// Max over windows of the time axis; padding never wins and gradient ties
/// route to the first maximal index.
Tensor max_pool1d(const Tensor& x, std::size_t width, std::size_t stride, std::size_t pad);
/// Cross-correlation with zero padding. kernel is [width * C_in, C_out],
/// laid out tap-major (row w * C_in + c).
Tensor conv1d(const Tensor& x, const Tensor& kernel, std::size_t stride, std::size_t pad);

}  // namespace tsgan
