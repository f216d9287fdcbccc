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

#include "tsgan/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

namespace tsgan {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

bool is_suffix(const Shape& full, const Shape& part) {
  if (part.size() > full.size()) return false;
  return std::equal(part.rbegin(), part.rend(), full.rbegin());
}

void require_broadcastable(const char* op, const Tensor& a, const Tensor& b) {
  if (!is_suffix(a.shape(), b.shape())) {
    throw ShapeError(std::string(op) + ": cannot broadcast " + to_string(b.shape()) + " into " +
                     to_string(a.shape()));
  }
}

template <typename F>
std::vector<double> binary_values(const Tensor& a, const Tensor& b, F f) {
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> out(av.size());
  const std::size_t nb = bv.size();
  if (nb == av.size()) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i], bv[i]);
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i], bv[i % nb]);
  }
  return out;
}

template <typename F>
std::vector<double> unary_values(const Tensor& x, F f) {
  const auto xv = x.values();
  std::vector<double> out(xv.size());
  std::transform(xv.begin(), xv.end(), out.begin(), f);
  return out;
}

Tensor reduce_if_needed(const Tensor& g, const Shape& shape) {
  return g.shape() == shape ? g : reduce_to(g, shape);
}

std::size_t check_axis(const char* op, const Tensor& x, std::size_t axis) {
  if (axis >= x.rank()) {
    throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) + " out of range for " +
                     to_string(x.shape()));
  }
  return axis;
}

// (outer, extent, inner) decomposition around one axis.
struct AxisSplit {
  std::size_t outer = 1, extent = 1, inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() < 2 || b.rank() < 2) throw ShapeError("matmul: operands must have rank >= 2");
  const auto& as = a.shape();
  const auto& bs = b.shape();
  const std::size_t m = as[as.size() - 2], k = as.back();
  const std::size_t kb = bs[bs.size() - 2], n = bs.back();
  if (k != kb) {
    throw ShapeError("matmul: inner extents differ, " + to_string(as) + " x " + to_string(bs));
  }
  Shape out_shape = as;
  out_shape.back() = n;
  std::vector<double> out(numel(out_shape));

  if (b.rank() == 2) {
    const std::size_t rows = a.numel() / k;
    MutMap(out.data(), rows, n).noalias() =
        ConstMap(a.values().data(), rows, k) * ConstMap(b.values().data(), k, n);
    return make_op("matmul", std::move(out_shape), std::move(out), {a, b},
                   [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                     const Tensor& a = self.inputs()[0];
                     const Tensor& b = self.inputs()[1];
                     Tensor ga, gb;
                     if (a.requires_grad()) ga = matmul(g, transpose(b));
                     if (b.requires_grad()) {
                       const std::size_t k = a.shape().back();
                       const std::size_t n = g.shape().back();
                       gb = matmul(transpose(reshape(a, {a.numel() / k, k})),
                                   reshape(g, {g.numel() / n, n}));
                     }
                     return {ga, gb};
                   });
  }

  if (a.rank() != 3 || b.rank() != 3 || as[0] != bs[0]) {
    throw ShapeError("matmul: batched operands must both be [B, ., .], got " + to_string(as) +
                     " x " + to_string(bs));
  }
  const std::size_t batch = as[0];
  for (std::size_t i = 0; i < batch; ++i) {
    MutMap(out.data() + i * m * n, m, n).noalias() =
        ConstMap(a.values().data() + i * m * k, m, k) *
        ConstMap(b.values().data() + i * k * n, k, n);
  }
  return make_op("matmul", std::move(out_shape), std::move(out), {a, b},
                 [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   const Tensor& a = self.inputs()[0];
                   const Tensor& b = self.inputs()[1];
                   Tensor ga, gb;
                   if (a.requires_grad()) ga = matmul(g, transpose(b));
                   if (b.requires_grad()) gb = matmul(transpose(a), g);
                   return {ga, gb};
                 });
}

Tensor transpose(const Tensor& x) {
  if (x.rank() < 2) throw ShapeError("transpose: rank must be >= 2");
  Shape shape = x.shape();
  const std::size_t r = shape[shape.size() - 2], c = shape.back();
  std::swap(shape[shape.size() - 2], shape.back());
  const std::size_t batch = x.numel() / (r * c);
  std::vector<double> out(x.numel());
  const auto xv = x.values();
  for (std::size_t b = 0; b < batch; ++b) {
    MutMap(out.data() + b * r * c, c, r) = ConstMap(xv.data() + b * r * c, r, c).transpose();
  }
  return make_op("transpose", std::move(shape), std::move(out), {x},
                 [](const Tensor&, const Tensor& g) -> std::vector<Tensor> {
                   return {transpose(g)};
                 });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (numel(shape) != x.numel()) {
    throw ShapeError("reshape: " + to_string(x.shape()) + " -> " + to_string(shape));
  }
  const auto xv = x.values();
  return make_op("reshape", std::move(shape), std::vector<double>(xv.begin(), xv.end()), {x},
                 [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   return {reshape(g, self.inputs()[0].shape())};
                 });
}

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape& first = parts[0].shape();
  check_axis("concat", parts[0], axis);
  Shape out_shape = first;
  out_shape[axis] = 0;
  for (const auto& p : parts) {
    Shape s = p.shape();
    if (s.size() != first.size()) throw ShapeError("concat: rank mismatch");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i != axis && s[i] != first[i]) {
        throw ShapeError("concat: " + to_string(s) + " incompatible with " + to_string(first));
      }
    }
    out_shape[axis] += s[axis];
  }
  const auto split = split_at(out_shape, axis);
  std::vector<double> out(numel(out_shape));
  std::size_t offset = 0;
  std::vector<std::size_t> offsets;
  for (const auto& p : parts) {
    offsets.push_back(offset);
    const std::size_t ext = p.shape()[axis];
    const auto pv = p.values();
    for (std::size_t o = 0; o < split.outer; ++o) {
      std::copy_n(pv.data() + o * ext * split.inner, ext * split.inner,
                  out.data() + (o * split.extent + offset) * split.inner);
    }
    offset += ext;
  }
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return make_op("concat", std::move(out_shape), std::move(out), std::move(inputs),
                 [axis, offsets](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   std::vector<Tensor> grads;
                   for (std::size_t i = 0; i < self.inputs().size(); ++i) {
                     const Tensor& p = self.inputs()[i];
                     grads.push_back(p.requires_grad() ? slice(g, axis, offsets[i], p.shape()[axis])
                                                       : Tensor());
                   }
                   return grads;
                 });
}

Tensor slice(const Tensor& x, std::size_t axis, std::size_t start, std::size_t length) {
  check_axis("slice", x, axis);
  if (start + length > x.shape()[axis]) {
    throw ShapeError("slice: range [" + std::to_string(start) + ", " +
                     std::to_string(start + length) + ") outside " + to_string(x.shape()));
  }
  const auto split = split_at(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape[axis] = length;
  auto index = std::make_shared<std::vector<std::int64_t>>();
  index->reserve(numel(out_shape));
  for (std::size_t o = 0; o < split.outer; ++o) {
    for (std::size_t e = 0; e < length; ++e) {
      for (std::size_t i = 0; i < split.inner; ++i) {
        index->push_back(static_cast<std::int64_t>((o * split.extent + start + e) * split.inner + i));
      }
    }
  }
  return gather(x, std::move(out_shape), std::move(index));
}

Tensor gather(const Tensor& x, Shape out_shape, IndexMap index) {
  if (!index || index->size() != numel(out_shape)) {
    throw ShapeError("gather: index length does not match " + to_string(out_shape));
  }
  const auto xv = x.values();
  const auto n = static_cast<std::int64_t>(xv.size());
  std::vector<double> out(index->size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto src = (*index)[i];
    if (src >= n) throw ShapeError("gather: index out of range");
    if (src >= 0) out[i] = xv[static_cast<std::size_t>(src)];
  }
  return make_op("gather", std::move(out_shape), std::move(out), {x},
                 [index](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   return {scatter_add(g, self.inputs()[0].shape(), index)};
                 });
}

Tensor scatter_add(const Tensor& y, Shape out_shape, IndexMap index) {
  if (!index || index->size() != y.numel()) {
    throw ShapeError("scatter_add: index length does not match " + to_string(y.shape()));
  }
  std::vector<double> out(numel(out_shape), 0.0);
  const auto n = static_cast<std::int64_t>(out.size());
  const auto yv = y.values();
  for (std::size_t i = 0; i < yv.size(); ++i) {
    const auto dst = (*index)[i];
    if (dst >= n) throw ShapeError("scatter_add: index out of range");
    if (dst >= 0) out[static_cast<std::size_t>(dst)] += yv[i];
  }
  return make_op("scatter_add", std::move(out_shape), std::move(out), {y},
                 [index](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   return {gather(g, self.inputs()[0].shape(), index)};
                 });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_broadcastable("add", a, b);
  return make_op("add", a.shape(), binary_values(a, b, std::plus<>{}), {a, b},
                 [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   const Tensor& b = self.inputs()[1];
                   return {self.inputs()[0].requires_grad() ? g : Tensor(),
                           b.requires_grad() ? reduce_if_needed(g, b.shape()) : Tensor()};
                 });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_broadcastable("sub", a, b);
  return make_op("sub", a.shape(), binary_values(a, b, std::minus<>{}), {a, b},
                 [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   const Tensor& b = self.inputs()[1];
                   return {self.inputs()[0].requires_grad() ? g : Tensor(),
                           b.requires_grad() ? reduce_if_needed(neg(g), b.shape()) : Tensor()};
                 });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_broadcastable("mul", a, b);
  return make_op("mul", a.shape(), binary_values(a, b, std::multiplies<>{}), {a, b},
                 [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   const Tensor& a = self.inputs()[0];
                   const Tensor& b = self.inputs()[1];
                   return {a.requires_grad() ? mul(g, b) : Tensor(),
                           b.requires_grad() ? reduce_if_needed(mul(g, a), b.shape()) : Tensor()};
                 });
}

Tensor div(const Tensor& a, const Tensor& b) {
  require_broadcastable("div", a, b);
  for (double v : b.values()) {
    if (v == 0.0) throw DomainError("div: division by zero");
  }
  return make_op("div", a.shape(), binary_values(a, b, std::divides<>{}), {a, b},
                 [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   const Tensor& a = self.inputs()[0];
                   const Tensor& b = self.inputs()[1];
                   Tensor ga, gb;
                   if (a.requires_grad()) ga = div(g, b);
                   if (b.requires_grad()) gb = reduce_if_needed(neg(mul(g, div(self, b))), b.shape());
                   return {ga, gb};
                 });
}

Tensor scale(const Tensor& x, double factor) {
  return make_op("scale", x.shape(), unary_values(x, [factor](double v) { return v * factor; }),
                 {x}, [factor](const Tensor&, const Tensor& g) -> std::vector<Tensor> {
                   return {scale(g, factor)};
                 });
}

Tensor add_scalar(const Tensor& x, double offset) {
  return make_op("add_scalar", x.shape(),
                 unary_values(x, [offset](double v) { return v + offset; }), {x},
                 [](const Tensor&, const Tensor& g) -> std::vector<Tensor> { return {g}; });
}

Tensor neg(const Tensor& x) { return scale(x, -1.0); }

Tensor exp(const Tensor& x) {
  return make_op("exp", x.shape(), unary_values(x, [](double v) { return std::exp(v); }), {x},
                 [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   return {mul(g, self)};
                 });
}

Tensor log(const Tensor& x) {
  for (double v : x.values()) {
    if (!(v > 0.0)) throw DomainError("log: non-positive input");
  }
  return make_op("log", x.shape(), unary_values(x, [](double v) { return std::log(v); }), {x},
                 [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   return {div(g, self.inputs()[0])};
                 });
}

Tensor sqrt(const Tensor& x) {
  for (double v : x.values()) {
    if (v < 0.0) throw DomainError("sqrt: negative input");
  }
  return make_op("sqrt", x.shape(), unary_values(x, [](double v) { return std::sqrt(v); }), {x},
                 [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   return {div(g, scale(self, 2.0))};
                 });
}

Tensor square(const Tensor& x) {
  return make_op("square", x.shape(), unary_values(x, [](double v) { return v * v; }), {x},
                 [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   return {mul(g, scale(self.inputs()[0], 2.0))};
                 });
}

namespace {

void record_signs(const Tensor& x) {
  if (!BranchTrace::active()) return;
  for (double v : x.values()) BranchTrace::record(v > 0.0);
}

}  // namespace

Tensor leaky_relu(const Tensor& x, double slope) {
  record_signs(x);
  auto slopes = unary_values(x, [slope](double v) { return v > 0.0 ? 1.0 : slope; });
  auto out = binary_values(x, x, [slope](double v, double) { return v > 0.0 ? v : slope * v; });
  auto mask = Tensor::constant(x.shape(), std::move(slopes));
  return make_op("leaky_relu", x.shape(), std::move(out), {x},
                 [mask](const Tensor&, const Tensor& g) -> std::vector<Tensor> {
                   return {mul(g, mask)};
                 });
}

Tensor elu(const Tensor& x) {
  record_signs(x);
  // d/dx elu = 1 for x > 0, elu(x) + 1 otherwise.
  auto negative = Tensor::constant(x.shape(),
                                   unary_values(x, [](double v) { return v > 0.0 ? 0.0 : 1.0; }));
  return make_op("elu", x.shape(),
                 unary_values(x, [](double v) { return v > 0.0 ? v : std::expm1(v); }), {x},
                 [negative](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   return {mul(g, add_scalar(mul(self, negative), 1.0))};
                 });
}

Tensor sigmoid(const Tensor& x) {
  return make_op("sigmoid", x.shape(), unary_values(x, [](double v) {
                   return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
                 }),
                 {x}, [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   return {mul(g, mul(self, add_scalar(neg(self), 1.0)))};
                 });
}

Tensor sum(const Tensor& x) { return reduce_to(x, {}); }

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.numel())); }

Tensor sum_axis(const Tensor& x, std::size_t axis) {
  check_axis("sum_axis", x, axis);
  const auto split = split_at(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape[axis] = 1;
  std::vector<double> out(split.outer * split.inner, 0.0);
  const auto xv = x.values();
  for (std::size_t o = 0; o < split.outer; ++o) {
    for (std::size_t e = 0; e < split.extent; ++e) {
      const double* src = xv.data() + (o * split.extent + e) * split.inner;
      double* dst = out.data() + o * split.inner;
      for (std::size_t i = 0; i < split.inner; ++i) dst[i] += src[i];
    }
  }
  return make_op("sum_axis", std::move(out_shape), std::move(out), {x},
                 [axis](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   return {expand_axis(g, axis, self.inputs()[0].shape()[axis])};
                 });
}

Tensor expand_axis(const Tensor& x, std::size_t axis, std::size_t count) {
  check_axis("expand_axis", x, axis);
  if (x.shape()[axis] != 1) throw ShapeError("expand_axis: axis extent must be 1");
  Shape out_shape = x.shape();
  out_shape[axis] = count;
  const auto split = split_at(out_shape, axis);
  std::vector<double> out(numel(out_shape));
  const auto xv = x.values();
  for (std::size_t o = 0; o < split.outer; ++o) {
    for (std::size_t e = 0; e < count; ++e) {
      std::copy_n(xv.data() + o * split.inner, split.inner,
                  out.data() + (o * count + e) * split.inner);
    }
  }
  return make_op("expand_axis", std::move(out_shape), std::move(out), {x},
                 [axis](const Tensor&, const Tensor& g) -> std::vector<Tensor> {
                   return {sum_axis(g, axis)};
                 });
}

Tensor reduce_to(const Tensor& x, const Shape& shape) {
  if (!is_suffix(x.shape(), shape)) {
    throw ShapeError("reduce_to: " + to_string(shape) + " is not a suffix of " +
                     to_string(x.shape()));
  }
  const std::size_t inner = numel(shape);
  std::vector<double> out(inner, 0.0);
  const auto xv = x.values();
  for (std::size_t i = 0; i < xv.size(); ++i) out[i % inner] += xv[i];
  return make_op("reduce_to", shape, std::move(out), {x},
                 [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   return {expand_to(g, self.inputs()[0].shape())};
                 });
}

Tensor expand_to(const Tensor& x, const Shape& shape) {
  if (!is_suffix(shape, x.shape())) {
    throw ShapeError("expand_to: " + to_string(x.shape()) + " is not a suffix of " +
                     to_string(shape));
  }
  std::vector<double> out(numel(shape));
  const auto xv = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i % xv.size()];
  return make_op("expand_to", shape, std::move(out), {x},
                 [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   return {reduce_to(g, self.inputs()[0].shape())};
                 });
}

Tensor softmax(const Tensor& x) {
  if (x.rank() == 0) throw ShapeError("softmax: needs rank >= 1");
  const std::size_t n = x.shape().back();
  const auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t r = 0; r < xv.size() / n; ++r) {
    const double* src = xv.data() + r * n;
    double* dst = out.data() + r * n;
    const double top = *std::max_element(src, src + n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += dst[i] = std::exp(src[i] - top);
    for (std::size_t i = 0; i < n; ++i) dst[i] /= total;
  }
  return make_op("softmax", x.shape(), std::move(out), {x},
                 [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                   const std::size_t last = self.rank() - 1;
                   Tensor gy = mul(g, self);
                   return {sub(gy, mul(self, expand_axis(sum_axis(gy, last), last,
                                                         self.shape().back())))};
                 });
}

Tensor max_pool1d(const Tensor& x, std::size_t width, std::size_t stride, std::size_t pad) {
  if (x.rank() != 3) throw ShapeError("max_pool1d: expects [B, T, C], got " + to_string(x.shape()));
  if (width == 0 || stride == 0) throw ShapeError("max_pool1d: width and stride must be positive");
  const std::size_t batch = x.shape()[0], t = x.shape()[1], c = x.shape()[2];
  if (t + 2 * pad < width) throw ShapeError("max_pool1d: window wider than padded input");
  const std::size_t t_out = (t + 2 * pad - width) / stride + 1;
  const auto xv = x.values();
  auto index = std::make_shared<std::vector<std::int64_t>>(batch * t_out * c, -1);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < t_out; ++o) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        std::int64_t best = -1;
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t w = 0; w < width; ++w) {
          const auto pos = static_cast<std::int64_t>(o * stride + w) - static_cast<std::int64_t>(pad);
          if (pos < 0 || pos >= static_cast<std::int64_t>(t)) continue;
          const auto flat = static_cast<std::int64_t>((b * t + static_cast<std::size_t>(pos)) * c + ch);
          if (best < 0 || xv[static_cast<std::size_t>(flat)] > best_value) {
            best = flat;
            best_value = xv[static_cast<std::size_t>(flat)];
          }
        }
        (*index)[(b * t_out + o) * c + ch] = best;
        BranchTrace::record(static_cast<std::uint64_t>(best));
      }
    }
  }
  return gather(x, {batch, t_out, c}, std::move(index));
}

Tensor conv1d(const Tensor& x, const Tensor& kernel, std::size_t stride, std::size_t pad) {
  if (x.rank() != 3) throw ShapeError("conv1d: expects [B, T, C], got " + to_string(x.shape()));
  if (kernel.rank() != 2) throw ShapeError("conv1d: kernel must be rank 2");
  const std::size_t batch = x.shape()[0], t = x.shape()[1], c = x.shape()[2];
  if (stride == 0 || kernel.shape()[0] % c != 0) {
    throw ShapeError("conv1d: kernel rows " + std::to_string(kernel.shape()[0]) +
                     " not a multiple of input depth " + std::to_string(c));
  }
  const std::size_t width = kernel.shape()[0] / c;
  if (t + 2 * pad < width) throw ShapeError("conv1d: kernel wider than padded input");
  const std::size_t t_out = (t + 2 * pad - width) / stride + 1;
  auto index = std::make_shared<std::vector<std::int64_t>>();
  index->reserve(batch * t_out * width * c);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < t_out; ++o) {
      for (std::size_t w = 0; w < width; ++w) {
        const auto pos = static_cast<std::int64_t>(o * stride + w) - static_cast<std::int64_t>(pad);
        for (std::size_t ch = 0; ch < c; ++ch) {
          index->push_back(pos < 0 || pos >= static_cast<std::int64_t>(t)
                               ? -1
                               : static_cast<std::int64_t>((b * t + static_cast<std::size_t>(pos)) * c + ch));
        }
      }
    }
  }
  Tensor columns = gather(x, {batch, t_out, width * c}, std::move(index));
  return matmul(columns, kernel);
}

}  // namespace tsgan
