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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tsgan/nn.hpp"
#include "tsgan/ops.hpp"

namespace tsgan::nn {

namespace {

constexpr double kRopeBase = 10000.0;
constexpr double kCubicA = -0.5;

void require_rank3(const char* op, const Tensor& x) {
  if (x.rank() != 3) {
    throw ShapeError(std::string(op) + ": expected [B, T, D], got " + to_string(x.shape()));
  }
}

double cubic_weight(double distance) {
  const double x = std::abs(distance);
  if (x <= 1.0) return ((kCubicA + 2.0) * x - (kCubicA + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((kCubicA * x - 5.0 * kCubicA) * x + 8.0 * kCubicA) * x - 4.0 * kCubicA;
  return 0.0;
}

}  // namespace

Tensor rope_rotate(const Tensor& qk, std::span<const std::size_t> positions) {
  require_rank3("rope_rotate", qk);
  const std::size_t t = qk.shape()[1], dh = qk.shape()[2];
  if (dh % 2 != 0) throw ShapeError("rope_rotate: head width must be even");
  if (positions.size() != t) throw ShapeError("rope_rotate: one position per token required");

  std::vector<double> cosines(t * dh), sines(t * dh);
  for (std::size_t ti = 0; ti < t; ++ti) {
    for (std::size_t i = 0; i < dh / 2; ++i) {
      const double freq = std::pow(kRopeBase, -2.0 * static_cast<double>(i) / static_cast<double>(dh));
      const double angle = static_cast<double>(positions[ti]) * freq;
      const double c = std::cos(angle), s = std::sin(angle);
      cosines[ti * dh + 2 * i] = c;
      cosines[ti * dh + 2 * i + 1] = c;
      sines[ti * dh + 2 * i] = -s;
      sines[ti * dh + 2 * i + 1] = s;
    }
  }
  // swapped[2i] = x[2i+1], swapped[2i+1] = x[2i]
  auto swap = std::make_shared<std::vector<std::int64_t>>(qk.numel());
  for (std::size_t j = 0; j < qk.numel(); ++j) {
    (*swap)[j] = static_cast<std::int64_t>(j % 2 == 0 ? j + 1 : j - 1);
  }
  Tensor swapped = gather(qk, qk.shape(), std::move(swap));
  return add(mul(qk, Tensor::constant({t, dh}, std::move(cosines))),
             mul(swapped, Tensor::constant({t, dh}, std::move(sines))));
}

Tensor rope_rotate(const Tensor& qk) {
  require_rank3("rope_rotate", qk);
  std::vector<std::size_t> positions(qk.shape()[1]);
  std::iota(positions.begin(), positions.end(), 0);
  return rope_rotate(qk, positions);
}

Tensor lape_add(const Tensor& x, const Tensor& table) {
  require_rank3("lape_add", x);
  if (table.shape() != Shape{x.shape()[1], x.shape()[2]}) {
    throw ShapeError("lape_add: table " + to_string(table.shape()) + " does not match " +
                     to_string(x.shape()));
  }
  return add(x, table);
}

Tensor instance_norm(const Tensor& x, const NormWeights& w, double eps) {
  require_rank3("instance_norm", x);
  const std::size_t t = x.shape()[1];
  if (t < 2) throw ShapeError("instance_norm: needs at least two time steps");
  const double inv_t = 1.0 / static_cast<double>(t);
  Tensor centred = sub(x, expand_axis(scale(sum_axis(x, 1), inv_t), 1, t));
  Tensor variance = scale(sum_axis(square(centred), 1), inv_t);
  Tensor normalised = div(centred, expand_axis(sqrt(add_scalar(variance, eps)), 1, t));
  return add(mul(normalised, w.gain), w.bias);
}

Tensor encoder_block(const Tensor& x, const BlockParams& p, const EncoderWeights& w,
                     std::uint64_t rng_seed) {
  Tensor y = add(x, attention(instance_norm(x, w.norm_attn, p.norm_eps), p, w.attn, rng_seed));
  Tensor hidden = elu(linear(instance_norm(y, w.norm_ffn, p.norm_eps), w.ffn_in));
  return add(y, linear(hidden, w.ffn_out));
}

Tensor patch_embed(const Tensor& window, std::size_t patch_len, const LinearWeights& w) {
  require_rank3("patch_embed", window);
  const std::size_t b = window.shape()[0], t = window.shape()[1], d = window.shape()[2];
  if (patch_len == 0 || t % patch_len != 0) {
    throw ShapeError("patch_embed: patch length " + std::to_string(patch_len) +
                     " does not divide T = " + std::to_string(t));
  }
  return linear(reshape(window, {b, t / patch_len, patch_len * d}), w);
}

Tensor distill_halve(const Tensor& x, const DistillWeights& w) {
  require_rank3("distill_halve", x);
  const std::size_t t = x.shape()[1];
  if (t < 2 || t % 2 != 0) {
    throw ShapeError("distill_halve: T must be even and >= 2, got " + std::to_string(t));
  }
  Tensor conv = add(conv1d(x, w.kernel, 1, 1), w.bias);
  return max_pool1d(elu(conv), 3, 2, 1);
}

std::vector<double> bicubic_matrix(std::size_t t) {
  std::vector<double> a(2 * t * t, 0.0);
  const auto last = static_cast<long>(t) - 1;
  for (std::size_t j = 0; j < 2 * t; ++j) {
    const double source = (static_cast<double>(j) + 0.5) / 2.0 - 0.5;
    const double base = std::floor(source);
    const double frac = source - base;
    for (int m = -1; m <= 2; ++m) {
      const long idx = std::clamp(static_cast<long>(base) + m, 0L, last);
      a[j * t + static_cast<std::size_t>(idx)] += cubic_weight(static_cast<double>(m) - frac);
    }
  }
  return a;
}

Tensor upsample_bicubic(const Tensor& x) {
  require_rank3("upsample_bicubic", x);
  const std::size_t t = x.shape()[1];
  if (t < 2) throw ShapeError("upsample_bicubic: needs at least two time steps");
  const auto a = bicubic_matrix(t);
  std::vector<double> at(a.size());
  for (std::size_t j = 0; j < 2 * t; ++j) {
    for (std::size_t i = 0; i < t; ++i) at[i * 2 * t + j] = a[j * t + i];
  }
  // [B, D, T] x [T, 2T] -> [B, D, 2T]
  return transpose(matmul(transpose(x), Tensor::constant({t, 2 * t}, std::move(at))));
}

Tensor pixel_shuffle(const Tensor& x) {
  require_rank3("pixel_shuffle", x);
  const std::size_t b = x.shape()[0], t = x.shape()[1], d = x.shape()[2];
  if (d % 2 != 0) throw ShapeError("pixel_shuffle: depth must be even, got " + std::to_string(d));
  const std::size_t half = d / 2;
  auto index = std::make_shared<std::vector<std::int64_t>>(x.numel());
  for (std::size_t bi = 0; bi < b; ++bi) {
    for (std::size_t ti = 0; ti < t; ++ti) {
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t di = 0; di < half; ++di) {
          const std::size_t out = ((bi * 2 * t) + 2 * ti + i) * half + di;
          (*index)[out] = static_cast<std::int64_t>((bi * t + ti) * d + 2 * di + i);
        }
      }
    }
  }
  return gather(x, {b, 2 * t, half}, std::move(index));
}

Tensor pixel_unshuffle(const Tensor& x) {
  require_rank3("pixel_unshuffle", x);
  const std::size_t b = x.shape()[0], t = x.shape()[1], d = x.shape()[2];
  if (t % 2 != 0) throw ShapeError("pixel_unshuffle: T must be even, got " + std::to_string(t));
  const std::size_t half_t = t / 2;
  auto index = std::make_shared<std::vector<std::int64_t>>(x.numel());
  for (std::size_t bi = 0; bi < b; ++bi) {
    for (std::size_t ti = 0; ti < half_t; ++ti) {
      for (std::size_t di = 0; di < d; ++di) {
        for (std::size_t i = 0; i < 2; ++i) {
          const std::size_t out = (bi * half_t + ti) * 2 * d + 2 * di + i;
          (*index)[out] = static_cast<std::int64_t>((bi * t + 2 * ti + i) * d + di);
        }
      }
    }
  }
  return gather(x, {b, half_t, 2 * d}, std::move(index));
}

}  // namespace tsgan::nn
