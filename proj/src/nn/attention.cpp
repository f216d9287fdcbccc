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
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tsgan/nn.hpp"
#include "tsgan/ops.hpp"

namespace tsgan::nn {

namespace {

void require_tokens(const char* op, const Tensor& x, const BlockParams& p) {
  if (x.rank() != 3 || x.shape()[2] != p.d_model) {
    throw ShapeError(std::string(op) + ": expected [B, T, " + std::to_string(p.d_model) +
                     "], got " + to_string(x.shape()));
  }
}

struct Heads {
  Tensor query, key, value;
};

Heads project_heads(const Tensor& x, const BlockParams& p, const AttentionWeights& w) {
  return {rope_rotate(split_heads(linear(x, w.query), p.n_heads)),
          rope_rotate(split_heads(linear(x, w.key), p.n_heads)),
          split_heads(linear(x, w.value), p.n_heads)};
}

Tensor scaled_scores(const Tensor& q, const Tensor& k) {
  const double inv = 1.0 / std::sqrt(static_cast<double>(q.shape()[2]));
  return softmax(scale(matmul(q, transpose(k)), inv));
}

std::size_t log_budget(double factor, std::size_t t) {
  const double raw = std::ceil(factor * std::log(static_cast<double>(t)));
  const auto budget = static_cast<std::size_t>(std::max(raw, 1.0));
  return std::min(t, budget);
}

}  // namespace

Tensor split_heads(const Tensor& x, std::size_t heads) {
  const std::size_t b = x.shape()[0], t = x.shape()[1], d = x.shape()[2];
  const std::size_t dh = d / heads;
  auto index = std::make_shared<std::vector<std::int64_t>>(x.numel());
  std::size_t o = 0;
  for (std::size_t bi = 0; bi < b; ++bi) {
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t ti = 0; ti < t; ++ti) {
        for (std::size_t e = 0; e < dh; ++e) {
          (*index)[o++] = static_cast<std::int64_t>((bi * t + ti) * d + h * dh + e);
        }
      }
    }
  }
  return gather(x, {b * heads, t, dh}, std::move(index));
}

Tensor merge_heads(const Tensor& x, std::size_t heads) {
  const std::size_t s = x.shape()[0], t = x.shape()[1], dh = x.shape()[2];
  const std::size_t b = s / heads, d = dh * heads;
  auto index = std::make_shared<std::vector<std::int64_t>>(x.numel());
  std::size_t o = 0;
  for (std::size_t bi = 0; bi < b; ++bi) {
    for (std::size_t ti = 0; ti < t; ++ti) {
      for (std::size_t h = 0; h < heads; ++h) {
        for (std::size_t e = 0; e < dh; ++e) {
          (*index)[o++] = static_cast<std::int64_t>(((bi * heads + h) * t + ti) * dh + e);
        }
      }
    }
  }
  return gather(x, {b, t, d}, std::move(index));
}

Tensor attention_canonical(const Tensor& x, const BlockParams& p, const AttentionWeights& w) {
  p.validate();
  require_tokens("attention_canonical", x, p);
  auto heads = project_heads(x, p, w);
  Tensor context = matmul(scaled_scores(heads.query, heads.key), heads.value);
  return linear(merge_heads(context, p.n_heads), w.output);
}

Tensor attention_grid(const Tensor& x, const BlockParams& p, const AttentionWeights& w) {
  require_tokens("attention_grid", x, p);
  const std::size_t b = x.shape()[0], t = x.shape()[1], d = x.shape()[2];
  const std::size_t len = p.partition_len;
  if (len == 0 || t % len != 0) {
    throw ShapeError("attention_grid: partition length " + std::to_string(len) +
                     " does not divide T = " + std::to_string(t));
  }
  // Row-major [B, T, d] is already [B * T/len, len, d] partition-major.
  Tensor parts = reshape(x, {b * (t / len), len, d});
  return reshape(attention_canonical(parts, p, w), {b, t, d});
}

Tensor attention_psa(const Tensor& x, const BlockParams& p, const AttentionWeights& w,
                     std::uint64_t rng_seed, PsaSelection* selection) {
  p.validate();
  require_tokens("attention_psa", x, p);
  const std::size_t t = x.shape()[1];
  const std::size_t dh = p.head_dim();
  auto heads = project_heads(x, p, w);
  const std::size_t slices = heads.query.shape()[0];

  const std::size_t sample_keys = log_budget(p.psa_factor, t);
  const std::size_t active_queries = log_budget(p.psa_factor, t);
  const double inv = 1.0 / std::sqrt(static_cast<double>(dh));

  Rng rng(rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, t - 1);
  const auto qv = heads.query.values();
  const auto kv = heads.key.values();

  std::vector<std::vector<std::size_t>> active(slices);
  std::vector<double> sparsity(t);
  std::vector<std::size_t> order(t);
  for (std::size_t s = 0; s < slices; ++s) {
    for (std::size_t i = 0; i < t; ++i) {
      const double* q = qv.data() + (s * t + i) * dh;
      double top = -std::numeric_limits<double>::infinity();
      double total = 0.0;
      for (std::size_t n = 0; n < sample_keys; ++n) {
        const double* k = kv.data() + (s * t + pick(rng)) * dh;
        double dot = 0.0;
        for (std::size_t e = 0; e < dh; ++e) dot += q[e] * k[e];
        dot *= inv;
        top = std::max(top, dot);
        total += dot;
      }
      sparsity[i] = top - total / static_cast<double>(sample_keys);
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sparsity[a] > sparsity[b]; });
    active[s].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(active_queries));
    std::sort(active[s].begin(), active[s].end());
    for (std::size_t r : active[s]) BranchTrace::record(r);
  }

  auto rows = std::make_shared<std::vector<std::int64_t>>();
  rows->reserve(slices * active_queries * dh);
  std::vector<double> idle(slices * t * dh, 1.0);
  for (std::size_t s = 0; s < slices; ++s) {
    for (std::size_t r : active[s]) {
      for (std::size_t e = 0; e < dh; ++e) {
        const std::size_t flat = (s * t + r) * dh + e;
        rows->push_back(static_cast<std::int64_t>(flat));
        idle[flat] = 0.0;
      }
    }
  }

  Tensor chosen = gather(heads.query, {slices, active_queries, dh}, rows);
  Tensor context_active = matmul(scaled_scores(chosen, heads.key), heads.value);
  Tensor context = scatter_add(context_active, {slices, t, dh}, rows);
  if (active_queries < t) {
    Tensor value_mean =
        expand_axis(scale(sum_axis(heads.value, 1), 1.0 / static_cast<double>(t)), 1, t);
    context = add(context, mul(value_mean, Tensor::constant({slices, t, dh}, std::move(idle))));
  }

  if (selection) {
    selection->sample_keys = sample_keys;
    selection->active_queries = active_queries;
    selection->active = std::move(active);
  }
  return linear(merge_heads(context, p.n_heads), w.output);
}

Tensor attention(const Tensor& x, const BlockParams& p, const AttentionWeights& w,
                 std::uint64_t rng_seed) {
  switch (p.attn_kind) {
    case AttentionKind::canonical:
      return attention_canonical(x, p, w);
    case AttentionKind::grid:
      return attention_grid(x, p, w);
    case AttentionKind::psa:
      return attention_psa(x, p, w, rng_seed);
  }
  throw std::invalid_argument("unknown attention kind");
}

}  // namespace tsgan::nn
