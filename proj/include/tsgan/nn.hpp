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
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsgan/tensor.hpp"

// Transformer building blocks on [B, T, D] tensors: positional schemes,
// instance norm, canonical / grid / probabilistic-sparse attention, the
// pre-norm encoder block, patch embedding, distillation and the two temporal
// up-scaling operators.

namespace tsgan::nn {

using Rng = std::mt19937_64;

/// Ordered name -> leaf tensor registry. Blocks hold handles to the same
/// leaves, so optimizer updates through the registry are visible to them.
class ParameterSet {
 public:
  Tensor add(std::string name, Tensor leaf);
  const Tensor* find(const std::string& name) const;
  std::span<const std::pair<std::string, Tensor>> entries() const { return entries_; }
  std::vector<Tensor> tensors() const;
  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
};

struct LinearWeights {
  Tensor weight;  // [in, out]
  Tensor bias;    // [out]
};

/// Xavier-uniform weight, zero bias.
LinearWeights init_linear(ParameterSet& params, const std::string& name, std::size_t in,
                          std::size_t out, Rng& rng);
Tensor linear(const Tensor& x, const LinearWeights& w);

enum class AttentionKind { canonical, grid, psa };

struct BlockParams {
  std::size_t d_model = 64;
  std::size_t n_heads = 4;
  std::size_t ffn_mult = 4;
  AttentionKind attn_kind = AttentionKind::canonical;
  std::size_t partition_len = 0;  // grid only
  double psa_factor = 5.0;        // psa only
  double norm_eps = 1e-5;         // instance norm inside the encoder

  /// Throws std::invalid_argument on d_model % n_heads != 0 or odd head width.
  void validate() const;
  std::size_t head_dim() const { return d_model / n_heads; }
};

struct NormWeights {
  Tensor gain;  // [D]
  Tensor bias;  // [D]
};

struct AttentionWeights {
  LinearWeights query, key, value, output;
};

struct EncoderWeights {
  NormWeights norm_attn;
  AttentionWeights attn;
  NormWeights norm_ffn;
  LinearWeights ffn_in, ffn_out;
};

struct DistillWeights {
  Tensor kernel;  // [3 * d, d], tap-major
  Tensor bias;    // [d]
};

NormWeights init_norm(ParameterSet& params, const std::string& name, std::size_t d);
AttentionWeights init_attention(ParameterSet& params, const std::string& name, std::size_t d,
                                Rng& rng);
EncoderWeights init_encoder(ParameterSet& params, const std::string& name, const BlockParams& p,
                            Rng& rng);
DistillWeights init_distill(ParameterSet& params, const std::string& name, std::size_t d, Rng& rng);
/// Learned absolute positional table [T, D], N(0, 0.02^2).
Tensor init_lape(ParameterSet& params, const std::string& name, std::size_t t, std::size_t d,
                 Rng& rng);

// --- positional schemes ---------------------------------------------------

/// Rotates feature pairs (2i, 2i+1) of every token by pos * 10000^(-2i/d_head).
/// qk is [B, T, d_head]; positions has length T.
Tensor rope_rotate(const Tensor& qk, std::span<const std::size_t> positions);
/// Positions 0..T-1.
Tensor rope_rotate(const Tensor& qk);

/// Adds a learned [T, D] table to every batch entry.
Tensor lape_add(const Tensor& x, const Tensor& table);

// --- normalisation ----------------------------------------------------------

/// Per sample and channel: subtract the mean over time, divide by
/// sqrt(var + eps), then apply the per-channel affine.
Tensor instance_norm(const Tensor& x, const NormWeights& w, double eps = 1e-5);

// --- attention --------------------------------------------------------------

/// [B, T, d] -> [B * heads, T, d / heads]
Tensor split_heads(const Tensor& x, std::size_t heads);
/// Inverse of split_heads.
Tensor merge_heads(const Tensor& x, std::size_t heads);

Tensor attention_canonical(const Tensor& x, const BlockParams& p, const AttentionWeights& w);
/// Canonical attention run independently inside consecutive partitions of
/// p.partition_len tokens, all partitions sharing one weight set.
Tensor attention_grid(const Tensor& x, const BlockParams& p, const AttentionWeights& w);

/// Query selection made by probabilistic sparse attention for one call.
struct PsaSelection {
  std::size_t sample_keys = 0;     // U
  std::size_t active_queries = 0;  // u
  /// Per (batch * head) slice, the active query rows in ascending order.
  std::vector<std::vector<std::size_t>> active;
};

/// Per head: each query scores max - mean of its scaled dot products against
/// U = min(T, ceil(c ln T)) uniformly sampled keys; the top u = min(T,
/// ceil(c ln T)) queries get full attention, the rest output the mean of V.
Tensor attention_psa(const Tensor& x, const BlockParams& p, const AttentionWeights& w,
                     std::uint64_t rng_seed, PsaSelection* selection = nullptr);

/// Dispatches on p.attn_kind.
Tensor attention(const Tensor& x, const BlockParams& p, const AttentionWeights& w,
                 std::uint64_t rng_seed = 0);

/// Pre-norm encoder: y = x + Attn(IN(x)); z = y + FFN(IN(y)), FFN with ELU.
Tensor encoder_block(const Tensor& x, const BlockParams& p, const EncoderWeights& w,
                     std::uint64_t rng_seed = 0);

// --- patching, distillation, scaling ----------------------------------------

/// Non-overlapping patches of patch_len steps flattened and projected:
/// [B, T, D] -> [B, T / patch_len, d_model]. w maps patch_len * D -> d_model.
Tensor patch_embed(const Tensor& window, std::size_t patch_len, const LinearWeights& w);

/// conv1d(width 3, pad 1) -> ELU -> max-pool(width 3, stride 2, pad 1).
Tensor distill_halve(const Tensor& x, const DistillWeights& w);

/// Keys cubic convolution (a = -0.5), half-pixel centres, edge replication;
/// doubles T.
Tensor upsample_bicubic(const Tensor& x);
/// The [2T, T] interpolation matrix used by upsample_bicubic.
std::vector<double> bicubic_matrix(std::size_t t);

/// out[b, 2t + i, d] = in[b, t, 2d + i]
Tensor pixel_shuffle(const Tensor& x);
Tensor pixel_unshuffle(const Tensor& x);

}  // namespace tsgan::nn
