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

#include <cmath>
#include <stdexcept>

#include "tsgan/nn.hpp"
#include "tsgan/ops.hpp"

namespace tsgan::nn {

Tensor ParameterSet::add(std::string name, Tensor leaf) {
  if (find(name)) throw std::invalid_argument("duplicate parameter name " + name);
  entries_.emplace_back(std::move(name), leaf);
  return leaf;
}

const Tensor* ParameterSet::find(const std::string& name) const {
  for (const auto& [n, t] : entries_) {
    if (n == name) return &t;
  }
  return nullptr;
}

std::vector<Tensor> ParameterSet::tensors() const {
  std::vector<Tensor> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.second);
  return out;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second.numel();
  return n;
}

void BlockParams::validate() const {
  if (d_model == 0 || n_heads == 0 || d_model % n_heads != 0) {
    throw std::invalid_argument("d_model " + std::to_string(d_model) +
                                " is not divisible by n_heads " + std::to_string(n_heads));
  }
  if (head_dim() % 2 != 0) {
    throw std::invalid_argument("head width " + std::to_string(head_dim()) +
                                " must be even for rotary embedding");
  }
  if (ffn_mult == 0) throw std::invalid_argument("ffn_mult must be positive");
  if (!(norm_eps > 0.0)) throw std::invalid_argument("norm_eps must be positive");
  if (attn_kind == AttentionKind::psa && !(psa_factor > 0.0)) {
    throw std::invalid_argument("psa_factor must be positive");
  }
}

LinearWeights init_linear(ParameterSet& params, const std::string& name, std::size_t in,
                          std::size_t out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> w(in * out);
  for (auto& v : w) v = dist(rng);
  return {params.add(name + ".weight", Tensor::parameter({in, out}, std::move(w))),
          params.add(name + ".bias", Tensor::parameter({out}, std::vector<double>(out, 0.0)))};
}

Tensor linear(const Tensor& x, const LinearWeights& w) { return add(matmul(x, w.weight), w.bias); }

NormWeights init_norm(ParameterSet& params, const std::string& name, std::size_t d) {
  return {params.add(name + ".gain", Tensor::parameter({d}, std::vector<double>(d, 1.0))),
          params.add(name + ".bias", Tensor::parameter({d}, std::vector<double>(d, 0.0)))};
}

AttentionWeights init_attention(ParameterSet& params, const std::string& name, std::size_t d,
                                Rng& rng) {
  AttentionWeights w;
  w.query = init_linear(params, name + ".query", d, d, rng);
  w.key = init_linear(params, name + ".key", d, d, rng);
  w.value = init_linear(params, name + ".value", d, d, rng);
  w.output = init_linear(params, name + ".output", d, d, rng);
  return w;
}

EncoderWeights init_encoder(ParameterSet& params, const std::string& name, const BlockParams& p,
                            Rng& rng) {
  p.validate();
  EncoderWeights w;
  w.norm_attn = init_norm(params, name + ".norm_attn", p.d_model);
  w.attn = init_attention(params, name + ".attn", p.d_model, rng);
  w.norm_ffn = init_norm(params, name + ".norm_ffn", p.d_model);
  w.ffn_in = init_linear(params, name + ".ffn_in", p.d_model, p.ffn_mult * p.d_model, rng);
  w.ffn_out = init_linear(params, name + ".ffn_out", p.ffn_mult * p.d_model, p.d_model, rng);
  return w;
}

DistillWeights init_distill(ParameterSet& params, const std::string& name, std::size_t d,
                            Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(4 * d));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> k(3 * d * d);
  for (auto& v : k) v = dist(rng);
  return {params.add(name + ".kernel", Tensor::parameter({3 * d, d}, std::move(k))),
          params.add(name + ".bias", Tensor::parameter({d}, std::vector<double>(d, 0.0)))};
}

Tensor init_lape(ParameterSet& params, const std::string& name, std::size_t t, std::size_t d,
                 Rng& rng) {
  std::normal_distribution<double> dist(0.0, 0.02);
  std::vector<double> v(t * d);
  for (auto& x : v) x = dist(rng);
  return params.add(name, Tensor::parameter({t, d}, std::move(v)));
}

}  // namespace tsgan::nn
