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

#include <bit>
#include <stdexcept>
#include <string>

#include "tsgan/gan.hpp"
#include "tsgan/ops.hpp"

namespace tsgan::gan {

namespace {

constexpr double kHeadSlope = 0.2;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

bool power_of_two(std::size_t v) { return v != 0 && std::has_single_bit(v); }

nn::BlockParams block_params(std::size_t d, std::size_t heads, std::size_t ffn_mult,
                             double norm_eps) {
  nn::BlockParams p;
  p.norm_eps = norm_eps;
  p.d_model = d;
  p.n_heads = heads;
  p.ffn_mult = ffn_mult;
  return p;
}

std::uint64_t stage_seed(std::uint64_t seed, std::size_t stage) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (stage + 1));
}

Tensor head(const Tensor& features, const nn::LinearWeights& hidden, const nn::LinearWeights& out) {
  return nn::linear(leaky_relu(nn::linear(features, hidden), kHeadSlope), out);
}

}  // namespace

// --- configs ----------------------------------------------------------------

std::size_t GeneratorConfig::n_stages() const {
  return static_cast<std::size_t>(std::countr_zero(t_target) - std::countr_zero(t_seed));
}

void GeneratorConfig::validate() const {
  require(noise_dim > 0 && label_proj_dim > 0 && label_dim > 0 && d_out > 0,
          "generator: noise_dim, label_proj_dim, label_dim and d_out must be positive");
  require(power_of_two(t_seed) && t_seed >= 2, "generator: t_seed must be a power of two >= 2");
  require(power_of_two(t_target) && t_target >= t_seed,
          "generator: t_target must be a power of two >= t_seed");
  require(shuffle_threshold > 0 && ga_threshold > 0, "generator: thresholds must be positive");
  for (const auto& s : generator_schedule(*this)) {
    if (s.t == t_target) break;
    const auto p = block_params(s.d, n_heads, ffn_mult, norm_eps);
    p.validate();
    if (s.t > ga_threshold) {
      require(s.t % ga_threshold == 0, "generator: ga_threshold " + std::to_string(ga_threshold) +
                                           " does not divide T = " + std::to_string(s.t));
    }
    if (s.t >= shuffle_threshold) {
      require(s.d % 2 == 0,
              "generator: depth " + std::to_string(s.d) + " is odd before a shuffle stage");
    }
  }
}

std::vector<StageShape> generator_schedule(const GeneratorConfig& cfg) {
  std::vector<StageShape> out{{cfg.t_seed, cfg.d_seed}};
  for (std::size_t t = cfg.t_seed, d = cfg.d_seed; t < cfg.t_target;) {
    if (t >= cfg.shuffle_threshold) d /= 2;
    t *= 2;
    out.push_back({t, d});
  }
  return out;
}

std::size_t CriticConfig::n_stages() const {
  return static_cast<std::size_t>(std::countr_zero(t) - std::countr_zero(patch_len0));
}

void CriticConfig::validate() const {
  require(power_of_two(t), "critic: T must be a power of two, got " + std::to_string(t));
  require(power_of_two(patch_len0) && patch_len0 < t,
          "critic: patch_len0 must be a power of two below T");
  require(d_in > 0 && d_inject > 0 && head_hidden > 0 && label_dim > 0,
          "critic: d_in, d_inject, head_hidden and label_dim must be positive");
  auto p = block_params(d_model, n_heads, ffn_mult, norm_eps);
  p.attn_kind = nn::AttentionKind::psa;
  p.psa_factor = psa_factor;
  p.validate();
}

std::vector<double> LossConfig::weights_for(std::size_t label_dim) const {
  return label_weights.empty() ? std::vector<double>(label_dim, 1.0) : label_weights;
}

void LossConfig::validate(std::size_t label_dim) const {
  require(lambda_gp >= 0.0 && lambda_label >= 0.0, "loss: lambdas must be >= 0");
  require(smoothing_eps >= 0.0 && smoothing_eps < 1.0, "loss: smoothing_eps must lie in [0, 1)");
  require(n_critic >= 1, "loss: n_critic must be >= 1");
  require(lr > 0.0 && beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
          "loss: Adam needs lr > 0 and betas in [0, 1)");
  require(label_weights.empty() || label_weights.size() == label_dim,
          "loss: label_weights needs " + std::to_string(label_dim) + " entries");
  for (double w : label_weights) require(w >= 0.0, "loss: label weights must be >= 0");
}

void GanConfig::validate() const {
  generator.validate();
  critic.validate();
  loss.validate(critic.label_dim);
  require(generator.label_dim == critic.label_dim, "generator and critic label_dim differ");
  require(generator.t_target == critic.t, "generator t_target differs from critic T");
  require(generator.d_out == critic.d_in, "generator d_out differs from critic d_in");
  require(onehot_dim >= 1 && onehot_dim <= critic.label_dim && critic.label_dim - onehot_dim <= 1,
          "label layout must be one-hot plus at most one lifetime entry");
  require(batch_size >= 1, "batch_size must be >= 1");
}

// --- generator --------------------------------------------------------------

Generator::Generator(const GeneratorConfig& config, Rng& rng) : cfg(config) {
  cfg.validate();
  label_proj = nn::init_linear(params, "gen.label_proj", cfg.label_dim, cfg.label_proj_dim, rng);
  seed_proj = nn::init_linear(params, "gen.seed_proj", cfg.noise_dim + cfg.label_proj_dim,
                              cfg.t_seed * cfg.d_seed, rng);
  const auto schedule = generator_schedule(cfg);
  for (std::size_t i = 0; i + 1 < schedule.size(); ++i) {
    const auto [t, d] = schedule[i];
    const std::string name = "gen.stage" + std::to_string(i);
    Stage s;
    s.block = block_params(d, cfg.n_heads, cfg.ffn_mult, cfg.norm_eps);
    if (t > cfg.ga_threshold) {
      s.block.attn_kind = nn::AttentionKind::grid;
      s.block.partition_len = cfg.ga_threshold;
    }
    s.shuffle = t >= cfg.shuffle_threshold;
    s.lape_in = nn::init_lape(params, name + ".lape_in", t, d, rng);
    s.encoder = nn::init_encoder(params, name + ".encoder", s.block, rng);
    s.lape_out = nn::init_lape(params, name + ".lape_out", schedule[i + 1].t, schedule[i + 1].d, rng);
    stages.push_back(std::move(s));
  }
  output = nn::init_linear(params, "gen.output", schedule.back().d, cfg.d_out, rng);
}

Tensor condition_embed(const Generator& g, const Tensor& noise, const Tensor& labels) {
  const auto& cfg = g.cfg;
  if (noise.rank() != 2 || noise.shape()[1] != cfg.noise_dim || labels.rank() != 2 ||
      labels.shape()[1] != cfg.label_dim || labels.shape()[0] != noise.shape()[0]) {
    throw ShapeError("condition_embed: expected noise [B, " + std::to_string(cfg.noise_dim) +
                     "] and labels [B, " + std::to_string(cfg.label_dim) + "], got " +
                     to_string(noise.shape()) + " and " + to_string(labels.shape()));
  }
  const Tensor parts[] = {noise, nn::linear(labels, g.label_proj)};
  Tensor seed = nn::linear(concat(parts, 1), g.seed_proj);
  return reshape(seed, {noise.shape()[0], cfg.t_seed, cfg.d_seed});
}

Tensor generator_forward(const Generator& g, const Tensor& noise, const Tensor& labels,
                         std::vector<StageShape>* trace) {
  Tensor x = condition_embed(g, noise, labels);
  auto record = [&] {
    if (trace) trace->push_back({x.shape()[1], x.shape()[2]});
  };
  if (trace) trace->clear();
  record();
  for (const auto& s : g.stages) {
    x = nn::lape_add(x, s.lape_in);
    x = nn::encoder_block(x, s.block, s.encoder);
    x = s.shuffle ? nn::pixel_shuffle(x) : nn::upsample_bicubic(x);
    x = nn::lape_add(x, s.lape_out);
    record();
  }
  return nn::linear(x, g.output);
}

// --- critic -----------------------------------------------------------------

Critic::Critic(const CriticConfig& config, Rng& rng) : cfg(config) {
  cfg.validate();
  block = block_params(cfg.d_model, cfg.n_heads, cfg.ffn_mult, cfg.norm_eps);
  block.attn_kind = nn::AttentionKind::psa;
  block.psa_factor = cfg.psa_factor;

  embed = nn::init_linear(params, "critic.embed", cfg.patch_len0 * cfg.d_in, cfg.d_model, rng);
  for (std::size_t i = 0; i < cfg.n_stages(); ++i) {
    const std::string name = "critic.stage" + std::to_string(i);
    const std::size_t patch = cfg.patch_len0 << i;
    Stage s;
    s.inject = nn::init_linear(params, name + ".inject", patch * cfg.d_in, cfg.d_inject, rng);
    s.merge = nn::init_linear(params, name + ".merge", cfg.d_model + cfg.d_inject, cfg.d_model, rng);
    s.lape = nn::init_lape(params, name + ".lape", cfg.t / patch, cfg.d_model, rng);
    s.encoder = nn::init_encoder(params, name + ".encoder", block, rng);
    s.distill = nn::init_distill(params, name + ".distill", cfg.d_model, rng);
    stages.push_back(std::move(s));
  }
  adv_hidden = nn::init_linear(params, "critic.adv_hidden", cfg.d_model, cfg.head_hidden, rng);
  adv_out = nn::init_linear(params, "critic.adv_out", cfg.head_hidden, 1, rng);
  label_hidden = nn::init_linear(params, "critic.label_hidden", cfg.d_model, cfg.head_hidden, rng);
  label_out = nn::init_linear(params, "critic.label_out", cfg.head_hidden, cfg.label_dim, rng);
}

CriticOutput critic_forward(const Critic& c, const Tensor& window, std::uint64_t psa_seed,
                            std::vector<std::size_t>* extents) {
  const auto& cfg = c.cfg;
  if (window.rank() != 3 || window.shape()[1] != cfg.t || window.shape()[2] != cfg.d_in) {
    throw ShapeError("critic_forward: expected [B, " + std::to_string(cfg.t) + ", " +
                     std::to_string(cfg.d_in) + "], got " + to_string(window.shape()));
  }
  const std::size_t b = window.shape()[0];
  Tensor tokens = nn::patch_embed(window, cfg.patch_len0, c.embed);
  if (extents) *extents = {tokens.shape()[1]};
  for (std::size_t i = 0; i < c.stages.size(); ++i) {
    const auto& s = c.stages[i];
    const Tensor parts[] = {tokens, nn::patch_embed(window, cfg.patch_len0 << i, s.inject)};
    tokens = nn::linear(concat(parts, 2), s.merge);
    tokens = nn::lape_add(tokens, s.lape);
    tokens = nn::encoder_block(tokens, c.block, s.encoder, stage_seed(psa_seed, i));
    tokens = nn::distill_halve(tokens, s.distill);
    if (extents) extents->push_back(tokens.shape()[1]);
  }
  Tensor features = reshape(tokens, {b, cfg.d_model});
  return {reshape(head(features, c.adv_hidden, c.adv_out), {b}),
          sigmoid(head(features, c.label_hidden, c.label_out))};
}

}  // namespace tsgan::gan
