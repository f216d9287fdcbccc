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
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsgan/autodiff.hpp"
#include "tsgan/nn.hpp"
#include "tsgan/window.hpp"

// Conditional transformer GAN: label/noise embedding, up-scaling generator,
// hierarchical dual-head critic, WGAN-GP loss with a label term, Adam and the
// alternating training step.

namespace tsgan::gan {

using nn::Rng;

/// Raised when a loss or gradient turns non-finite during training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeneratorConfig {
  std::size_t noise_dim = 100;
  std::size_t label_proj_dim = 500;
  std::size_t label_dim = 3;
  std::size_t t_seed = 16;
  std::size_t d_seed = 256;
  std::size_t t_target = 256;
  std::size_t d_out = 2;
  std::size_t shuffle_threshold = 64;
  std::size_t ga_threshold = 64;
  std::size_t n_heads = 4;
  std::size_t ffn_mult = 4;
  /// Instance-norm eps; small values make the critic's input gradient stiff.
  double norm_eps = 0.1;

  /// Throws std::invalid_argument when the stage schedule cannot be built.
  void validate() const;
  std::size_t n_stages() const;
};

/// Temporal and depth extent of the generator tensor at each stage boundary,
/// seed first.
struct StageShape {
  std::size_t t = 0;
  std::size_t d = 0;
  bool operator==(const StageShape&) const = default;
};
std::vector<StageShape> generator_schedule(const GeneratorConfig& cfg);

struct CriticConfig {
  std::size_t t = 256;
  std::size_t d_in = 2;
  std::size_t d_model = 64;
  std::size_t patch_len0 = 1;
  std::size_t d_inject = 32;
  std::size_t head_hidden = 64;
  std::size_t label_dim = 3;
  std::size_t n_heads = 4;
  std::size_t ffn_mult = 4;
  double psa_factor = 5.0;
  double norm_eps = 0.1;

  void validate() const;
  /// log2(t / patch_len0).
  std::size_t n_stages() const;
};

struct LossConfig {
  double lambda_gp = 10.0;
  double lambda_label = 1.0;
  /// Empty means uniform 1.
  std::vector<double> label_weights;
  std::size_t n_critic = 5;
  double smoothing_eps = 0.1;
  double lr = 1e-4;
  double beta1 = 0.0;
  double beta2 = 0.9;
  double adam_eps = 1e-8;

  void validate(std::size_t label_dim) const;
  std::vector<double> weights_for(std::size_t label_dim) const;
};

struct Generator {
  struct Stage {
    Tensor lape_in;
    nn::BlockParams block;
    nn::EncoderWeights encoder;
    bool shuffle = false;
    Tensor lape_out;
  };

  GeneratorConfig cfg;
  nn::ParameterSet params;
  nn::LinearWeights label_proj, seed_proj;
  std::vector<Stage> stages;
  nn::LinearWeights output;

  Generator(const GeneratorConfig& config, Rng& rng);
  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;
};

struct Critic {
  struct Stage {
    nn::LinearWeights inject, merge;
    Tensor lape;
    nn::EncoderWeights encoder;
    nn::DistillWeights distill;
  };

  CriticConfig cfg;
  nn::BlockParams block;
  nn::ParameterSet params;
  nn::LinearWeights embed;
  std::vector<Stage> stages;
  nn::LinearWeights adv_hidden, adv_out, label_hidden, label_out;

  Critic(const CriticConfig& config, Rng& rng);
  Critic(const Critic&) = delete;
  Critic& operator=(const Critic&) = delete;
};

/// noise [B, noise_dim], labels [B, label_dim] -> seed [B, t_seed, d_seed].
Tensor condition_embed(const Generator& g, const Tensor& noise, const Tensor& labels);

/// -> [B, t_target, d_out] on the normalized scale. `trace`, when given,
/// receives the (T, D) shape after the seed and after every stage.
Tensor generator_forward(const Generator& g, const Tensor& noise, const Tensor& labels,
                         std::vector<StageShape>* trace = nullptr);

struct CriticOutput {
  Tensor realness;  // [B]
  Tensor label;     // [B, label_dim], in (0, 1)
};

/// window [B, T, D]. `psa_seed` drives key sampling in every stage.
/// `extents`, when given, receives the token count before the first stage and
/// after every distillation.
CriticOutput critic_forward(const Critic& c, const Tensor& window, std::uint64_t psa_seed,
                            std::vector<std::size_t>* extents = nullptr);

/// onehot * (1 - eps) + eps / K; lifetime untouched.
ConditionLabel smooth_labels(const ConditionLabel& label, double eps);
/// Row-wise smoothing of flat labels [B, label_dim] whose first `onehot_dim`
/// entries are the one-hot part.
Tensor smooth_label_batch(const Tensor& labels, std::size_t onehot_dim, double eps);

/// Realness of a batch: [B, T, D] -> [B].
using AdversarialFn = std::function<Tensor(const Tensor&)>;

/// mean_b (||d adv(x_hat_b) / d x_hat_b||_2 - 1)^2 with
/// x_hat = eps * real + (1 - eps) * syn, one eps per sample. Differentiable
/// with respect to the critic parameters.
Tensor gradient_penalty(const AdversarialFn& adversarial, const Tensor& real, const Tensor& syn,
                        std::span<const double> eps);

/// mean over every element of weight * (pred - target)^2; weights has one
/// entry per label column.
Tensor weighted_label_mse(const Tensor& pred, const Tensor& target,
                          std::span<const double> weights);

struct LossTerms {
  Tensor total;
  double adversarial = 0.0;  // mean(adv(syn)) - mean(adv(real)), or -mean(adv(G))
  double gradient_penalty = 0.0;
  double label_mse = 0.0;
};

/// mean(adv(syn)) - mean(adv(real)) + lambda_gp * GP + lambda_label * MSE on
/// the real windows against their smoothed labels.
LossTerms critic_loss(const Critic& c, const Tensor& real, const Tensor& real_labels,
                      const Tensor& syn, const LossConfig& cfg, std::size_t onehot_dim,
                      std::span<const double> gp_eps, std::uint64_t psa_seed);

/// -mean(adv(G(z, y))) + lambda_label * MSE(label_head(G(z, y)), smooth(y)).
LossTerms generator_loss(const Generator& g, const Critic& c, const Tensor& noise,
                         const Tensor& labels, const LossConfig& cfg, std::size_t onehot_dim,
                         std::uint64_t psa_seed);

/// Adam with bias correction over one ParameterSet.
class Adam {
 public:
  Adam(double lr, double beta1, double beta2, double eps = 1e-8);

  /// Updates every parameter in place from `grads`.
  void step(const nn::ParameterSet& params, const Gradients& grads);

  std::uint64_t steps() const { return steps_; }
  /// First and second moments, in ParameterSet order. Empty before step 1.
  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }
  void restore(std::uint64_t steps, std::vector<std::vector<double>> m,
               std::vector<std::vector<double>> v);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t steps_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

struct GanConfig {
  GeneratorConfig generator;
  CriticConfig critic;
  LossConfig loss;
  std::size_t batch_size = 16;
  /// Leading one-hot columns of the label; the remainder is the lifetime.
  std::size_t onehot_dim = 3;

  void validate() const;
};

struct StepStats {
  std::uint64_t step = 0;
  double critic_loss = 0.0;  // mean over the critic updates of this step
  double gradient_penalty = 0.0;
  double critic_label_mse = 0.0;
  double generator_loss = 0.0;
  double generator_label_mse = 0.0;
};

struct TrainState {
  GanConfig cfg;
  Rng rng;
  Generator generator;
  Critic critic;
  Adam gen_opt, critic_opt;
  std::uint64_t step = 0;
  StepStats last;

  TrainState(const GanConfig& config, std::uint64_t seed);
};

/// n_critic critic updates on consecutive batch_size chunks of `real` (shape
/// [n_critic * batch_size, T, D]), then one generator update conditioned on
/// the labels of the last chunk. Throws NumericError on a non-finite loss.
const StepStats& train_step(TrainState& state, const Tensor& real, const Tensor& real_labels);

/// n_per_label windows per label, in label order, denormalized with `norm`.
std::vector<Window> synthesize(const Generator& g, std::span<const ConditionLabel> labels,
                               std::size_t n_per_label, const NormParams& norm,
                               std::uint64_t seed);

}  // namespace tsgan::gan
