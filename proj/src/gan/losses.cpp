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

#include <stdexcept>
#include <string>

#include "tsgan/gan.hpp"
#include "tsgan/ops.hpp"

namespace tsgan::gan {

namespace {

// Keeps sqrt differentiable when a per-sample gradient vanishes.
constexpr double kNormFloor = 1e-12;

void require_smoothing(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("smoothing eps must lie in [0, 1)");
}

}  // namespace

ConditionLabel smooth_labels(const ConditionLabel& label, double eps) {
  require_smoothing(eps);
  ConditionLabel out = label;
  const double k = static_cast<double>(label.onehot.size());
  for (double& v : out.onehot) v = v * (1.0 - eps) + eps / k;
  return out;
}

Tensor smooth_label_batch(const Tensor& labels, std::size_t onehot_dim, double eps) {
  require_smoothing(eps);
  if (labels.rank() != 2 || onehot_dim == 0 || onehot_dim > labels.shape()[1]) {
    throw ShapeError("smooth_label_batch: " + to_string(labels.shape()) + " with one-hot width " +
                     std::to_string(onehot_dim));
  }
  const std::size_t width = labels.shape()[1];
  std::vector<double> v(labels.values().begin(), labels.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i % width < onehot_dim) v[i] = v[i] * (1.0 - eps) + eps / static_cast<double>(onehot_dim);
  }
  return Tensor::constant(labels.shape(), std::move(v));
}

Tensor gradient_penalty(const AdversarialFn& adversarial, const Tensor& real, const Tensor& syn,
                        std::span<const double> eps) {
  if (real.shape() != syn.shape() || real.rank() == 0) {
    throw ShapeError("gradient_penalty: real " + to_string(real.shape()) + " vs synthetic " +
                     to_string(syn.shape()));
  }
  const std::size_t b = real.shape()[0];
  const std::size_t per = real.numel() / b;
  if (eps.size() != b) throw ShapeError("gradient_penalty: one eps per sample required");

  std::vector<double> e(real.numel());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = eps[i / per];
  const Tensor weight = Tensor::constant(real.shape(), e);
  for (auto& v : e) v = 1.0 - v;
  Tensor mixed = add(mul(real, weight), mul(syn, Tensor::constant(real.shape(), std::move(e))));
  if (!mixed.requires_grad()) {
    mixed = Tensor::parameter(mixed.shape(), {mixed.values().begin(), mixed.values().end()});
  }

  const Tensor wrt[] = {mixed};
  Tensor g = grad(sum(adversarial(mixed)), wrt, /*create_graph=*/true)[0];
  Tensor norms = sqrt(add_scalar(sum_axis(square(reshape(g, {b, per})), 1), kNormFloor));
  return mean(square(add_scalar(norms, -1.0)));
}

Tensor weighted_label_mse(const Tensor& pred, const Tensor& target,
                          std::span<const double> weights) {
  if (pred.shape() != target.shape() || pred.rank() == 0 ||
      weights.size() != pred.shape().back()) {
    throw ShapeError("weighted_label_mse: pred " + to_string(pred.shape()) + ", target " +
                     to_string(target.shape()) + ", " + std::to_string(weights.size()) +
                     " weights");
  }
  const Tensor w = Tensor::constant({weights.size()}, {weights.begin(), weights.end()});
  return mean(mul(square(sub(pred, target)), w));
}

LossTerms critic_loss(const Critic& c, const Tensor& real, const Tensor& real_labels,
                      const Tensor& syn, const LossConfig& cfg, std::size_t onehot_dim,
                      std::span<const double> gp_eps, std::uint64_t psa_seed) {
  if (real.shape() != syn.shape()) {
    throw ShapeError("critic_loss: real " + to_string(real.shape()) + " vs synthetic " +
                     to_string(syn.shape()));
  }
  const auto on_real = critic_forward(c, real, psa_seed);
  const auto on_syn = critic_forward(c, syn, psa_seed);
  Tensor adversarial = sub(mean(on_syn.realness), mean(on_real.realness));

  const AdversarialFn adv = [&](const Tensor& x) { return critic_forward(c, x, psa_seed).realness; };
  Tensor gp = gradient_penalty(adv, real, syn, gp_eps);

  const auto weights = cfg.weights_for(c.cfg.label_dim);
  Tensor mse = weighted_label_mse(on_real.label,
                                  smooth_label_batch(real_labels, onehot_dim, cfg.smoothing_eps),
                                  weights);

  LossTerms terms;
  terms.total = add(add(adversarial, scale(gp, cfg.lambda_gp)), scale(mse, cfg.lambda_label));
  terms.adversarial = adversarial.item();
  terms.gradient_penalty = gp.item();
  terms.label_mse = mse.item();
  return terms;
}

LossTerms generator_loss(const Generator& g, const Critic& c, const Tensor& noise,
                         const Tensor& labels, const LossConfig& cfg, std::size_t onehot_dim,
                         std::uint64_t psa_seed) {
  const auto out = critic_forward(c, generator_forward(g, noise, labels), psa_seed);
  Tensor adversarial = neg(mean(out.realness));
  const auto weights = cfg.weights_for(c.cfg.label_dim);
  Tensor mse = weighted_label_mse(
      out.label, smooth_label_batch(labels, onehot_dim, cfg.smoothing_eps), weights);

  LossTerms terms;
  terms.total = add(adversarial, scale(mse, cfg.lambda_label));
  terms.adversarial = adversarial.item();
  terms.label_mse = mse.item();
  return terms;
}

}  // namespace tsgan::gan
