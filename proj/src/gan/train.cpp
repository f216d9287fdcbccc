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
#include <string>

#include "tsgan/gan.hpp"
#include "tsgan/ops.hpp"

namespace tsgan::gan {

namespace {

Tensor gaussian(Shape shape, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(numel(shape));
  for (auto& x : v) x = dist(rng);
  return Tensor::constant(std::move(shape), std::move(v));
}

void require_finite(double value, const char* what, std::uint64_t step) {
  if (!std::isfinite(value)) {
    throw NumericError(std::string(what) + " is " + std::to_string(value) + " at step " +
                       std::to_string(step));
  }
}

void require_finite(const nn::ParameterSet& params, const Gradients& grads, const char* who,
                    std::uint64_t step) {
  for (const auto& [name, leaf] : params.entries()) {
    for (double g : grads.of(leaf)) {
      if (!std::isfinite(g)) {
        throw NumericError(std::string(who) + " gradient of " + name + " is non-finite at step " +
                           std::to_string(step));
      }
    }
  }
}

GanConfig validated(const GanConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(const nn::ParameterSet& params, const Gradients& grads) {
  const auto entries = params.entries();
  if (m_.empty()) {
    for (const auto& e : entries) {
      m_.emplace_back(e.second.numel(), 0.0);
      v_.emplace_back(e.second.numel(), 0.0);
    }
  }
  if (m_.size() != entries.size()) throw std::logic_error("Adam: parameter set changed size");
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Tensor leaf = entries[i].second;
    const auto g = grads.of(leaf);
    std::vector<double> p(leaf.values().begin(), leaf.values().end());
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g[j];
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g[j] * g[j];
      p[j] -= lr_ * (m[j] / c1) / (std::sqrt(v[j] / c2) + eps_);
    }
    leaf.assign(p);
  }
}

void Adam::restore(std::uint64_t steps, std::vector<std::vector<double>> m,
                   std::vector<std::vector<double>> v) {
  if (m.size() != v.size()) throw std::invalid_argument("Adam::restore: moment count mismatch");
  steps_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

TrainState::TrainState(const GanConfig& config, std::uint64_t seed)
    : cfg(validated(config)),
      rng(seed),
      generator(cfg.generator, rng),
      critic(cfg.critic, rng),
      gen_opt(cfg.loss.lr, cfg.loss.beta1, cfg.loss.beta2, cfg.loss.adam_eps),
      critic_opt(cfg.loss.lr, cfg.loss.beta1, cfg.loss.beta2, cfg.loss.adam_eps) {}

const StepStats& train_step(TrainState& state, const Tensor& real, const Tensor& real_labels) {
  const auto& cfg = state.cfg;
  const std::size_t b = cfg.batch_size, n_critic = cfg.loss.n_critic;
  const Shape want{n_critic * b, cfg.critic.t, cfg.critic.d_in};
  if (real.shape() != want || real_labels.shape() != Shape{n_critic * b, cfg.critic.label_dim}) {
    throw ShapeError("train_step: expected windows " + to_string(want) + " and labels [" +
                     std::to_string(n_critic * b) + ", " + std::to_string(cfg.critic.label_dim) +
                     "], got " + to_string(real.shape()) + " and " +
                     to_string(real_labels.shape()));
  }
  const std::uint64_t step = state.step + 1;
  StepStats stats;
  stats.step = step;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Tensor labels;
  for (std::size_t k = 0; k < n_critic; ++k) {
    const Tensor batch = slice(real, 0, k * b, b);
    labels = slice(real_labels, 0, k * b, b);
    const Tensor noise = gaussian({b, cfg.generator.noise_dim}, state.rng);
    Tensor syn;
    {
      NoGradGuard no_grad;
      syn = generator_forward(state.generator, noise, labels);
    }
    std::vector<double> eps(b);
    for (auto& e : eps) e = unit(state.rng);
    const std::uint64_t psa_seed = state.rng();

    const auto terms = critic_loss(state.critic, batch, labels, syn, cfg.loss, cfg.onehot_dim, eps,
                                   psa_seed);
    require_finite(terms.total.item(), "critic loss", step);
    const auto grads = backward(terms.total);
    require_finite(state.critic.params, grads, "critic", step);
    state.critic_opt.step(state.critic.params, grads);

    stats.critic_loss += terms.total.item() / static_cast<double>(n_critic);
    stats.gradient_penalty += terms.gradient_penalty / static_cast<double>(n_critic);
    stats.critic_label_mse += terms.label_mse / static_cast<double>(n_critic);
  }

  const Tensor noise = gaussian({b, cfg.generator.noise_dim}, state.rng);
  const std::uint64_t psa_seed = state.rng();
  const auto terms = generator_loss(state.generator, state.critic, noise, labels, cfg.loss,
                                    cfg.onehot_dim, psa_seed);
  require_finite(terms.total.item(), "generator loss", step);
  const auto grads = backward(terms.total);
  require_finite(state.generator.params, grads, "generator", step);
  state.gen_opt.step(state.generator.params, grads);

  stats.generator_loss = terms.total.item();
  stats.generator_label_mse = terms.label_mse;
  state.step = step;
  state.last = stats;
  return state.last;
}

std::vector<Window> synthesize(const Generator& g, std::span<const ConditionLabel> labels,
                               std::size_t n_per_label, const NormParams& norm,
                               std::uint64_t seed) {
  const auto& cfg = g.cfg;
  for (const auto& label : labels) {
    if (label.dim() != cfg.label_dim) {
      throw std::invalid_argument("synthesize: label has " + std::to_string(label.dim()) +
                                  " entries, generator expects " + std::to_string(cfg.label_dim));
    }
  }
  NoGradGuard no_grad;
  Rng rng(seed);
  std::vector<Window> out;
  out.reserve(labels.size() * n_per_label);
  for (const auto& label : labels) {
    if (n_per_label == 0) break;
    const auto flat = label.flat();
    std::vector<double> rows;
    rows.reserve(n_per_label * flat.size());
    for (std::size_t i = 0; i < n_per_label; ++i) rows.insert(rows.end(), flat.begin(), flat.end());
    const Tensor noise = gaussian({n_per_label, cfg.noise_dim}, rng);
    const Tensor y = generator_forward(g, noise, Tensor::constant({n_per_label, flat.size()}, rows));
    const std::size_t per = cfg.t_target * cfg.d_out;
    for (std::size_t i = 0; i < n_per_label; ++i) {
      Eigen::Map<const Window> w(y.values().data() + i * per, static_cast<Eigen::Index>(cfg.t_target),
                                 static_cast<Eigen::Index>(cfg.d_out));
      out.push_back(norm.invert(w));
    }
  }
  return out;
}

}  // namespace tsgan::gan
