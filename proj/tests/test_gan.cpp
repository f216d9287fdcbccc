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

#include <doctest.h>

#include <Eigen/LU>
#include <cmath>
#include <numbers>

#include "support/gan_cases.hpp"
#include "support/random.hpp"
#include "tsgan/gan.hpp"
#include "tsgan/ops.hpp"

using namespace tsgan;
using namespace tsgan::gan;
using tsgan::testing::cycling_labels;
using tsgan::testing::desk_config;
using tsgan::testing::random_constant;

namespace {

std::vector<double> vals(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

void fill(const Tensor& leaf, double v) {
  Tensor t = leaf;
  t.assign(std::vector<double>(t.numel(), v));
}

std::vector<double> snapshot(const nn::ParameterSet& params) {
  std::vector<double> out;
  for (const auto& [name, t] : params.entries()) out.insert(out.end(), t.values().begin(), t.values().end());
  return out;
}

// Realness D(x) = k / sqrt(N) * sum(x) per sample, N elements per sample.
AdversarialFn scaled_sum_critic(double k) {
  return [k](const Tensor& x) {
    const std::size_t b = x.shape()[0], n = x.numel() / b;
    Tensor per = reshape(sum_axis(reshape(x, {b, n}), 1), {b});
    return scale(per, k / std::sqrt(static_cast<double>(n)));
  };
}

// Gradient penalty with input gradients from central differences.
double penalty_by_differences(const Critic& c, const Tensor& real, const Tensor& syn,
                              const std::vector<double>& eps, std::uint64_t psa_seed) {
  const std::size_t b = real.shape()[0], n = real.numel() / b;
  std::vector<double> mixed(real.numel());
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    mixed[i] = eps[i / n] * real.at(i) + (1.0 - eps[i / n]) * syn.at(i);
  }
  const double h = 1e-5;
  double total = 0.0;
  NoGradGuard no_grad;
  for (std::size_t s = 0; s < b; ++s) {
    double sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      auto up = mixed, down = mixed;
      up[s * n + j] += h;
      down[s * n + j] -= h;
      const double fu = critic_forward(c, Tensor::constant(real.shape(), up), psa_seed).realness.at(s);
      const double fd = critic_forward(c, Tensor::constant(real.shape(), down), psa_seed).realness.at(s);
      const double g = (fu - fd) / (2 * h);
      sq += g * g;
    }
    total += (std::sqrt(sq) - 1.0) * (std::sqrt(sq) - 1.0);
  }
  return total / static_cast<double>(b);
}

double hand_label_mse(const Tensor& pred, const Tensor& labels, double eps,
                      const std::vector<double>& w) {
  const std::size_t k = labels.shape()[1];
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.numel(); ++i) {
    const double target = labels.at(i) * (1.0 - eps) + eps / static_cast<double>(k);
    acc += w[i % k] * (pred.at(i) - target) * (pred.at(i) - target);
  }
  return acc / static_cast<double>(pred.numel());
}

}  // namespace

TEST_SUITE("condition_embed") {
  TEST_CASE("default widths concatenate to 600 before the seed projection") {
    GeneratorConfig cfg;
    cfg.t_seed = 4;
    cfg.d_seed = 8;
    cfg.t_target = 4;
    Rng rng(0);
    Generator g(cfg, rng);
    CHECK(g.label_proj.weight.shape() == Shape{3, 500});
    CHECK(g.seed_proj.weight.shape() == Shape{600, 32});
    auto seed = condition_embed(g, random_constant({2, 100}, rng), cycling_labels(2, 3));
    CHECK(seed.shape() == Shape{2, 4, 8});
  }

  TEST_CASE("zero weights give a zero seed") {
    auto cfg = desk_config().generator;
    Rng rng(1);
    Generator g(cfg, rng);
    for (const auto& w : {g.label_proj, g.seed_proj}) {
      fill(w.weight, 0.0);
      fill(w.bias, 0.0);
    }
    auto seed = condition_embed(g, random_constant({2, cfg.noise_dim}, rng), cycling_labels(2, 3));
    for (double v : seed.values()) CHECK(v == 0.0);
  }

  TEST_CASE("distinct labels give distinct seeds when the label map has full rank") {
    auto cfg = desk_config().generator;
    Rng rng(2);
    Generator g(cfg, rng);
    // label -> seed is x -> x * Wl * Ws[noise_dim:, :]
    Eigen::Map<const Eigen::Matrix<double, -1, -1, Eigen::RowMajor>> wl(
        g.label_proj.weight.values().data(), 3, cfg.label_proj_dim);
    Eigen::Map<const Eigen::Matrix<double, -1, -1, Eigen::RowMajor>> ws(
        g.seed_proj.weight.values().data(), cfg.noise_dim + cfg.label_proj_dim,
        cfg.t_seed * cfg.d_seed);
    Eigen::MatrixXd composite = wl * ws.bottomRows(cfg.label_proj_dim);
    REQUIRE(Eigen::FullPivLU<Eigen::MatrixXd>(composite).rank() == 3);

    const auto noise = random_constant({1, cfg.noise_dim}, rng);
    auto a = condition_embed(g, noise, Tensor::constant({1, 3}, {1, 0, 0}));
    auto b = condition_embed(g, noise, Tensor::constant({1, 3}, {0, 1, 0}));
    double diff = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) diff = std::max(diff, std::abs(a.at(i) - b.at(i)));
    CHECK(diff > 1e-6);
  }

  TEST_CASE("dimension mismatch is rejected") {
    auto cfg = desk_config().generator;
    Rng rng(3);
    Generator g(cfg, rng);
    CHECK_THROWS_AS(condition_embed(g, random_constant({1, 7}, rng), cycling_labels(1, 3)), ShapeError);
    CHECK_THROWS_AS(condition_embed(g, random_constant({1, 8}, rng), cycling_labels(1, 4)), ShapeError);
  }
}

TEST_SUITE("generator") {
  TEST_CASE("stage trace 16 -> 256 with thresholds 64/64") {
    GeneratorConfig cfg;  // t_seed 16, d_seed 256, t_target 256, thresholds 64
    cfg.ffn_mult = 1;
    const std::vector<StageShape> want{{16, 256}, {32, 256}, {64, 256}, {128, 128}, {256, 64}};
    CHECK(generator_schedule(cfg) == want);

    Rng rng(0);
    Generator g(cfg, rng);
    REQUIRE(g.stages.size() == 4);
    CHECK(g.stages[0].block.attn_kind == nn::AttentionKind::canonical);
    CHECK(g.stages[2].block.attn_kind == nn::AttentionKind::canonical);
    CHECK(g.stages[3].block.attn_kind == nn::AttentionKind::grid);
    CHECK(!g.stages[1].shuffle);
    CHECK(g.stages[2].shuffle);

    std::vector<StageShape> trace;
    auto y = generator_forward(g, random_constant({1, 100}, rng), cycling_labels(1, 3), &trace);
    CHECK(trace == want);
    CHECK(y.shape() == Shape{1, 256, 2});
  }

  TEST_CASE("same noise and label give bit-identical output") {
    Rng rng(4);
    Generator g(desk_config().generator, rng);
    const auto z = random_constant({2, 8}, rng);
    CHECK(vals(generator_forward(g, z, cycling_labels(2, 3))) ==
          vals(generator_forward(g, z, cycling_labels(2, 3))));
  }

  TEST_CASE("t_target == t_seed projects the seed only") {
    auto cfg = desk_config().generator;
    cfg.t_target = cfg.t_seed;
    Rng rng(5);
    Generator g(cfg, rng);
    CHECK(g.stages.empty());
    const auto z = random_constant({2, 8}, rng);
    const auto y = cycling_labels(2, 3);
    CHECK(vals(generator_forward(g, z, y)) == vals(nn::linear(condition_embed(g, z, y), g.output)));
  }

  TEST_CASE("output shape is t_target x d_out over a config grid") {
    std::size_t valid = 0;
    for (std::size_t t_seed : {2, 4, 8}) {
      for (std::size_t mult : {1, 2, 4, 8}) {
        for (std::size_t shuffle : {2, 8, 64}) {
          for (std::size_t ga : {2, 8, 64}) {
            GeneratorConfig cfg;
            cfg.noise_dim = 4;
            cfg.label_proj_dim = 4;
            cfg.t_seed = t_seed;
            cfg.t_target = t_seed * mult;
            cfg.d_seed = 32;
            cfg.d_out = 3;
            cfg.shuffle_threshold = shuffle;
            cfg.ga_threshold = ga;
            cfg.n_heads = 2;
            cfg.ffn_mult = 1;
            try {
              cfg.validate();
            } catch (const std::invalid_argument&) {
              continue;
            }
            ++valid;
            Rng rng(t_seed * 1000 + mult * 100 + shuffle + ga);
            Generator g(cfg, rng);
            auto y = generator_forward(g, random_constant({1, 4}, rng), cycling_labels(1, 3));
            INFO("t_seed " << t_seed << " x" << mult << " shuffle " << shuffle << " ga " << ga);
            CHECK(y.shape() == Shape{1, cfg.t_target, 3});
          }
        }
      }
    }
    CHECK(valid >= 30);
  }

  TEST_CASE("odd depth before a shuffle stage is rejected") {
    GeneratorConfig cfg;
    cfg.t_seed = 4;
    cfg.t_target = 16;
    cfg.d_seed = 6;
    cfg.n_heads = 1;
    cfg.shuffle_threshold = 4;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // 6 -> 3 -> odd
    cfg.t_target = 8;
    CHECK_NOTHROW(cfg.validate());
  }

  TEST_CASE("non power-of-two lengths are rejected") {
    GeneratorConfig cfg;
    cfg.t_target = 200;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
}

TEST_SUITE("critic") {
  TEST_CASE("T = 256, patch 1: eight halvings to rank-2 features") {
    CriticConfig cfg;
    cfg.t = 256;
    cfg.d_model = 8;
    cfg.n_heads = 2;
    cfg.ffn_mult = 1;
    cfg.d_inject = 4;
    cfg.head_hidden = 8;
    CHECK(cfg.n_stages() == 8);
    Rng rng(0);
    Critic c(cfg, rng);
    std::vector<std::size_t> extents;
    NoGradGuard no_grad;
    auto out = critic_forward(c, random_constant({1, 256, 2}, rng), 7, &extents);
    CHECK(extents == std::vector<std::size_t>{256, 128, 64, 32, 16, 8, 4, 2, 1});
    CHECK(out.realness.shape() == Shape{1});
    CHECK(out.label.shape() == Shape{1, 3});
  }

  TEST_CASE("larger first patch shortens the pipeline") {
    CriticConfig cfg = desk_config().critic;
    cfg.patch_len0 = 4;
    CHECK(cfg.n_stages() == 2);
    Rng rng(1);
    Critic c(cfg, rng);
    std::vector<std::size_t> extents;
    critic_forward(c, random_constant({2, 16, 2}, rng), 0, &extents);
    CHECK(extents == std::vector<std::size_t>{4, 2, 1});
  }

  TEST_CASE("label head lies in (0,1); adversarial head has no terminal activation") {
    Rng rng(2);
    Critic c(desk_config().critic, rng);
    for (double sd : {0.1, 1.0, 3.0}) {
      auto out = critic_forward(c, random_constant({4, 16, 2}, rng, sd), 3);
      for (double v : out.label.values()) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
      }
    }
    fill(c.adv_out.weight, 0.0);
    for (double k : {-3.5, 12.0}) {
      fill(c.adv_out.bias, k);
      const auto out = critic_forward(c, random_constant({2, 16, 2}, rng), 3);
      for (double v : out.realness.values()) CHECK(v == k);
    }
  }

  TEST_CASE("grad_check of realness sum with respect to the window at T = 16") {
    Rng rng(3);
    Critic c(desk_config().critic, rng);
    auto x = random_constant({2, 16, 2}, rng);
    auto report =
        grad_check([&](const Tensor& w) { return sum(critic_forward(c, w, 5).realness); }, x, 1e-4, 1e-4);
    INFO("rel " << report.max_rel_err);
    CHECK(report.pass);
  }

  TEST_CASE("invalid shapes are rejected") {
    Rng rng(4);
    Critic c(desk_config().critic, rng);
    CHECK_THROWS_AS(critic_forward(c, random_constant({1, 8, 2}, rng), 0), ShapeError);
    CriticConfig bad = desk_config().critic;
    bad.t = 24;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.t = 16;
    bad.patch_len0 = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
}

TEST_SUITE("labels") {
  TEST_CASE("eps = 0 is the identity") {
    ConditionLabel y{{0, 1, 0}, 0.3};
    auto s = smooth_labels(y, 0.0);
    CHECK(s.onehot == y.onehot);
    CHECK(s.lifetime == y.lifetime);
  }

  TEST_CASE("K = 3, eps = 0.1, class 0") {
    auto s = smooth_labels(ConditionLabel{{1, 0, 0}, 0.42}, 0.1);
    CHECK(s.onehot[0] == doctest::Approx(0.9 + 0.1 / 3).epsilon(1e-15));
    CHECK(s.onehot[1] == doctest::Approx(0.1 / 3).epsilon(1e-15));
    CHECK(s.onehot[2] == doctest::Approx(0.1 / 3).epsilon(1e-15));
    CHECK(s.lifetime == 0.42);
  }

  TEST_CASE("smoothing preserves the one-hot sum") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 0.999);
    for (int i = 0; i < 200; ++i) {
      const std::size_t k = 2 + rng() % 9;
      ConditionLabel y;
      y.onehot.assign(k, 0.0);
      y.onehot[rng() % k] = 1.0;
      const auto s = smooth_labels(y, u(rng));
      double total = 0.0;
      for (double v : s.onehot) total += v;
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("batch smoothing leaves the lifetime column alone") {
    auto t = smooth_label_batch(Tensor::constant({2, 3}, {1, 0, 0.25, 0, 1, 1.0}), 2, 0.2);
    CHECK(vals(t) == std::vector<double>{0.9, 0.1, 0.25, 0.1, 0.9, 1.0});
  }

  TEST_CASE("label validation") {
    CHECK_NOTHROW(ConditionLabel({{0, 1}, 1.0}).validate());
    CHECK_THROWS(ConditionLabel({{1, 1}, std::nullopt}).validate());
    CHECK_THROWS(ConditionLabel({{0, 1}, 1.5}).validate());
  }
}

TEST_SUITE("losses") {
  TEST_CASE("gradient penalty of a unit-slope critic is zero") {
    std::mt19937_64 rng(6);
    auto real = random_constant({3, 8, 2}, rng), syn = random_constant({3, 8, 2}, rng);
    const std::vector<double> eps{0.1, 0.5, 0.9};
    CHECK(gradient_penalty(scaled_sum_critic(1.0), real, syn, eps).item() <= 1e-20);
    CHECK(gradient_penalty(scaled_sum_critic(2.0), real, syn, eps).item() ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("gradient penalty matches a finite-difference oracle and is non-negative") {
    Rng rng(7);
    Critic c(desk_config().critic, rng);
    auto real = random_constant({2, 16, 2}, rng), syn = random_constant({2, 16, 2}, rng);
    const std::vector<double> eps{0.3, 0.6};
    const AdversarialFn adv = [&](const Tensor& x) { return critic_forward(c, x, 9).realness; };
    const double gp = gradient_penalty(adv, real, syn, eps).item();
    CHECK(gp >= 0.0);
    CHECK(gp == doctest::Approx(penalty_by_differences(c, real, syn, eps, 9)).epsilon(1e-6));
  }

  TEST_CASE("gradient penalty rejects mismatched batches") {
    std::mt19937_64 rng(8);
    const std::vector<double> eps{0.5};
    CHECK_THROWS_AS(gradient_penalty(scaled_sum_critic(1.0), random_constant({1, 8, 2}, rng),
                                     random_constant({1, 4, 2}, rng), eps),
                    ShapeError);
  }

  TEST_CASE("weighted label MSE examples") {
    const auto target = Tensor::constant({1, 3}, {0, 0, 0});
    const auto pred = Tensor::constant({1, 3}, {1, 0, 0});
    const std::vector<double> ones{1, 1, 1}, skew{2, 0, 0};
    CHECK(weighted_label_mse(target, target, ones).item() == 0.0);
    CHECK(weighted_label_mse(pred, target, ones).item() == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(weighted_label_mse(pred, target, skew).item() == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK_THROWS_AS(weighted_label_mse(pred, target, std::vector<double>{1, 1}), ShapeError);
  }

  TEST_CASE("critic loss of identical batches with zero lambdas is zero") {
    Rng rng(9);
    Critic c(desk_config().critic, rng);
    auto real = random_constant({2, 16, 2}, rng);
    LossConfig lc;
    lc.lambda_gp = 0.0;
    lc.lambda_label = 0.0;
    const std::vector<double> eps{0.5, 0.5};
    CHECK(critic_loss(c, real, cycling_labels(2, 3), real, lc, 3, eps, 1).total.item() == 0.0);
  }

  TEST_CASE("critic loss is the sum of its three terms") {
    Rng rng(10);
    Critic c(desk_config().critic, rng);
    auto real = random_constant({2, 16, 2}, rng), syn = random_constant({2, 16, 2}, rng);
    const auto labels = cycling_labels(2, 3);
    const std::vector<double> eps{0.2, 0.7};
    LossConfig lc;  // lambda_gp 10, lambda_label 1, smoothing 0.1
    lc.label_weights = {1.0, 2.0, 0.5};
    const auto terms = critic_loss(c, real, labels, syn, lc, 3, eps, 4);

    const auto on_real = critic_forward(c, real, 4), on_syn = critic_forward(c, syn, 4);
    const double adv = (on_syn.realness.at(0) + on_syn.realness.at(1)) / 2 -
                       (on_real.realness.at(0) + on_real.realness.at(1)) / 2;
    const double mse = hand_label_mse(on_real.label, labels, 0.1, lc.label_weights);
    const double gp = penalty_by_differences(c, real, syn, eps, 4);

    CHECK(terms.adversarial == doctest::Approx(adv).epsilon(1e-12));
    CHECK(terms.label_mse == doctest::Approx(mse).epsilon(1e-12));
    CHECK(terms.gradient_penalty == doctest::Approx(gp).epsilon(1e-6));
    CHECK(std::abs(terms.total.item() - (terms.adversarial + 10.0 * terms.gradient_penalty +
                                         terms.label_mse)) <= 1e-12 * std::abs(terms.total.item()));
  }

  TEST_CASE("critic loss falls when real windows score higher") {
    Rng rng(11);
    Critic c(desk_config().critic, rng);
    LossConfig lc;
    lc.lambda_gp = 0.0;
    lc.lambda_label = 0.0;
    const std::vector<double> eps{0.5, 0.5};
    auto syn = random_constant({2, 16, 2}, rng);
    auto a = random_constant({2, 16, 2}, rng), b = random_constant({2, 16, 2}, rng);
    auto mean_real = [&](const Tensor& x) { return mean(critic_forward(c, x, 2).realness).item(); };
    if (mean_real(a) < mean_real(b)) std::swap(a, b);
    CHECK(critic_loss(c, a, cycling_labels(2, 3), syn, lc, 3, eps, 2).total.item() <
          critic_loss(c, b, cycling_labels(2, 3), syn, lc, 3, eps, 2).total.item());
  }

  TEST_CASE("generator loss against a constant critic is -k") {
    auto cfg = desk_config();
    Rng rng(12);
    Generator g(cfg.generator, rng);
    Critic c(cfg.critic, rng);
    fill(c.adv_out.weight, 0.0);
    fill(c.adv_out.bias, 2.5);
    LossConfig lc;
    lc.lambda_label = 0.0;
    auto z = random_constant({2, 8}, rng);
    CHECK(generator_loss(g, c, z, cycling_labels(2, 3), lc, 3, 0).total.item() == -2.5);
  }

  TEST_CASE("perfect label reproduction zeroes the label term") {
    auto cfg = desk_config();
    Rng rng(13);
    Generator g(cfg.generator, rng);
    Critic c(cfg.critic, rng);
    fill(c.label_out.weight, 0.0);
    const double hot = 0.9 + 0.1 / 3, cold = 0.1 / 3;
    Tensor bias = c.label_out.bias;
    bias.assign(std::vector<double>{std::log(hot / (1 - hot)), std::log(cold / (1 - cold)),
                                    std::log(cold / (1 - cold))});
    LossConfig lc;
    auto terms = generator_loss(g, c, random_constant({1, 8}, rng),
                                Tensor::constant({1, 3}, {1, 0, 0}), lc, 3, 0);
    CHECK(terms.label_mse <= 1e-30);
  }

  TEST_CASE("generator loss is the sum of its terms on one sample") {
    auto cfg = desk_config();
    Rng rng(14);
    Generator g(cfg.generator, rng);
    Critic c(cfg.critic, rng);
    LossConfig lc;
    lc.lambda_label = 3.0;
    const auto z = random_constant({1, 8}, rng);
    const auto y = Tensor::constant({1, 3}, {0, 0, 1});
    const auto terms = generator_loss(g, c, z, y, lc, 3, 6);
    const auto out = critic_forward(c, generator_forward(g, z, y), 6);
    const double mse = hand_label_mse(out.label, y, 0.1, {1, 1, 1});
    CHECK(terms.adversarial == -out.realness.at(0));
    CHECK(terms.label_mse == doctest::Approx(mse).epsilon(1e-12));
    CHECK(std::abs(terms.total.item() - (-out.realness.at(0) + 3.0 * mse)) <=
          1e-12 * std::abs(terms.total.item()));
  }

  TEST_CASE("full losses pass grad_check at desk scale, seeds 0,1,2") {
    for (std::uint64_t seed : {0u, 1u, 2u}) {
      const auto critic = tsgan::testing::check_critic_loss(seed);
      INFO("critic seed " << seed << " rel " << critic.report.max_rel_err << " tensor "
                          << critic.report.worst_tensor << " kinks " << critic.report.kinks);
      CHECK(critic.report.pass);
      CHECK(critic.report.kinks <= critic.report.checked);
      const auto generator = tsgan::testing::check_generator_loss(seed);
      INFO("generator seed " << seed << " rel " << generator.report.max_rel_err << " tensor "
                             << generator.report.worst_tensor << " kinks " << generator.report.kinks);
      CHECK(generator.report.pass);
      CHECK(generator.report.kinks <= generator.report.checked);
    }
  }
}

TEST_SUITE("training") {
  TEST_CASE("Adam single step matches the closed form") {
    nn::ParameterSet params;
    Tensor p = params.add("p", Tensor::parameter({1}, {1.0}));
    Adam adam(0.1, 0.0, 0.9);
    adam.step(params, backward(scale(sum(p), 2.0)));
    // m = 2, v = 0.4, v_hat = 4: p -= 0.1 * 2 / (2 + 1e-8)
    CHECK(p.at(0) == doctest::Approx(1.0 - 0.2 / (2.0 + 1e-8)).epsilon(1e-15));
    CHECK(adam.steps() == 1);
  }

  TEST_CASE("same seed and data give bit-identical parameters after 10 steps") {
    const auto cfg = desk_config();
    std::mt19937_64 data(15);
    const std::size_t n = cfg.loss.n_critic * cfg.batch_size;
    const auto real = random_constant({n, 16, 2}, data);
    const auto labels = cycling_labels(n, 3);
    TrainState a(cfg, 42), b(cfg, 42);
    for (int i = 0; i < 10; ++i) {
      train_step(a, real, labels);
      train_step(b, real, labels);
    }
    CHECK(snapshot(a.generator.params) == snapshot(b.generator.params));
    CHECK(snapshot(a.critic.params) == snapshot(b.critic.params));
    CHECK(a.last.critic_loss == b.last.critic_loss);
    CHECK(a.step == 10);
  }

  TEST_CASE("critic takes n_critic optimizer steps per generator step") {
    const auto cfg = desk_config();
    std::mt19937_64 data(16);
    const std::size_t n = cfg.loss.n_critic * cfg.batch_size;
    TrainState s(cfg, 1);
    for (int i = 0; i < 3; ++i) train_step(s, random_constant({n, 16, 2}, data), cycling_labels(n, 3));
    CHECK(s.gen_opt.steps() == 3);
    CHECK(s.critic_opt.steps() == 15);
  }

  TEST_CASE("non-finite input aborts with a numeric error") {
    const auto cfg = desk_config();
    const std::size_t n = cfg.loss.n_critic * cfg.batch_size;
    std::vector<double> v(n * 32, 0.5);
    v[3] = std::numeric_limits<double>::quiet_NaN();
    TrainState s(cfg, 1);
    CHECK_THROWS_AS(train_step(s, Tensor::constant({n, 16, 2}, v), cycling_labels(n, 3)), NumericError);
  }

  TEST_CASE("wrong batch layout is rejected") {
    TrainState s(desk_config(), 1);
    std::mt19937_64 data(17);
    CHECK_THROWS_AS(train_step(s, random_constant({3, 16, 2}, data), cycling_labels(3, 3)), ShapeError);
  }

  TEST_CASE("losses stay finite for 100 steps on sine data at T = 64") {
    auto cfg = tsgan::testing::smoke_config(1);
    cfg.batch_size = 2;
    const std::size_t n = cfg.loss.n_critic * cfg.batch_size;
    std::mt19937_64 data(18);
    std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);
    TrainState s(cfg, 3);
    for (int step = 0; step < 100; ++step) {
      std::vector<double> v(n * 64 * 2);
      for (std::size_t w = 0; w < n; ++w) {
        for (std::size_t ch = 0; ch < 2; ++ch) {
          const double ph = phase(data);
          for (std::size_t t = 0; t < 64; ++t) {
            v[(w * 64 + t) * 2 + ch] = std::sin(2 * std::numbers::pi * 3.0 * t / 64.0 + ph);
          }
        }
      }
      const auto& st = train_step(s, Tensor::constant({n, 64, 2}, v), Tensor::full({n, 1}, 1.0));
      REQUIRE(std::isfinite(st.critic_loss));
      REQUIRE(std::isfinite(st.generator_loss));
    }
    CHECK(s.step == 100);
  }
}

TEST_SUITE("synthesize") {
  TEST_CASE("identity normalization returns the raw generator output") {
    Rng rng(19);
    Generator g(desk_config().generator, rng);
    const std::vector<ConditionLabel> labels{{{0, 1, 0}, std::nullopt}};
    const auto windows = synthesize(g, labels, 2, NormParams::identity(2), 77);
    REQUIRE(windows.size() == 2);

    Rng noise_rng(77);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> z(2 * 8);
    for (auto& v : z) v = dist(noise_rng);
    NoGradGuard no_grad;
    auto y = generator_forward(g, Tensor::constant({2, 8}, z), Tensor::constant({2, 3}, {0, 1, 0, 0, 1, 0}));
    for (std::size_t i = 0; i < 2; ++i) {
      for (Eigen::Index t = 0; t < 16; ++t) {
        for (Eigen::Index d = 0; d < 2; ++d) {
          CHECK(windows[i](t, d) == y.at(i * 32 + static_cast<std::size_t>(t) * 2 + static_cast<std::size_t>(d)));
        }
      }
    }
  }

  TEST_CASE("n_per_label 3 with 2 labels gives 6 windows in label order") {
    Rng rng(20);
    Generator g(desk_config().generator, rng);
    const ConditionLabel first{{1, 0, 0}, std::nullopt}, second{{0, 0, 1}, std::nullopt};
    const std::vector<ConditionLabel> both{first, second};
    const auto windows = synthesize(g, both, 3, NormParams::identity(2), 5);
    CHECK(windows.size() == 6);
    const auto only_first = synthesize(g, std::span(&first, 1), 3, NormParams::identity(2), 5);
    for (int i = 0; i < 3; ++i) CHECK(windows[i] == only_first[i]);
    CHECK(windows[3] != only_first[0]);
  }

  TEST_CASE("denormalization inverts normalization") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> dist(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
      NormParams norm{Eigen::RowVectorXd::NullaryExpr(3, [&] { return dist(rng); }),
                      Eigen::RowVectorXd::NullaryExpr(3, [&] { return 0.1 + std::abs(dist(rng)); })};
      Window x = Window::NullaryExpr(16, 3, [&] { return dist(rng); });
      CHECK((norm.invert(norm.apply(x)) - x).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("label width mismatch is rejected") {
    Rng rng(22);
    Generator g(desk_config().generator, rng);
    const std::vector<ConditionLabel> labels{{{1, 0}, std::nullopt}};
    CHECK_THROWS_AS(synthesize(g, labels, 1, NormParams::identity(2), 0), std::invalid_argument);
  }
}
