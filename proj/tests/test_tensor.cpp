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

#include <cmath>

#include "support/primitive_cases.hpp"
#include "support/random.hpp"
#include "tsgan/autodiff.hpp"
#include "tsgan/ops.hpp"

using namespace tsgan;
using tsgan::testing::normal_values;
using tsgan::testing::random_parameter;

namespace {

std::vector<double> vals(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

}  // namespace

TEST_CASE("tensor construction checks value count and rank") {
  CHECK_THROWS_AS(Tensor::constant({2, 2}, {1, 2, 3}), ShapeError);
  CHECK_THROWS_AS(Tensor::zeros({1, 1, 1, 1}), ShapeError);
  CHECK(Tensor::scalar(3.0).rank() == 0);
  CHECK(Tensor::scalar(3.0).item() == 3.0);
}

TEST_CASE("matmul with identity-padded operand") {
  auto a = Tensor::constant({2, 3}, {1, 2, 3, 4, 5, 6});
  auto id = Tensor::constant({3, 2}, {1, 0, 0, 1, 0, 0});
  CHECK(vals(matmul(a, id)) == std::vector<double>{1, 2, 4, 5});
  CHECK_THROWS_AS(matmul(a, a), ShapeError);
}

TEST_CASE("softmax of equal entries is uniform") {
  auto y = softmax(Tensor::full({5}, 0.7));
  for (double v : y.values()) CHECK(v == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("leaky relu by definition") {
  auto y = leaky_relu(Tensor::constant({2}, {-1.0, 2.0}), 0.2);
  CHECK(vals(y) == std::vector<double>{-0.2, 2.0});
}

TEST_CASE("domain and broadcast errors") {
  CHECK_THROWS_AS(sqrt(Tensor::constant({2}, {1.0, -1.0})), DomainError);
  CHECK_THROWS_AS(log(Tensor::constant({1}, {0.0})), DomainError);
  CHECK_THROWS_AS(add(Tensor::zeros({2, 3}), Tensor::zeros({2})), ShapeError);
  CHECK_NOTHROW(add(Tensor::zeros({2, 3}), Tensor::zeros({3})));
  CHECK_NOTHROW(add(Tensor::zeros({2, 3}), Tensor::scalar(1.0)));
}

TEST_CASE("backward of sum is ones and of half squared norm is x") {
  std::mt19937_64 rng(0);
  auto x = random_parameter({2, 3, 4}, rng);
  auto g1 = backward(sum(x)).of(x);
  for (double v : g1) CHECK(v == 1.0);
  auto g2 = backward(scale(sum(mul(x, x)), 0.5)).of(x);
  for (std::size_t i = 0; i < g2.size(); ++i) CHECK(g2[i] == doctest::Approx(x.at(i)));
}

TEST_CASE("unused leaves get zero gradient") {
  std::mt19937_64 rng(1);
  auto used = random_parameter({3}, rng);
  auto unused = random_parameter({4}, rng);
  auto grads = backward(sum(used));
  CHECK_FALSE(grads.contains(unused));
  for (double v : grads.of(unused)) CHECK(v == 0.0);
  CHECK_THROWS_AS(backward(used), ShapeError);
}

TEST_CASE("composite mean(softmax(Wx)) matches finite differences") {
  std::mt19937_64 rng(2);
  auto w = random_parameter({4, 4}, rng);
  auto x = tsgan::testing::random_constant({3, 4}, rng);
  std::mt19937_64 prng(7);
  auto weights = tsgan::testing::random_constant({3, 4}, prng);
  const std::vector<Tensor> leaves{w};
  auto report = grad_check([&] { return mean(mul(softmax(matmul(x, w)), weights)); }, leaves,
                           {1e-4, 1e-6, 0, 0});
  CHECK(report.pass);
  CHECK(report.max_rel_err < 1e-6);
}

TEST_CASE("every primitive passes grad_check on seeds 0,1,2") {
  for (const auto& c : tsgan::testing::primitive_cases()) {
    for (std::uint64_t seed : {0u, 1u, 2u}) {
      std::mt19937_64 rng(seed);
      auto x = tsgan::testing::random_constant(c.input_shape, rng);
      auto report = grad_check(c.f, x, 1e-4, 1e-4);
      INFO(c.name << " seed " << seed << " rel " << report.max_rel_err);
      CHECK(report.pass);
    }
  }
}

TEST_CASE("grad_check of a sum of squares is tight") {
  std::mt19937_64 rng(3);
  auto x = tsgan::testing::random_constant({2, 5}, rng);
  auto report = grad_check([](const Tensor& t) { return sum(square(t)); }, x, 1e-4, 1e-9);
  CHECK(report.max_rel_err < 1e-9);
  CHECK(report.checked == 10);
}

TEST_CASE("grad_check detects a corrupted backward rule") {
  auto bad_square = [](const Tensor& x) {
    std::vector<double> out(x.values().begin(), x.values().end());
    for (auto& v : out) v *= v;
    return make_op("bad_square", x.shape(), std::move(out), {x},
                   [](const Tensor& self, const Tensor& g) -> std::vector<Tensor> {
                     return {mul(g, scale(self.inputs()[0], 3.0))};
                   });
  };
  std::mt19937_64 rng(4);
  auto x = tsgan::testing::random_constant({6}, rng);
  auto report = grad_check([&](const Tensor& t) { return sum(bad_square(t)); }, x, 1e-4, 1e-4);
  CHECK_FALSE(report.pass);
  CHECK_THROWS_AS(grad_check([](const Tensor& t) { return t; }, x, 1e-4, 1e-4), ShapeError);
}

TEST_CASE("a stencil across a kink is reported, not scored") {
  // leaky_relu at 5e-5 with step 1e-4 straddles 0: the difference quotient is
  // (1e-4 + 0.2 * 1e-4 - ...) / 2e-4, neither slope.
  auto f = [](const Tensor& x) { return sum(leaky_relu(x, 0.2)); };
  auto x = Tensor::constant({2}, {5e-5, 1.0});
  auto report = grad_check(f, x, 1e-4, 1e-6);
  CHECK(report.kinks == 1);
  CHECK(report.checked == 1);
  CHECK(report.pass);

  Tensor leaf = Tensor::parameter({2}, {5e-5, 1.0});
  const std::vector<Tensor> leaves{leaf};
  GradCheckOptions strict;
  strict.tol = 1e-6;
  strict.skip_kinks = false;
  auto raw = grad_check([&] { return f(leaf); }, leaves, strict);
  CHECK(raw.kinks == 0);
  CHECK_FALSE(raw.pass);
}

TEST_CASE("branch traces fingerprint max-pool picks and nest") {
  auto x = Tensor::constant({1, 4, 1}, {0, 3, 1, 2});
  auto y = Tensor::constant({1, 4, 1}, {3, 0, 1, 2});
  std::uint64_t fx = 0, fy = 0, fx2 = 0;
  {
    BranchTrace outer;
    {
      BranchTrace t;
      max_pool1d(x, 2, 2, 0);
      fx = t.fingerprint();
    }
    CHECK(outer.fingerprint() == BranchTrace().fingerprint());
  }
  {
    BranchTrace t;
    max_pool1d(y, 2, 2, 0);
    fy = t.fingerprint();
  }
  {
    BranchTrace t;
    max_pool1d(x, 2, 2, 0);
    fx2 = t.fingerprint();
  }
  CHECK(fx == fx2);
  CHECK(fx != fy);
}

TEST_CASE("backward is additive over summed losses") {
  std::mt19937_64 rng(5);
  auto x = random_parameter({3, 4}, rng);
  auto w = tsgan::testing::random_constant({4, 2}, rng);
  auto loss1 = [&] { return sum(square(matmul(x, w))); };
  auto loss2 = [&] { return mean(elu(x)); };
  auto joint = backward(add(loss1(), loss2())).of(x);
  auto g1 = backward(loss1()).of(x);
  auto g2 = backward(loss2()).of(x);
  for (std::size_t i = 0; i < joint.size(); ++i) {
    CHECK(joint[i] == doctest::Approx(g1[i] + g2[i]).epsilon(1e-14));
  }
}

TEST_CASE("forward is bit-deterministic") {
  std::mt19937_64 rng(6);
  auto x = tsgan::testing::random_constant({2, 8, 4}, rng);
  auto k = tsgan::testing::random_constant({12, 4}, rng);
  auto run = [&] { return vals(softmax(max_pool1d(elu(conv1d(x, k, 1, 1)), 3, 2, 1))); };
  CHECK(run() == run());
}

TEST_CASE("max-pool gradient routes to the first maximal index on ties") {
  auto x = Tensor::parameter({1, 4, 1}, {1.0, 5.0, 5.0, 2.0});
  auto g = backward(sum(max_pool1d(x, 3, 1, 0))).of(x);
  CHECK(g == std::vector<double>{0.0, 2.0, 0.0, 0.0});
  // Output length for the distillation setting: T -> T/2.
  CHECK(max_pool1d(Tensor::zeros({1, 8, 2}), 3, 2, 1).shape() == Shape{1, 4, 2});
  CHECK(max_pool1d(Tensor::zeros({1, 2, 2}), 3, 2, 1).shape() == Shape{1, 1, 2});
}

TEST_CASE("conv1d matches a direct loop") {
  std::mt19937_64 rng(8);
  auto x = tsgan::testing::random_constant({2, 5, 3}, rng);
  auto k = tsgan::testing::random_constant({3 * 3, 2}, rng);
  auto y = conv1d(x, k, 1, 1);
  REQUIRE(y.shape() == Shape{2, 5, 2});
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t t = 0; t < 5; ++t) {
      for (std::size_t o = 0; o < 2; ++o) {
        double acc = 0.0;
        for (std::size_t w = 0; w < 3; ++w) {
          const long pos = static_cast<long>(t + w) - 1;
          if (pos < 0 || pos >= 5) continue;
          for (std::size_t c = 0; c < 3; ++c) {
            acc += x.at((b * 5 + static_cast<std::size_t>(pos)) * 3 + c) * k.at((w * 3 + c) * 2 + o);
          }
        }
        CHECK(y.at((b * 5 + t) * 2 + o) == doctest::Approx(acc).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("double backward: gradient of a gradient norm matches finite differences") {
  // f(x) = || d/dx sum(softplus-like(Wx)) ||^2 exercises second-order rules of
  // matmul, softmax, sigmoid and elu.
  std::mt19937_64 rng(9);
  auto w = tsgan::testing::random_constant({4, 3}, rng);
  auto f = [&](const Tensor& x) {
    auto inner = sum(mul(sigmoid(matmul(x, w)), elu(matmul(x, w))));
    inner = add(inner, sum(softmax(matmul(square(x), w))));
    const std::vector<Tensor> wrt{x};
    auto g = grad(inner, wrt, true)[0];
    return sum(square(g));
  };
  auto x = tsgan::testing::random_constant({2, 4}, rng);
  auto report = grad_check(f, x, 1e-4, 1e-6);
  INFO("rel " << report.max_rel_err);
  CHECK(report.pass);
}

TEST_CASE("no-grad guard stops recording") {
  std::mt19937_64 rng(10);
  auto x = random_parameter({3}, rng);
  {
    NoGradGuard guard;
    CHECK_FALSE(square(x).requires_grad());
  }
  CHECK(square(x).requires_grad());
  CHECK(topological_order(sum(square(x))).size() == 3);
}
