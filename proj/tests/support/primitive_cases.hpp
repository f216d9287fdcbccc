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

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "random.hpp"
#include "tsgan/ops.hpp"

namespace tsgan::testing {

struct PrimitiveCase {
  std::string name;
  Shape input_shape;
  std::function<Tensor(const Tensor&)> f;
};

/// One scalar-valued probe per primitive. Constants come from a fixed seed so
/// repeated evaluations inside finite differences see identical functions.
inline std::vector<PrimitiveCase> primitive_cases() {
  std::mt19937_64 rng(1234);
  const Tensor w34 = random_constant({3, 4}, rng);
  const Tensor w_batched = random_constant({2, 4, 3}, rng);
  const Tensor other = random_constant({2, 3, 4}, rng);
  const Tensor kernel = random_constant({3 * 4, 2}, rng);
  auto swap_index = std::make_shared<std::vector<std::int64_t>>();
  for (std::int64_t i = 0; i < 24; ++i) swap_index->push_back(i % 5 == 0 ? -1 : 23 - i);

  return {
      {"matmul (shared rhs)", {2, 3, 3}, [=](const Tensor& x) { return probe(matmul(x, w34)); }},
      {"matmul (batched)", {2, 3, 4}, [=](const Tensor& x) { return probe(matmul(x, w_batched)); }},
      {"matmul (rhs grad)", {4, 3}, [=](const Tensor& x) { return probe(matmul(other, x)); }},
      {"add", {2, 3, 4}, [=](const Tensor& x) { return probe(add(x, other)); }},
      {"sub", {2, 3, 4}, [=](const Tensor& x) { return probe(sub(other, x)); }},
      {"mul", {2, 3, 4}, [=](const Tensor& x) { return probe(mul(x, x)); }},
      {"div", {2, 3, 4},
       [=](const Tensor& x) { return probe(div(x, add_scalar(square(x), 1.0))); }},
      {"scalar-mul", {2, 3, 4}, [=](const Tensor& x) { return probe(scale(x, -2.5)); }},
      {"broadcast-add", {4}, [=](const Tensor& x) { return probe(add(other, x)); }},
      {"broadcast-mul", {3, 4}, [=](const Tensor& x) { return probe(mul(other, x)); }},
      {"concat", {2, 3, 4},
       [=](const Tensor& x) {
         const std::vector<Tensor> parts{x, other, square(x)};
         return probe(concat(parts, 2));
       }},
      {"slice", {2, 3, 4}, [=](const Tensor& x) { return probe(slice(x, 1, 1, 2)); }},
      {"reshape", {2, 3, 4}, [=](const Tensor& x) { return probe(reshape(x, {6, 4})); }},
      {"transpose", {2, 3, 4}, [=](const Tensor& x) { return probe(transpose(x)); }},
      {"sum", {2, 3, 4}, [=](const Tensor& x) { return sum(square(x)); }},
      {"mean", {2, 3, 4}, [=](const Tensor& x) { return mean(mul(x, other)); }},
      {"sum_axis", {2, 3, 4}, [=](const Tensor& x) { return probe(square(sum_axis(x, 1))); }},
      {"expand_axis", {2, 1, 4},
       [=](const Tensor& x) { return probe(mul(expand_axis(x, 1, 3), other)); }},
      {"softmax", {2, 3, 4}, [=](const Tensor& x) { return probe(softmax(x)); }},
      {"exp", {2, 3, 4}, [=](const Tensor& x) { return probe(exp(x)); }},
      {"log", {2, 3, 4}, [=](const Tensor& x) { return probe(log(add_scalar(square(x), 0.5))); }},
      {"sqrt", {2, 3, 4}, [=](const Tensor& x) { return probe(sqrt(add_scalar(square(x), 0.5))); }},
      {"square", {2, 3, 4}, [=](const Tensor& x) { return probe(square(x)); }},
      {"leaky_relu", {2, 3, 4}, [=](const Tensor& x) { return probe(leaky_relu(x, 0.2)); }},
      {"elu", {2, 3, 4}, [=](const Tensor& x) { return probe(elu(x)); }},
      {"sigmoid", {2, 3, 4}, [=](const Tensor& x) { return probe(sigmoid(x)); }},
      {"max-pool-1d", {2, 6, 4}, [=](const Tensor& x) { return probe(max_pool1d(x, 3, 2, 1)); }},
      {"conv-1d", {2, 6, 4}, [=](const Tensor& x) { return probe(conv1d(x, kernel, 1, 1)); }},
      {"conv-1d (kernel grad)", {12, 2},
       [=](const Tensor& k) { return probe(conv1d(other, k, 2, 1)); }},
      {"gather-rows", {2, 3, 4},
       [=](const Tensor& x) { return probe(gather(x, {4, 6}, swap_index)); }},
      {"scatter_add", {4, 6},
       [=](const Tensor& x) { return probe(scatter_add(x, {2, 3, 4}, swap_index)); }},
  };
}

}  // namespace tsgan::testing
