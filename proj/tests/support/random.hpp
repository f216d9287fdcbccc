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

#include <random>
#include <vector>

#include "tsgan/ops.hpp"
#include "tsgan/tensor.hpp"

namespace tsgan::testing {

inline std::vector<double> normal_values(std::size_t n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> dist(0.0, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline Tensor random_constant(Shape shape, std::mt19937_64& rng, double sd = 1.0) {
  const auto n = numel(shape);
  return Tensor::constant(std::move(shape), normal_values(n, rng, sd));
}

inline Tensor random_parameter(Shape shape, std::mt19937_64& rng, double sd = 1.0) {
  const auto n = numel(shape);
  return Tensor::parameter(std::move(shape), normal_values(n, rng, sd));
}

/// Scalar probe sum(out * w) with a fixed random w, so every output element
/// carries a distinct weight in the gradient.
inline Tensor probe(const Tensor& out, std::uint64_t seed = 99) {
  std::mt19937_64 rng(seed);
  return sum(mul(out, random_constant(out.shape(), rng)));
}

}  // namespace tsgan::testing
