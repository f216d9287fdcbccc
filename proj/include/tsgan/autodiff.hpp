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
#include <string>
#include <unordered_map>
#include <vector>

#include "tsgan/tensor.hpp"

namespace tsgan {

/// Nodes reachable from `root` that carry history, inputs before outputs.
std::vector<detail::Node*> topological_order(const Tensor& root);

/// Reverse-mode derivatives of a scalar with respect to `wrt`. Tensors that
/// do not influence the loss get zeros. With `create_graph` the returned
/// gradients are themselves differentiable.
std::vector<Tensor> grad(const Tensor& loss, std::span<const Tensor> wrt,
                         bool create_graph = false);

/// Gradient arrays of every requires-grad leaf reached by a backward pass,
/// keyed by tensor id.
class Gradients {
 public:
  /// Zeros when the leaf was not reached.
  std::vector<double> of(const Tensor& leaf) const;
  bool contains(const Tensor& leaf) const { return grads_.contains(leaf.id()); }
  std::size_t size() const { return grads_.size(); }

 private:
  friend Gradients backward(const Tensor& loss);
  std::unordered_map<std::uint64_t, std::vector<double>> grads_;
};

Gradients backward(const Tensor& loss);

struct GradCheckOptions {
  double step = 1e-4;
  double tol = 1e-4;
  /// 0 checks every coordinate; otherwise a seeded sample per tensor.
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 0;
  /// Exclude coordinates whose +-step stencil changes a branch decision of a
  /// non-smooth op (see BranchTrace); they are counted in `kinks`.
  bool skip_kinks = true;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool pass = true;
  std::size_t checked = 0;
  /// Coordinates excluded because the stencil crossed a kink.
  std::size_t kinks = 0;
  /// Tensor index and flat coordinate of the worst element.
  std::size_t worst_tensor = 0;
  std::size_t worst_coord = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares reverse-mode gradients of `f` against central differences
/// (f(x + h e_i) - f(x - h e_i)) / 2h, relative error taken against
/// max(|a|, |b|, 1e-8). `leaves` are perturbed in place and restored.
/// Central differences assume f is smooth over [x - h, x + h]; a stencil that
/// crosses a ReLU-type kink, an argmax switch or a sparse-selection change
/// measures the jump instead of the derivative.
GradCheckReport grad_check(const std::function<Tensor()>& f, std::span<const Tensor> leaves,
                           const GradCheckOptions& options = {});

GradCheckReport grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x,
                           double step, double tol);

}  // namespace tsgan
