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

#include "tsgan/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_set>

#include "tsgan/ops.hpp"

namespace tsgan {

namespace {

void require_scalar(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ShapeError("backward: loss must be a scalar, got " +
                     (loss.defined() ? to_string(loss.shape()) : std::string("undefined")));
  }
}

// Runs the reverse sweep and returns accumulated gradients per node.
std::unordered_map<detail::Node*, Tensor> sweep(const Tensor& loss, bool create_graph) {
  std::unordered_map<detail::Node*, Tensor> acc;
  if (!loss.requires_grad()) return acc;
  const auto order = topological_order(loss);
  GradModeGuard mode(create_graph);
  acc.emplace(loss.node().get(), Tensor::full(loss.shape(), 1.0));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    auto found = acc.find(node);
    if (found == acc.end() || !node->backward) continue;
    const Tensor self(node->shared_from_this());
    const Tensor g = found->second;
    auto input_grads = node->backward(self, g);
    for (std::size_t i = 0; i < node->inputs.size(); ++i) {
      const Tensor& input = node->inputs[i];
      if (i >= input_grads.size() || !input_grads[i].defined() || !input.requires_grad()) continue;
      if (input_grads[i].shape() != input.shape()) {
        throw std::logic_error(std::string("backward of ") + node->op +
                               " produced gradient of shape " + to_string(input_grads[i].shape()) +
                               " for input " + to_string(input.shape()));
      }
      auto [slot, inserted] = acc.try_emplace(input.node().get(), input_grads[i]);
      if (!inserted) slot->second = add(slot->second, input_grads[i]);
    }
  }
  return acc;
}

}  // namespace

std::vector<detail::Node*> topological_order(const Tensor& root) {
  std::vector<detail::Node*> order;
  if (!root.defined() || !root.requires_grad()) return order;
  std::unordered_set<detail::Node*> visited;
  // Iterative post-order DFS; second flag marks "children already pushed".
  std::vector<std::pair<detail::Node*, bool>> stack{{root.node().get(), false}};
  while (!stack.empty()) {
    auto [node, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      order.push_back(node);
      continue;
    }
    if (!visited.insert(node).second) continue;
    stack.emplace_back(node, true);
    for (const auto& input : node->inputs) {
      if (input.requires_grad() && !visited.contains(input.node().get())) {
        stack.emplace_back(input.node().get(), false);
      }
    }
  }
  return order;
}

std::vector<Tensor> grad(const Tensor& loss, std::span<const Tensor> wrt, bool create_graph) {
  require_scalar(loss);
  auto acc = sweep(loss, create_graph);
  std::vector<Tensor> out;
  out.reserve(wrt.size());
  for (const auto& t : wrt) {
    auto it = acc.find(t.node().get());
    out.push_back(it != acc.end() ? it->second : Tensor::zeros(t.shape()));
  }
  return out;
}

std::vector<double> Gradients::of(const Tensor& leaf) const {
  auto it = grads_.find(leaf.id());
  if (it == grads_.end()) return std::vector<double>(leaf.numel(), 0.0);
  return it->second;
}

Gradients backward(const Tensor& loss) {
  require_scalar(loss);
  Gradients result;
  auto acc = sweep(loss, false);
  for (auto& [node, g] : acc) {
    if (node->backward || !node->requires_grad) continue;
    const auto v = g.values();
    result.grads_.emplace(node->id, std::vector<double>(v.begin(), v.end()));
  }
  return result;
}

GradCheckReport grad_check(const std::function<Tensor()>& f, std::span<const Tensor> leaves,
                           const GradCheckOptions& options) {
  if (!(options.step > 0.0)) throw std::invalid_argument("grad_check: step must be positive");
  std::uint64_t base_branches = 0;
  Tensor loss;
  {
    BranchTrace trace;
    loss = f();
    base_branches = trace.fingerprint();
  }
  require_scalar(loss);
  // f(x) with the branch fingerprint of the evaluation.
  auto evaluate = [&f](std::uint64_t& branches) {
    BranchTrace trace;
    const double v = f().item();
    branches = trace.fingerprint();
    return v;
  };
  const auto analytic = grad(loss, leaves);

  GradCheckReport report;
  std::mt19937_64 rng(options.seed);
  for (std::size_t ti = 0; ti < leaves.size(); ++ti) {
    Tensor leaf = leaves[ti];
    const auto original = std::vector<double>(leaf.values().begin(), leaf.values().end());
    std::vector<std::size_t> coords(original.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.max_coords_per_tensor > 0 && coords.size() > options.max_coords_per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coords_per_tensor);
      std::sort(coords.begin(), coords.end());
    }
    auto probe = original;
    for (std::size_t c : coords) {
      std::uint64_t up_branches = 0, down_branches = 0;
      probe[c] = original[c] + options.step;
      leaf.assign(probe);
      const double up = evaluate(up_branches);
      probe[c] = original[c] - options.step;
      leaf.assign(probe);
      const double down = evaluate(down_branches);
      probe[c] = original[c];
      leaf.assign(probe);
      if (options.skip_kinks && (up_branches != base_branches || down_branches != base_branches)) {
        ++report.kinks;
        continue;
      }

      const double numeric = (up - down) / (2.0 * options.step);
      const double a = analytic[ti].values()[c];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      double rel = std::abs(a - numeric) / denom;
      if (std::isnan(rel)) rel = std::numeric_limits<double>::infinity();
      if (report.checked++ == 0 || rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst_tensor = ti;
        report.worst_coord = c;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
    leaf.assign(original);
  }
  report.pass = report.max_rel_err <= options.tol;
  return report;
}

GradCheckReport grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x,
                           double step, double tol) {
  Tensor leaf = Tensor::parameter(x.shape(), std::vector<double>(x.values().begin(), x.values().end()));
  const std::vector<Tensor> leaves{leaf};
  return grad_check([&] { return f(leaf); }, leaves, GradCheckOptions{step, tol, 0, 0, true});
}

}  // namespace tsgan
