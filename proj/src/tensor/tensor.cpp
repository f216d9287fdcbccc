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

#include "tsgan/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>

namespace tsgan {

namespace {

thread_local bool g_grad_enabled = true;
thread_local BranchTrace* g_branch_trace = nullptr;
std::atomic<std::uint64_t> g_next_id{1};

std::shared_ptr<detail::Node> new_node(Shape shape, std::vector<double> values) {
  if (shape.size() > 3) throw ShapeError("tensor rank above 3: " + to_string(shape));
  if (numel(shape) != values.size()) {
    throw ShapeError("value count " + std::to_string(values.size()) + " does not match shape " +
                     to_string(shape));
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
  return node;
}

const detail::Node& deref(const std::shared_ptr<detail::Node>& node) {
  if (!node) throw std::logic_error("use of an undefined tensor");
  return *node;
}

}  // namespace

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

Tensor Tensor::constant(Shape shape, std::vector<double> values) {
  return Tensor(new_node(std::move(shape), std::move(values)));
}

Tensor Tensor::zeros(Shape shape) {
  const auto n = tsgan::numel(shape);
  return constant(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(Shape shape, double value) {
  const auto n = tsgan::numel(shape);
  return constant(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return constant({}, {value}); }

Tensor Tensor::parameter(Shape shape, std::vector<double> values) {
  auto node = new_node(std::move(shape), std::move(values));
  node->requires_grad = true;
  return Tensor(std::move(node));
}

const Shape& Tensor::shape() const { return deref(node_).shape; }

std::size_t Tensor::size(std::size_t axis) const {
  const auto& s = shape();
  if (axis >= s.size()) throw ShapeError("axis out of range for shape " + to_string(s));
  return s[axis];
}

std::size_t Tensor::numel() const { return deref(node_).value.size(); }

std::span<const double> Tensor::values() const { return deref(node_).value; }

double Tensor::item() const {
  if (numel() != 1) throw ShapeError("item() on tensor of shape " + to_string(shape()));
  return node_->value[0];
}

bool Tensor::requires_grad() const { return deref(node_).requires_grad; }

bool Tensor::is_leaf() const { return !deref(node_).backward; }

std::uint64_t Tensor::id() const { return deref(node_).id; }

const char* Tensor::op_name() const { return deref(node_).op; }

const std::vector<Tensor>& Tensor::inputs() const { return deref(node_).inputs; }

Tensor Tensor::detach() const { return constant(shape(), deref(node_).value); }

void Tensor::assign(std::span<const double> values) {
  if (!is_leaf()) throw std::logic_error("assign() on a non-leaf tensor");
  if (values.size() != node_->value.size()) {
    throw ShapeError("assign() with " + std::to_string(values.size()) + " values into shape " +
                     to_string(node_->shape));
  }
  std::copy(values.begin(), values.end(), node_->value.begin());
}

bool grad_enabled() { return g_grad_enabled; }

GradModeGuard::GradModeGuard(bool enabled) : previous_(g_grad_enabled) {
  g_grad_enabled = enabled;
}

GradModeGuard::~GradModeGuard() { g_grad_enabled = previous_; }

BranchTrace::BranchTrace() : previous_(g_branch_trace) { g_branch_trace = this; }

BranchTrace::~BranchTrace() { g_branch_trace = previous_; }

bool BranchTrace::active() { return g_branch_trace != nullptr; }

void BranchTrace::record(std::uint64_t decision) {
  if (!g_branch_trace) return;
  auto& h = g_branch_trace->hash_;
  h = (h ^ decision) * 0x100000001b3ULL;
}

Tensor make_op(const char* op, Shape shape, std::vector<double> value, std::vector<Tensor> inputs,
               detail::BackwardFn backward) {
  auto node = new_node(std::move(shape), std::move(value));
  node->op = op;
  const bool track = g_grad_enabled && std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) {
                       return t.requires_grad();
                     });
  if (track) {
    node->requires_grad = true;
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

}  // namespace tsgan
