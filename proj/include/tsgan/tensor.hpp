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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsgan {

/// Extents of a tensor, outermost first. Rank 0 is a scalar.
using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class Tensor;

namespace detail {

using BackwardFn =
    std::function<std::vector<Tensor>(const Tensor& out, const Tensor& grad_out)>;

struct Node : std::enable_shared_from_this<Node> {
  Shape shape;
  std::vector<double> value;
  bool requires_grad = false;
  std::vector<Tensor> inputs;
  BackwardFn backward;
  const char* op = "leaf";
  std::uint64_t id = 0;
};

}  // namespace detail

/// Dense row-major array of doubles, rank 0 to 3, with an optional position in
/// the autodiff graph. Copies are cheap handles onto the same node; values are
/// immutable once produced by an op. Leaves may be reassigned (optimizer
/// updates, finite differences).
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Shape shape, std::vector<double> values);
  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double value);
  static Tensor scalar(double value);
  /// Leaf that requires grad.
  static Tensor parameter(Shape shape, std::vector<double> values);

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size(std::size_t axis) const;
  std::size_t numel() const;
  std::span<const double> values() const;
  double item() const;
  double at(std::size_t flat) const { return values()[flat]; }

  bool requires_grad() const;
  bool is_leaf() const;
  std::uint64_t id() const;
  const char* op_name() const;
  const std::vector<Tensor>& inputs() const;

  /// Same values, no graph history, no grad.
  Tensor detach() const;

  /// Overwrites the values of a leaf in place.
  void assign(std::span<const double> values);

  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  const std::shared_ptr<detail::Node>& node() const { return node_; }

 private:
  std::shared_ptr<detail::Node> node_;
};

/// Whether newly created ops record graph history on this thread.
bool grad_enabled();

class GradModeGuard {
 public:
  explicit GradModeGuard(bool enabled);
  ~GradModeGuard();
  GradModeGuard(const GradModeGuard&) = delete;
  GradModeGuard& operator=(const GradModeGuard&) = delete;

 private:
  bool previous_;
};

class NoGradGuard : public GradModeGuard {
 public:
  NoGradGuard() : GradModeGuard(false) {}
};

/// Fingerprint of the branch decisions (activation sides, argmax picks,
/// sparse selections) taken by non-smooth ops on this thread while the trace
/// is alive. Traces nest; only the innermost one records.
class BranchTrace {
 public:
  BranchTrace();
  ~BranchTrace();
  BranchTrace(const BranchTrace&) = delete;
  BranchTrace& operator=(const BranchTrace&) = delete;

  std::uint64_t fingerprint() const { return hash_; }

  static bool active();
  /// Mixes one decision into the innermost trace, if any.
  static void record(std::uint64_t decision);

 private:
  BranchTrace* previous_;
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

/// Creates an op output. History is kept only when grad mode is on and some
/// input requires grad. `backward` returns one gradient per input; an
/// undefined Tensor means "no contribution".
Tensor make_op(const char* op, Shape shape, std::vector<double> value,
               std::vector<Tensor> inputs, detail::BackwardFn backward);

}  // namespace tsgan
