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

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tsgan {

/// T x D, one row per time step.
template <typename Scalar>
using WindowT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Window = WindowT<double>;

struct ConditionLabel {
  std::vector<double> onehot;
  std::optional<double> lifetime;

  std::size_t dim() const { return onehot.size() + (lifetime ? 1 : 0); }
  /// onehot followed by the lifetime, if any.
  std::vector<double> flat() const {
    std::vector<double> out = onehot;
    if (lifetime) out.push_back(*lifetime);
    return out;
  }
  /// Throws std::invalid_argument unless entries lie in [0, 1]; with
  /// `strict_onehot` exactly one entry must also be 1 and the rest 0.
  void validate(bool strict_onehot = true) const {
    std::size_t ones = 0;
    for (double v : onehot) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("label entry outside [0, 1]");
      if (v == 1.0) ++ones;
      else if (strict_onehot && v != 0.0) throw std::invalid_argument("label is not one-hot");
    }
    if (strict_onehot && ones != 1) throw std::invalid_argument("label must have exactly one hot entry");
    if (lifetime && !(*lifetime >= 0.0 && *lifetime <= 1.0)) {
      throw std::invalid_argument("lifetime outside [0, 1]");
    }
  }
};

/// Per-channel z-score parameters of one subset.
struct NormParams {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd std;

  static NormParams identity(Eigen::Index d) {
    return {Eigen::RowVectorXd::Zero(d), Eigen::RowVectorXd::Ones(d)};
  }

  template <typename Derived>
  Window apply(const Eigen::MatrixBase<Derived>& w) const {
    check(w.cols());
    return (w.rowwise() - mean).array().rowwise() / std.array();
  }
  template <typename Derived>
  Window invert(const Eigen::MatrixBase<Derived>& w) const {
    check(w.cols());
    return (w.array().rowwise() * std.array()).matrix().rowwise() + mean;
  }

 private:
  void check(Eigen::Index d) const {
    if (d != mean.size() || d != std.size()) {
      throw std::invalid_argument("NormParams has " + std::to_string(mean.size()) +
                                  " channels, window has " + std::to_string(d));
    }
  }
};

}  // namespace tsgan
