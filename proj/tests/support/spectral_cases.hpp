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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "tsgan/spectral.hpp"

// Signals and independent oracles for the spectral metric.
namespace tsgan::testing {

inline constexpr double kPi = std::numbers::pi;

inline std::vector<double> cosine(std::size_t t, double bin, double amp, double phase = 0.0) {
  std::vector<double> x(t);
  for (std::size_t n = 0; n < t; ++n) {
    x[n] = amp * std::cos(2 * kPi * bin * static_cast<double>(n) / static_cast<double>(t) + phase);
  }
  return x;
}

inline std::span<const double> view(const std::vector<double>& v) { return {v.data(), v.size()}; }

inline spectral::Npsd<double> point_mass(std::size_t t, std::size_t k) {
  auto n = spectral::Npsd<double>::on_grid(t);
  n.mass[static_cast<Eigen::Index>(k)] = 1.0;
  return n;
}

// Random NPSD with roughly a third of the bins empty.
inline spectral::Npsd<double> random_npsd(std::size_t t, std::mt19937_64& rng) {
  auto n = spectral::Npsd<double>::on_grid(t);
  std::exponential_distribution<double> mass(1.0);
  std::bernoulli_distribution empty(0.3);
  do {
    for (Eigen::Index k = 0; k < n.mass.size(); ++k) n.mass[k] = empty(rng) ? 0.0 : mass(rng);
  } while (n.mass.sum() == 0.0);
  n.mass /= n.mass.sum();
  return n;
}

inline Window random_window(std::size_t t, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Window w(t, d);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = g(rng);
  return w;
}

// |X_k|^2 by the O(T^2) DFT sum, one-sided with interior doubling.
inline std::vector<double> naive_periodogram(const std::vector<double>& x, bool remove_mean) {
  const std::size_t t = x.size();
  double mean = 0.0;
  if (remove_mean) {
    for (double v : x) mean += v;
    mean /= static_cast<double>(t);
  }
  std::vector<double> out(t / 2 + 1);
  for (std::size_t k = 0; k <= t / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < t; ++n) {
      const double a = -2 * kPi * static_cast<double>(k * n % t) / static_cast<double>(t);
      re += (x[n] - mean) * std::cos(a);
      im += (x[n] - mean) * std::sin(a);
    }
    out[k] = (re * re + im * im) * ((k == 0 || 2 * k == t) ? 1.0 : 2.0);
  }
  return out;
}

// sqrt of the midpoint Riemann sum of (Qa(u) - Qb(u))^2 on `steps` cells.
inline double riemann_w2(const spectral::Npsd<double>& a, const spectral::Npsd<double>& b,
                         std::size_t steps) {
  auto cdf = [](const spectral::Npsd<double>& n) {
    std::vector<double> c(static_cast<std::size_t>(n.mass.size()));
    double run = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = run += n.mass[static_cast<Eigen::Index>(k)];
    c.back() = std::numeric_limits<double>::infinity();
    return c;
  };
  const auto ca = cdf(a), cb = cdf(b);
  auto quantile = [](const std::vector<double>& c, const spectral::Npsd<double>& n, double u) {
    const auto k = std::lower_bound(c.begin(), c.end(), u) - c.begin();
    return n.freqs[k];
  };
  double acc = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double u = (static_cast<double>(s) + 0.5) / static_cast<double>(steps);
    const double gap = quantile(ca, a, u) - quantile(cb, b, u);
    acc += gap * gap;
  }
  return std::sqrt(acc / static_cast<double>(steps));
}

}  // namespace tsgan::testing
