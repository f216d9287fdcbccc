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

#include <cmath>
#include <numbers>

#include "tsgan/datasets.hpp"

namespace tsgan::data {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long first_cycle(const RealRange& r) { return static_cast<long>(std::ceil(r.lo)); }
long last_cycle(const RealRange& r) { return static_cast<long>(std::floor(r.hi)); }

bool valid(const RealRange& r) { return std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi; }

// [lo, hi) when lo < hi, the single point lo otherwise.
bool overlaps(const RealRange& a, const RealRange& b) {
  auto contains = [](const RealRange& r, double x) { return r.lo == r.hi ? x == r.lo : r.lo <= x && x < r.hi; };
  if (a.lo == a.hi) return contains(b, a.lo);
  if (b.lo == b.hi) return contains(a, b.lo);
  return std::max(a.lo, b.lo) < std::min(a.hi, b.hi);
}

}  // namespace

void ArtificialClassSpec::validate() const {
  const std::string who = "class '" + name + "': ";
  if (n_components.lo < 1 || n_components.lo > n_components.hi) {
    throw DataError(who + "n_components must satisfy 1 <= lo <= hi");
  }
  if (!valid(freq) || !valid(amp) || !valid(phase)) {
    throw DataError(who + "ranges must be finite with lo <= hi");
  }
  if (freq.lo < 0.0 || first_cycle(freq) > last_cycle(freq)) {
    throw DataError(who + "frequency range holds no whole cycle count >= 0");
  }
}

std::vector<ArtificialClassSpec> default_artificial_specs() {
  constexpr double third = kTwoPi / 3.0;
  return {
      {"easy", {1, 1}, {1.0, 4.0}, {0.7, 1.0}, {0.0, third}},
      {"medium", {2, 3}, {6.0, 12.0}, {0.4, 0.7}, {third, 2.0 * third}},
      {"hard", {4, 6}, {14.0, 24.0}, {0.1, 0.4}, {2.0 * third, kTwoPi}},
  };
}

void check_disjoint(std::span<const ArtificialClassSpec> specs) {
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (std::size_t j = i + 1; j < specs.size(); ++j) {
      const auto& a = specs[i];
      const auto& b = specs[j];
      const std::string pair = "classes '" + a.name + "' and '" + b.name + "' overlap in ";
      if (std::max(a.n_components.lo, b.n_components.lo) <= std::min(a.n_components.hi, b.n_components.hi)) {
        throw DataError(pair + "n_components");
      }
      if (std::max(first_cycle(a.freq), first_cycle(b.freq)) <= std::min(last_cycle(a.freq), last_cycle(b.freq))) {
        throw DataError(pair + "frequency");
      }
      if (overlaps(a.amp, b.amp)) throw DataError(pair + "amplitude");
      if (overlaps(a.phase, b.phase)) throw DataError(pair + "phase");
    }
  }
}

Window gen_compound_wave(const ArtificialClassSpec& spec, std::size_t t, std::size_t d, Rng& rng) {
  spec.validate();
  if (t < 8) throw DataError("gen_compound_wave: t must be >= 8, got " + std::to_string(t));
  if (d < 1) throw DataError("gen_compound_wave: d must be >= 1");
  std::uniform_int_distribution<std::size_t> count(spec.n_components.lo, spec.n_components.hi);
  std::uniform_int_distribution<long> cycles(first_cycle(spec.freq), last_cycle(spec.freq));
  std::uniform_real_distribution<double> amp(spec.amp.lo, spec.amp.hi);
  std::uniform_real_distribution<double> phase(spec.phase.lo, spec.phase.hi);

  Window w = Window::Zero(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d));
  for (std::size_t c = 0; c < d; ++c) {
    const std::size_t m = count(rng);
    for (std::size_t k = 0; k < m; ++k) {
      const auto f = static_cast<std::size_t>(cycles(rng));
      const double a = amp(rng);
      const double p = phase(rng);
      for (std::size_t n = 0; n < t; ++n) {
        // (f * n) mod t keeps the angle in [0, 2 pi) exactly.
        const double angle = kTwoPi * static_cast<double>(f * n % t) / static_cast<double>(t);
        w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c)) += a * std::sin(angle + p);
      }
    }
  }
  return w;
}

std::vector<std::size_t> class_counts(std::size_t n_total, std::size_t classes) {
  if (classes == 0) throw DataError("class_counts: no classes");
  std::vector<std::size_t> out(classes, n_total / classes);
  for (std::size_t c = 0; c < n_total % classes; ++c) ++out[c];
  return out;
}

std::vector<WindowRecord> gen_artificial_dataset(std::size_t n_total, std::size_t t, std::size_t d,
                                                 std::span<const ArtificialClassSpec> specs,
                                                 std::uint64_t seed, const ArtificialOptions& opt) {
  if (specs.empty()) throw DataError("gen_artificial_dataset: no class specs");
  for (const auto& s : specs) s.validate();
  check_disjoint(specs);
  if (t < 8 || d < 1) throw DataError("gen_artificial_dataset: need t >= 8 and d >= 1");
  if (opt.strict_balance && n_total % specs.size() != 0) {
    throw DataError("gen_artificial_dataset: " + std::to_string(n_total) +
                    " windows cannot be split evenly over " + std::to_string(specs.size()) +
                    " classes");
  }
  Rng rng(seed);
  const auto counts = class_counts(n_total, specs.size());
  std::vector<WindowRecord> out;
  out.reserve(n_total);
  for (std::size_t c = 0; c < specs.size(); ++c) {
    std::vector<double> onehot(specs.size(), 0.0);
    onehot[c] = 1.0;
    for (std::size_t i = 0; i < counts[c]; ++i) {
      out.push_back({gen_compound_wave(specs[c], t, d, rng), {onehot, std::nullopt}, {specs[c].name, i, false}});
    }
  }
  return out;
}

}  // namespace tsgan::data
