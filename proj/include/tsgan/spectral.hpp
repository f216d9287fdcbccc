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
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "tsgan/window.hpp"

// Wasserstein-Fourier distances: periodogram -> normalized PSD (a discrete
// distribution over normalized frequency), exact 1-D W2 between NPSDs, and
// set statistics built on it.

namespace tsgan::spectral {

class SpectralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct SpectralOptions {
  /// Subtract the signal mean before the transform.
  bool remove_mean = true;
};

/// One-sided power spectrum of a length-T signal: T/2 + 1 bins.
template <typename Scalar>
struct Psd {
  Vec<Scalar> power;
  std::size_t t = 0;
};

/// Normalized PSD on the grid k / T, k = 0..T/2.
template <typename Scalar>
struct Npsd {
  Vec<Scalar> freqs;
  Vec<Scalar> mass;

  std::size_t t() const { return 2 * static_cast<std::size_t>(freqs.size() - 1) + odd_; }
  bool same_grid(const Npsd& o) const { return t() == o.t(); }

  static Npsd on_grid(std::size_t t) {
    Npsd n;
    const auto bins = static_cast<Eigen::Index>(t / 2 + 1);
    n.freqs.resize(bins);
    for (Eigen::Index k = 0; k < bins; ++k) n.freqs[k] = Scalar(k) / Scalar(t);
    n.mass = Vec<Scalar>::Zero(bins);
    n.odd_ = t % 2;
    return n;
  }

 private:
  std::size_t odd_ = 0;
};

/// Members on one grid.
template <typename Scalar>
struct NpsdSet {
  std::vector<Npsd<Scalar>> members;
  std::size_t n() const { return members.size(); }
};

namespace detail {

// W2 is only Hoelder-1/2 in the masses, so cumulative rounding of 1e-16
// shows up as 1e-9 in the distance. Transforms and cumulative sums run in
// extended precision.
using Wide = long double;

template <typename Scalar>
Psd<Scalar> periodogram(std::span<const Scalar> signal, const SpectralOptions& opt) {
  const std::size_t t = signal.size();
  if (t < 2) throw SpectralError("periodogram: need T >= 2, got " + std::to_string(t));
  std::vector<Wide> x(signal.begin(), signal.end());
  if (opt.remove_mean) {
    Wide mean = 0;
    for (Wide v : x) mean += v;
    mean /= Wide(t);
    for (Wide& v : x) v -= mean;
  }
  Eigen::FFT<Wide> fft;
  std::vector<std::complex<Wide>> spectrum;
  fft.fwd(spectrum, x);

  Psd<Scalar> out;
  out.t = t;
  out.power.resize(static_cast<Eigen::Index>(t / 2 + 1));
  for (std::size_t k = 0; k <= t / 2; ++k) {
    Wide p = std::norm(spectrum[k]);
    if (k != 0 && 2 * k != t) p *= 2;  // fold the negative frequencies
    out.power[static_cast<Eigen::Index>(k)] = static_cast<Scalar>(p);
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
Psd<Scalar> periodogram(std::span<const Scalar> signal, const SpectralOptions& opt = {}) {
  return detail::periodogram(signal, opt);
}

template <typename Derived>
auto periodogram(const Eigen::MatrixBase<Derived>& signal, const SpectralOptions& opt = {}) {
  using Scalar = typename Derived::Scalar;
  const Vec<Scalar> copy = signal;
  return detail::periodogram(
      std::span<const Scalar>(copy.data(), static_cast<std::size_t>(copy.size())), opt);
}

template <typename Scalar>
Npsd<Scalar> normalize_psd(const Psd<Scalar>& psd) {
  if (psd.power.size() != static_cast<Eigen::Index>(psd.t / 2 + 1)) {
    throw SpectralError("normalize_psd: " + std::to_string(psd.power.size()) +
                        " bins do not match T = " + std::to_string(psd.t));
  }
  detail::Wide total = 0;
  for (Eigen::Index k = 0; k < psd.power.size(); ++k) {
    if (!(psd.power[k] >= 0)) throw SpectralError("normalize_psd: negative or non-finite power");
    total += psd.power[k];
  }
  if (!(total > 0) || !std::isfinite(total)) {
    throw SpectralError("normalize_psd: total power must be positive and finite");
  }
  auto out = Npsd<Scalar>::on_grid(psd.t);
  for (Eigen::Index k = 0; k < psd.power.size(); ++k) {
    out.mass[k] = static_cast<Scalar>(psd.power[k] / total);
  }
  return out;
}

template <typename Scalar>
Npsd<Scalar> npsd(std::span<const Scalar> signal, const SpectralOptions& opt = {}) {
  return normalize_psd(periodogram(signal, opt));
}

/// Exact W2 between the piecewise-constant quantile functions, by a merge of
/// the two cumulative-mass sequences.
template <typename Scalar>
Scalar wasserstein2_1d(const Npsd<Scalar>& a, const Npsd<Scalar>& b) {
  if (!a.same_grid(b)) {
    throw SpectralError("wasserstein2_1d: grids differ (T = " + std::to_string(a.t()) + " vs " +
                        std::to_string(b.t()) + ")");
  }
  using detail::Wide;
  const Eigen::Index n = a.mass.size();
  Wide ca = a.mass[0], cb = b.mass[0], u = 0, acc = 0;
  Eigen::Index i = 0, j = 0;
  while (i < n && j < n) {
    const Wide next = std::min(ca, cb);
    const Wide gap = Wide(a.freqs[i]) - Wide(b.freqs[j]);
    acc += (next - u) * gap * gap;
    u = next;
    if (ca <= next && ++i < n) ca += a.mass[i];
    if (cb <= next && ++j < n) cb += b.mass[j];
  }
  return static_cast<Scalar>(std::sqrt(acc));
}

/// W(A, B): mean over channels of the per-channel W2 of the NPSDs.
template <typename Scalar>
Scalar segment_distance(const WindowT<Scalar>& a, const WindowT<Scalar>& b,
                        const SpectralOptions& opt = {}) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw SpectralError("segment_distance: shapes differ");
  }
  if (a.cols() == 0) throw SpectralError("segment_distance: no channels");
  Scalar sum = 0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    sum += wasserstein2_1d(normalize_psd(periodogram(a.col(c), opt)),
                           normalize_psd(periodogram(b.col(c), opt)));
  }
  return sum / Scalar(a.cols());
}

template <typename Scalar>
Npsd<Scalar> mean_npsd(const NpsdSet<Scalar>& set) {
  if (set.members.empty()) throw SpectralError("mean_npsd: empty set");
  Npsd<Scalar> out = set.members.front();
  Vec<detail::Wide> sum = out.mass.template cast<detail::Wide>();
  for (std::size_t i = 1; i < set.n(); ++i) {
    if (!set.members[i].same_grid(out)) throw SpectralError("mean_npsd: grids differ");
    sum += set.members[i].mass.template cast<detail::Wide>();
  }
  out.mass = (sum / detail::Wide(set.n())).template cast<Scalar>();
  return out;
}

/// Mean over members of W2(member, center).
template <typename Scalar>
Scalar mean_distance(const NpsdSet<Scalar>& set, const Npsd<Scalar>& center) {
  if (set.members.empty()) throw SpectralError("mean_distance: empty set");
  Scalar sum = 0;
  for (const auto& m : set.members) sum += wasserstein2_1d(m, center);
  return sum / Scalar(set.n());
}

/// sigma = mean over members of W2(member, mean NPSD).
template <typename Scalar>
Scalar standard_distance(const NpsdSet<Scalar>& set) {
  return mean_distance(set, mean_npsd(set));
}

template <typename Scalar>
struct SetReport {
  Scalar intra_a = 0;
  Scalar intra_b = 0;
  Scalar inter = 0;
  /// Mean W2 over (a, b) pairs; see SetReportOptions::max_pairs.
  Scalar pairwise_mean = 0;
  Npsd<Scalar> mean_a, mean_b;
};

struct SetReportOptions {
  /// 0 means every pair. Otherwise pairs are taken at an even stride through
  /// the row-major pair index.
  std::size_t max_pairs = 0;
};

template <typename Scalar>
SetReport<Scalar> set_report(const NpsdSet<Scalar>& a, const NpsdSet<Scalar>& b,
                             const SetReportOptions& opt = {}) {
  SetReport<Scalar> r;
  r.mean_a = mean_npsd(a);
  r.mean_b = mean_npsd(b);
  if (!r.mean_a.same_grid(r.mean_b)) throw SpectralError("set_report: grids differ");
  r.intra_a = standard_distance(a);
  r.intra_b = standard_distance(b);
  r.inter = wasserstein2_1d(r.mean_a, r.mean_b);

  const std::size_t total = a.n() * b.n();
  const std::size_t count = opt.max_pairs == 0 ? total : std::min(total, opt.max_pairs);
  Scalar sum = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t p = count == total ? k : k * total / count;
    sum += wasserstein2_1d(a.members[p / b.n()], b.members[p % b.n()]);
  }
  r.pairwise_mean = sum / Scalar(count);
  return r;
}

/// Per-channel NPSD sets of a window collection, channel-major.
template <typename Scalar>
std::vector<NpsdSet<Scalar>> channel_sets(std::span<const WindowT<Scalar>> windows,
                                          const SpectralOptions& opt = {}) {
  if (windows.empty()) throw SpectralError("channel_sets: no windows");
  const auto t = windows.front().rows(), d = windows.front().cols();
  std::vector<NpsdSet<Scalar>> sets(static_cast<std::size_t>(d));
  for (const auto& w : windows) {
    if (w.rows() != t || w.cols() != d) throw SpectralError("channel_sets: window shapes differ");
    for (Eigen::Index c = 0; c < d; ++c) {
      sets[static_cast<std::size_t>(c)].members.push_back(normalize_psd(periodogram(w.col(c), opt)));
    }
  }
  return sets;
}

/// set_report per channel plus the channel average of every scalar field.
/// Because W(A, B) averages over channels and the mean NPSD is taken per
/// channel, the averaged fields are the segment-level statistics.
template <typename Scalar>
struct SegmentSetReport {
  std::vector<SetReport<Scalar>> channels;
  Scalar intra_a = 0, intra_b = 0, inter = 0, pairwise_mean = 0;
};

template <typename Scalar>
SegmentSetReport<Scalar> segment_set_report(std::span<const WindowT<Scalar>> a,
                                            std::span<const WindowT<Scalar>> b,
                                            const SpectralOptions& opt = {},
                                            const SetReportOptions& report_opt = {}) {
  const auto sa = channel_sets(a, opt), sb = channel_sets(b, opt);
  if (sa.size() != sb.size()) throw SpectralError("segment_set_report: channel counts differ");
  SegmentSetReport<Scalar> r;
  for (std::size_t c = 0; c < sa.size(); ++c) {
    r.channels.push_back(set_report(sa[c], sb[c], report_opt));
    r.intra_a += r.channels.back().intra_a;
    r.intra_b += r.channels.back().intra_b;
    r.inter += r.channels.back().inter;
    r.pairwise_mean += r.channels.back().pairwise_mean;
  }
  const Scalar d = Scalar(sa.size());
  r.intra_a /= d;
  r.intra_b /= d;
  r.inter /= d;
  r.pairwise_mean /= d;
  return r;
}

/// Mean per-channel NPSD of a window set.
template <typename Scalar>
std::vector<Npsd<Scalar>> channel_means(std::span<const WindowT<Scalar>> windows,
                                        const SpectralOptions& opt = {}) {
  std::vector<Npsd<Scalar>> out;
  for (const auto& set : channel_sets(windows, opt)) out.push_back(mean_npsd(set));
  return out;
}

/// Mean segment distance from each window to per-channel centers:
/// mean over windows of (1/D) sum_c W2(npsd(w_c), centers[c]).
template <typename Scalar>
Scalar segment_mean_distance(std::span<const WindowT<Scalar>> windows,
                             std::span<const Npsd<Scalar>> centers,
                             const SpectralOptions& opt = {}) {
  const auto sets = channel_sets(windows, opt);
  if (sets.size() != centers.size()) throw SpectralError("segment_mean_distance: channel counts differ");
  Scalar sum = 0;
  for (std::size_t c = 0; c < sets.size(); ++c) sum += mean_distance(sets[c], centers[c]);
  return sum / Scalar(sets.size());
}

}  // namespace tsgan::spectral
