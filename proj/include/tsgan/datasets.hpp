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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsgan/window.hpp"

// Data supply: compound-sine artificial classes, accelerometer CSV ingestion,
// windowing with lifetime labels, splitting, per-subset normalization and the
// TSW1 corpus format.

namespace tsgan::data {

using Rng = std::mt19937_64;

/// Malformed input files, bad flags on data and impossible requests.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RealRange {
  double lo = 0.0, hi = 0.0;
};
struct CountRange {
  std::size_t lo = 1, hi = 1;
};

struct ArtificialClassSpec {
  std::string name;
  CountRange n_components;
  /// Cycles per window. Frequencies are drawn as whole cycles in [lo, hi].
  RealRange freq;
  RealRange amp;
  /// Radians, [lo, hi).
  RealRange phase;

  /// Throws DataError on empty or inverted ranges or no whole cycle in freq.
  void validate() const;
};

/// easy / medium / hard, disjoint in every field.
std::vector<ArtificialClassSpec> default_artificial_specs();

/// Throws DataError unless every pair of classes is disjoint in components,
/// frequency, amplitude and phase.
void check_disjoint(std::span<const ArtificialClassSpec> specs);

struct Provenance {
  /// Run id, class name, or "synthetic".
  std::string source;
  std::uint64_t start = 0;
  bool synthetic = false;
};

struct WindowRecord {
  Window window;
  ConditionLabel label;
  Provenance source;
};

/// T x D window; each channel an independent sum of m sinusoids
/// amp * sin(2 pi f n / T + phase), m, f, amp, phase drawn from the spec.
Window gen_compound_wave(const ArtificialClassSpec& spec, std::size_t t, std::size_t d, Rng& rng);

struct ArtificialOptions {
  /// Throw unless n_total divides evenly; otherwise the first
  /// n_total % classes classes get one extra window.
  bool strict_balance = false;
};

/// Class-major records labelled with a one-hot of the class index.
std::vector<WindowRecord> gen_artificial_dataset(std::size_t n_total, std::size_t t, std::size_t d,
                                                 std::span<const ArtificialClassSpec> specs,
                                                 std::uint64_t seed,
                                                 const ArtificialOptions& opt = {});

/// Per-class window counts for n_total over `classes` classes.
std::vector<std::size_t> class_counts(std::size_t n_total, std::size_t classes);

/// One run-to-failure recording: N x D, time-major.
struct RunSeries {
  std::string run_id;
  Eigen::MatrixXd series;
};

struct CsvOptions {
  /// Zero-based column indices of the channels.
  std::vector<std::size_t> columns{4, 5};
  /// ',' or ';'; 0 sniffs the first line.
  char delimiter = 0;
  bool header = false;
};

/// Concatenates time-ordered CSV files of one run. Errors name file and line.
RunSeries ingest_accel_csv(std::span<const std::filesystem::path> files, const std::string& run_id,
                           const CsvOptions& opt = {});

/// Windows at offsets 0, stride, ... with label = run one-hot plus lifetime
/// start / (N - t) (0 when N == t).
std::vector<WindowRecord> window_series(const RunSeries& run, std::size_t t,
                                        std::span<const double> run_onehot, std::size_t stride);

struct SplitFractions {
  double test = 0.20, train = 0.70, validate = 0.10;
};

enum class Subset : std::uint8_t { test, train, validate };
const char* subset_name(Subset s);

/// Record indices of each subset.
struct Split {
  std::vector<std::size_t> test, train, validate;

  const std::vector<std::size_t>& operator[](Subset s) const;
  /// Subset of every record, by index.
  std::vector<Subset> assignment(std::size_t n) const;
};

/// Seeded shuffle, then contiguous test/train/validate blocks. Test and
/// validate get n * fraction rounded to nearest (ties down); train the rest.
Split split_dataset(std::size_t n, const SplitFractions& fractions, std::uint64_t seed);

/// Per-channel mean and population standard deviation of the windows at
/// `indices`, all time steps pooled.
NormParams fit_norm(std::span<const WindowRecord> records, std::span<const std::size_t> indices);
NormParams fit_norm(std::span<const WindowRecord> records);

inline Window apply_norm(const Window& w, const NormParams& p) { return p.apply(w); }
inline Window invert_norm(const Window& w, const NormParams& p) { return p.invert(w); }

// --- TSW1 corpus -------------------------------------------------------------

struct CorpusHeader {
  std::uint32_t count = 0, t = 0, d = 0, label_dim = 0;
};

/// Sidecar metadata stored next to a corpus as <path>.json.
struct CorpusMeta {
  /// Leading one-hot entries of each label; the rest is the lifetime.
  std::size_t onehot_dim = 0;
  std::map<std::string, NormParams> norms;
  std::optional<Split> split;
  std::optional<std::uint64_t> split_seed;
  std::vector<Provenance> provenance;
};

std::filesystem::path sidecar_path(const std::filesystem::path& corpus);

/// Writes the corpus and its sidecar. Labels must share one dimension and
/// windows one shape. Provenance is taken from the records.
void write_corpus(const std::filesystem::path& path, std::span<const WindowRecord> records,
                  CorpusMeta meta);

struct Corpus {
  CorpusHeader header;
  CorpusMeta meta;
  std::vector<WindowRecord> records;
};

/// Reads a corpus; the sidecar is optional (without it every label entry is
/// treated as one-hot).
Corpus read_corpus(const std::filesystem::path& path);
CorpusHeader read_corpus_header(const std::filesystem::path& path);

}  // namespace tsgan::data
