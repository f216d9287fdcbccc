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

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string_view>

#include "tsgan/datasets.hpp"

namespace tsgan::data {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == delim) {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

RunSeries ingest_accel_csv(std::span<const std::filesystem::path> files, const std::string& run_id,
                           const CsvOptions& opt) {
  if (files.empty()) throw DataError("run '" + run_id + "': no files");
  if (opt.columns.empty()) throw DataError("ingest: no channel columns selected");
  std::vector<double> values;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw DataError(file.string() + ": cannot open");
    std::string line;
    std::size_t line_no = 0;
    char delim = opt.delimiter;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      if (delim == 0) delim = line.find(';') != std::string::npos && line.find(',') == std::string::npos ? ';' : ',';
      if (opt.header && line_no == 1) continue;
      const auto fields = split_fields(line, delim);
      const std::string where = file.string() + ":" + std::to_string(line_no) + ": ";
      for (std::size_t col : opt.columns) {
        if (col >= fields.size()) {
          throw DataError(where + "missing column " + std::to_string(col) + " (row has " +
                          std::to_string(fields.size()) + " fields)");
        }
        const auto f = fields[col];
        double v = 0.0;
        const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc() || end != f.data() + f.size() || f.empty() || !std::isfinite(v)) {
          throw DataError(where + "column " + std::to_string(col) + ": '" + std::string(f) +
                          "' is not a finite number");
        }
        values.push_back(v);
      }
    }
  }
  const std::size_t d = opt.columns.size();
  if (values.empty()) throw DataError("run '" + run_id + "': no samples");
  RunSeries run{run_id, Eigen::MatrixXd(static_cast<Eigen::Index>(values.size() / d), static_cast<Eigen::Index>(d))};
  for (std::size_t i = 0; i < values.size(); ++i) {
    run.series(static_cast<Eigen::Index>(i / d), static_cast<Eigen::Index>(i % d)) = values[i];
  }
  return run;
}

std::vector<WindowRecord> window_series(const RunSeries& run, std::size_t t,
                                        std::span<const double> run_onehot, std::size_t stride) {
  if (!std::has_single_bit(t)) {
    throw DataError("window length must be a power of two, got " + std::to_string(t));
  }
  if (stride < 1) throw DataError("stride must be >= 1");
  if (run_onehot.empty()) throw DataError("run one-hot is empty");
  const auto n = static_cast<std::size_t>(run.series.rows());
  if (n < t) {
    throw DataError("run '" + run.run_id + "' has " + std::to_string(n) + " samples, shorter than t = " +
                    std::to_string(t));
  }
  std::vector<WindowRecord> out;
  for (std::size_t off = 0; off + t <= n; off += stride) {
    const double life = n == t ? 0.0 : std::min(1.0, static_cast<double>(off) / static_cast<double>(n - t));
    out.push_back({run.series.middleRows(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(t)),
                   {{run_onehot.begin(), run_onehot.end()}, life},
                   {run.run_id, off, false}});
  }
  return out;
}

const char* subset_name(Subset s) {
  switch (s) {
    case Subset::test: return "test";
    case Subset::train: return "train";
    case Subset::validate: return "validate";
  }
  return "?";
}

const std::vector<std::size_t>& Split::operator[](Subset s) const {
  return s == Subset::test ? test : s == Subset::train ? train : validate;
}

std::vector<Subset> Split::assignment(std::size_t n) const {
  std::vector<Subset> out(n, Subset::train);
  for (Subset s : {Subset::test, Subset::train, Subset::validate}) {
    for (std::size_t i : (*this)[s]) {
      if (i >= n) throw DataError("split index " + std::to_string(i) + " out of range");
      out[i] = s;
    }
  }
  return out;
}

Split split_dataset(std::size_t n, const SplitFractions& f, std::uint64_t seed) {
  if (n < 3) throw DataError("split_dataset: need at least 3 records, got " + std::to_string(n));
  if (!(f.test >= 0 && f.train >= 0 && f.validate >= 0) || std::abs(f.test + f.train + f.validate - 1.0) > 1e-9) {
    throw DataError("split_dataset: fractions must be >= 0 and sum to 1");
  }
  // Nearest (ties down) for test and validate keeps every subset within one
  // record of its exact share; train takes the rest.
  auto share = [n](double frac) {
    const double exact = frac * static_cast<double>(n);
    return static_cast<std::size_t>(std::ceil(exact - 0.5 - 1e-9));
  };
  const std::size_t n_test = share(f.test), n_val = share(f.validate);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  Split s;
  s.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test),
                 perm.end() - static_cast<std::ptrdiff_t>(n_val));
  s.validate.assign(perm.end() - static_cast<std::ptrdiff_t>(n_val), perm.end());
  return s;
}

NormParams fit_norm(std::span<const WindowRecord> records, std::span<const std::size_t> indices) {
  if (indices.empty()) throw DataError("fit_norm: empty subset");
  const auto d = records[indices.front()].window.cols();
  Eigen::Matrix<long double, 1, Eigen::Dynamic> sum = Eigen::Matrix<long double, 1, Eigen::Dynamic>::Zero(d);
  std::size_t rows = 0;
  for (std::size_t i : indices) {
    const auto& w = records[i].window;
    if (w.cols() != d) throw DataError("fit_norm: channel counts differ");
    sum += w.cast<long double>().colwise().sum();
    rows += static_cast<std::size_t>(w.rows());
  }
  const auto mean = sum / static_cast<long double>(rows);
  Eigen::Matrix<long double, 1, Eigen::Dynamic> sq = Eigen::Matrix<long double, 1, Eigen::Dynamic>::Zero(d);
  for (std::size_t i : indices) {
    sq += (records[i].window.cast<long double>().rowwise() - mean).array().square().matrix().colwise().sum();
  }
  NormParams p{mean.cast<double>(), (sq / static_cast<long double>(rows)).cwiseSqrt().cast<double>()};
  for (Eigen::Index c = 0; c < d; ++c) {
    if (!(p.std[c] > 0.0)) throw DataError("fit_norm: channel " + std::to_string(c) + " has zero variance");
  }
  return p;
}

NormParams fit_norm(std::span<const WindowRecord> records) {
  std::vector<std::size_t> all(records.size());
  std::iota(all.begin(), all.end(), 0);
  return fit_norm(records, all);
}

}  // namespace tsgan::data
