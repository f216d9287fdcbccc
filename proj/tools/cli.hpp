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
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsgan/gan.hpp"
#include "tsgan/window.hpp"

namespace tsgan::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericAbort = 3 };

/// Bad flags or configuration; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  gan::GanConfig gan;
  std::string data_path;
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 1000;
  /// 0: only the final checkpoint.
  std::uint64_t checkpoint_every = 0;
  /// 0: no evaluation records.
  std::uint64_t eval_every = 0;
  std::size_t eval_windows = 64;

  /// Throws UsageError naming the offending field.
  void validate() const;
};

/// TOML with sections generator, critic, loss, data, run. Missing keys keep
/// their defaults; unknown keys are errors.
RunConfig parse_config(const std::string& toml_text, const std::string& origin = "config");
RunConfig load_config(const std::filesystem::path& path);
/// Canonical TOML; parse_config(to_toml(c)) == c.
std::string to_toml(const RunConfig& c);

struct NamedTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float> values;
};

struct Moments {
  std::uint64_t steps = 0;
  std::vector<std::vector<float>> m, v;
};

struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;
  std::uint32_t version = kVersion;
  std::string config_toml;
  std::uint64_t step = 0;
  std::string rng_state;
  /// Denormalization applied by synth.
  NormParams norm;
  std::vector<NamedTensor> generator, critic;
  Moments generator_opt, critic_opt;
};

Checkpoint capture(const gan::TrainState& state, const RunConfig& config, const NormParams& norm);
/// Overwrites parameters, optimizer moments, rng and step counter.
void restore(const Checkpoint& ckpt, gan::TrainState& state);
/// Rebuilds the training state described by a checkpoint.
std::unique_ptr<gan::TrainState> load_state(const Checkpoint& ckpt);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Full command line, argv[0] included. Diagnostics go to `err`, command
/// summaries to `out`. Returns an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Indices 0, s, 2s, ... with s = (n - 1) / (count - 1), count of them.
std::vector<std::size_t> evenly_spaced(std::size_t n, std::size_t count);

}  // namespace tsgan::cli
