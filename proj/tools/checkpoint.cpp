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

// Layout, all integers little-endian:
//   "TSCK" u32 version
//   str config_toml, u64 step, str rng_state
//   u32 d, f64 mean[d], f64 std[d]
//   tensors(generator), tensors(critic), moments(generator), moments(critic)
// str = u32 length + bytes; tensors = u32 count, then per tensor str name,
// u32 rank, u32 dims[rank], f32 values; moments = u64 steps, u32 count, then
// per tensor u32 n, f32 m[n], f32 v[n].

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "tsgan/datasets.hpp"

namespace tsgan::cli {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'C', 'K'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_ += s;
  }
  void raw(const char* p, std::size_t n) { bytes_.append(p, n); }
  const std::string& bytes() const { return bytes_; }

 private:
  std::string bytes_;
};

class Reader {
 public:
  Reader(std::string bytes, std::string origin) : bytes_(std::move(bytes)), origin_(std::move(origin)) {}

  const unsigned char* take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw data::DataError(origin_ + ": truncated checkpoint");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes_.data()) + pos_;
    pos_ += n;
    return p;
  }
  std::uint32_t u32() {
    const auto* p = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto* p = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    const auto* p = take(n);
    return {reinterpret_cast<const char*>(p), n};
  }
  bool done() const { return pos_ == bytes_.size(); }
  const std::string& origin() const { return origin_; }

 private:
  std::string bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

std::vector<NamedTensor> snapshot(const nn::ParameterSet& params) {
  std::vector<NamedTensor> out;
  for (const auto& [name, t] : params.entries()) {
    NamedTensor n{name, t.shape(), {}};
    n.values.reserve(t.numel());
    for (double v : t.values()) n.values.push_back(static_cast<float>(v));
    out.push_back(std::move(n));
  }
  return out;
}

Moments moments(const gan::Adam& opt) {
  Moments m{opt.steps(), {}, {}};
  for (const auto& src : opt.first_moments()) m.m.emplace_back(src.begin(), src.end());
  for (const auto& src : opt.second_moments()) m.v.emplace_back(src.begin(), src.end());
  return m;
}

void write_tensors(Writer& w, const std::vector<NamedTensor>& ts) {
  w.u32(static_cast<std::uint32_t>(ts.size()));
  for (const auto& t : ts) {
    w.str(t.name);
    w.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) w.u32(static_cast<std::uint32_t>(d));
    for (float v : t.values) w.f32(v);
  }
}

std::vector<NamedTensor> read_tensors(Reader& r) {
  std::vector<NamedTensor> out(r.u32());
  for (auto& t : out) {
    t.name = r.str();
    t.shape.resize(r.u32());
    std::size_t n = 1;
    for (auto& d : t.shape) n *= d = r.u32();
    t.values.resize(n);
    for (auto& v : t.values) v = r.f32();
  }
  return out;
}

void write_moments(Writer& w, const Moments& m) {
  w.u64(m.steps);
  w.u32(static_cast<std::uint32_t>(m.m.size()));
  for (std::size_t i = 0; i < m.m.size(); ++i) {
    w.u32(static_cast<std::uint32_t>(m.m[i].size()));
    for (float v : m.m[i]) w.f32(v);
    for (float v : m.v[i]) w.f32(v);
  }
}

Moments read_moments(Reader& r) {
  Moments m;
  m.steps = r.u64();
  const auto count = r.u32();
  m.m.resize(count);
  m.v.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto n = r.u32();
    m.m[i].resize(n);
    m.v[i].resize(n);
    for (auto& v : m.m[i]) v = r.f32();
    for (auto& v : m.v[i]) v = r.f32();
  }
  return m;
}

void load_params(const std::vector<NamedTensor>& saved, const nn::ParameterSet& params, const std::string& who) {
  if (saved.size() != params.size()) {
    throw data::DataError("checkpoint: " + who + " has " + std::to_string(saved.size()) +
                          " tensors, model expects " + std::to_string(params.size()));
  }
  std::size_t i = 0;
  for (const auto& [name, t] : params.entries()) {
    const auto& s = saved[i++];
    if (s.name != name || s.shape != t.shape()) {
      throw data::DataError("checkpoint: tensor '" + s.name + "' does not match model tensor '" + name + "'");
    }
    Tensor leaf = t;
    leaf.assign(std::vector<double>(s.values.begin(), s.values.end()));
  }
}

void load_moments(const Moments& saved, gan::Adam& opt, const nn::ParameterSet& params) {
  if (saved.steps == 0) return;
  if (saved.m.size() != params.size()) throw data::DataError("checkpoint: optimizer moments do not match the model");
  std::vector<std::vector<double>> m, v;
  std::size_t i = 0;
  for (const auto& [name, t] : params.entries()) {
    if (saved.m[i].size() != t.numel()) throw data::DataError("checkpoint: moment size mismatch for '" + name + "'");
    m.emplace_back(saved.m[i].begin(), saved.m[i].end());
    v.emplace_back(saved.v[i].begin(), saved.v[i].end());
    ++i;
  }
  opt.restore(saved.steps, std::move(m), std::move(v));
}

}  // namespace

Checkpoint capture(const gan::TrainState& state, const RunConfig& config, const NormParams& norm) {
  Checkpoint c;
  c.config_toml = to_toml(config);
  c.step = state.step;
  std::ostringstream rng;
  rng << state.rng;
  c.rng_state = rng.str();
  c.norm = norm;
  c.generator = snapshot(state.generator.params);
  c.critic = snapshot(state.critic.params);
  c.generator_opt = moments(state.gen_opt);
  c.critic_opt = moments(state.critic_opt);
  return c;
}

void restore(const Checkpoint& ckpt, gan::TrainState& state) {
  load_params(ckpt.generator, state.generator.params, "generator");
  load_params(ckpt.critic, state.critic.params, "critic");
  load_moments(ckpt.generator_opt, state.gen_opt, state.generator.params);
  load_moments(ckpt.critic_opt, state.critic_opt, state.critic.params);
  std::istringstream rng(ckpt.rng_state);
  rng >> state.rng;
  if (!rng) throw data::DataError("checkpoint: unreadable rng state");
  state.step = ckpt.step;
}

std::unique_ptr<gan::TrainState> load_state(const Checkpoint& ckpt) {
  const auto config = parse_config(ckpt.config_toml, "checkpoint config");
  config.validate();
  auto state = std::make_unique<gan::TrainState>(config.gan, config.seed);
  restore(ckpt, *state);
  return state;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  Writer w;
  w.raw(kMagic, 4);
  w.u32(c.version);
  w.str(c.config_toml);
  w.u64(c.step);
  w.str(c.rng_state);
  w.u32(static_cast<std::uint32_t>(c.norm.mean.size()));
  for (Eigen::Index i = 0; i < c.norm.mean.size(); ++i) w.f64(c.norm.mean[i]);
  for (Eigen::Index i = 0; i < c.norm.std.size(); ++i) w.f64(c.norm.std[i]);
  write_tensors(w, c.generator);
  write_tensors(w, c.critic);
  write_moments(w, c.generator_opt);
  write_moments(w, c.critic_opt);

  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw data::DataError(path.string() + ": cannot open for writing");
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw data::DataError(path.string() + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data::DataError(path.string() + ": cannot open checkpoint");
  Reader r({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}, path.string());
  if (std::memcmp(r.take(4), kMagic, 4) != 0) throw data::DataError(path.string() + ": not a checkpoint");
  Checkpoint c;
  c.version = r.u32();
  if (c.version != Checkpoint::kVersion) {
    throw data::DataError(path.string() + ": unsupported checkpoint version " + std::to_string(c.version));
  }
  c.config_toml = r.str();
  c.step = r.u64();
  c.rng_state = r.str();
  const auto d = static_cast<Eigen::Index>(r.u32());
  c.norm.mean.resize(d);
  c.norm.std.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) c.norm.mean[i] = r.f64();
  for (Eigen::Index i = 0; i < d; ++i) c.norm.std[i] = r.f64();
  c.generator = read_tensors(r);
  c.critic = read_tensors(r);
  c.generator_opt = read_moments(r);
  c.critic_opt = read_moments(r);
  if (!r.done()) throw data::DataError(path.string() + ": trailing bytes after checkpoint");
  return c;
}

}  // namespace tsgan::cli
