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
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <toml.hpp>

#include "cli.hpp"

namespace tsgan::cli {

namespace {

// One TOML key bound to a RunConfig member.
struct Field {
  std::string section, key;
  std::function<void(RunConfig&, const toml::node&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos && s.find("inf") == std::string::npos &&
      s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::uint64_t as_unsigned(const toml::node& n, const std::string& where) {
  const auto v = n.value<std::int64_t>();
  if (!n.is_integer() || !v || *v < 0) throw UsageError(where + ": expected a non-negative integer");
  return static_cast<std::uint64_t>(*v);
}

double as_double(const toml::node& n, const std::string& where) {
  if (!n.is_number()) throw UsageError(where + ": expected a number");
  return *n.value<double>();
}

// Members of the GanConfig parts, reached through RunConfig::gan.
#define TSGAN_GEN(type, key) \
  Field { "generator", #key, \
    [](RunConfig& c, const toml::node& n, const std::string& w) { c.gan.generator.key = type##_from(n, w); }, \
    [](const RunConfig& c) { return type##_to(c.gan.generator.key); } }
#define TSGAN_CRITIC(type, key) \
  Field { "critic", #key, \
    [](RunConfig& c, const toml::node& n, const std::string& w) { c.gan.critic.key = type##_from(n, w); }, \
    [](const RunConfig& c) { return type##_to(c.gan.critic.key); } }
#define TSGAN_LOSS(type, key) \
  Field { "loss", #key, \
    [](RunConfig& c, const toml::node& n, const std::string& w) { c.gan.loss.key = type##_from(n, w); }, \
    [](const RunConfig& c) { return type##_to(c.gan.loss.key); } }

std::size_t size_from(const toml::node& n, const std::string& w) { return static_cast<std::size_t>(as_unsigned(n, w)); }
std::string size_to(std::size_t v) { return std::to_string(v); }
double real_from(const toml::node& n, const std::string& w) { return as_double(n, w); }
std::string real_to(double v) { return format_double(v); }
std::uint64_t u64_from(const toml::node& n, const std::string& w) { return as_unsigned(n, w); }
std::string u64_to(std::uint64_t v) { return std::to_string(v); }

const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      TSGAN_GEN(size, noise_dim),
      TSGAN_GEN(size, label_proj_dim),
      TSGAN_GEN(size, label_dim),
      TSGAN_GEN(size, t_seed),
      TSGAN_GEN(size, d_seed),
      TSGAN_GEN(size, t_target),
      TSGAN_GEN(size, d_out),
      TSGAN_GEN(size, shuffle_threshold),
      TSGAN_GEN(size, ga_threshold),
      TSGAN_GEN(size, n_heads),
      TSGAN_GEN(size, ffn_mult),
      TSGAN_GEN(real, norm_eps),
      TSGAN_CRITIC(size, t),
      TSGAN_CRITIC(size, d_in),
      TSGAN_CRITIC(size, d_model),
      TSGAN_CRITIC(size, patch_len0),
      TSGAN_CRITIC(size, d_inject),
      TSGAN_CRITIC(size, head_hidden),
      TSGAN_CRITIC(size, label_dim),
      TSGAN_CRITIC(size, n_heads),
      TSGAN_CRITIC(size, ffn_mult),
      TSGAN_CRITIC(real, psa_factor),
      TSGAN_CRITIC(real, norm_eps),
      TSGAN_LOSS(real, lambda_gp),
      TSGAN_LOSS(real, lambda_label),
      {"loss", "label_weights",
       [](RunConfig& c, const toml::node& n, const std::string& w) {
         const auto* arr = n.as_array();
         if (!arr) throw UsageError(w + ": expected an array of numbers");
         c.gan.loss.label_weights.clear();
         for (const auto& e : *arr) c.gan.loss.label_weights.push_back(as_double(e, w));
       },
       [](const RunConfig& c) {
         std::string s = "[";
         for (std::size_t i = 0; i < c.gan.loss.label_weights.size(); ++i) {
           s += (i ? ", " : "") + format_double(c.gan.loss.label_weights[i]);
         }
         return s + "]";
       }},
      TSGAN_LOSS(size, n_critic),
      TSGAN_LOSS(real, smoothing_eps),
      TSGAN_LOSS(real, lr),
      TSGAN_LOSS(real, beta1),
      TSGAN_LOSS(real, beta2),
      TSGAN_LOSS(real, adam_eps),
      {"data", "path",
       [](RunConfig& c, const toml::node& n, const std::string& w) {
         if (!n.is_string()) throw UsageError(w + ": expected a string");
         c.data_path = *n.value<std::string>();
       },
       [](const RunConfig& c) { return quote(c.data_path); }},
      {"data", "batch_size",
       [](RunConfig& c, const toml::node& n, const std::string& w) { c.gan.batch_size = size_from(n, w); },
       [](const RunConfig& c) { return size_to(c.gan.batch_size); }},
      {"data", "onehot_dim",
       [](RunConfig& c, const toml::node& n, const std::string& w) { c.gan.onehot_dim = size_from(n, w); },
       [](const RunConfig& c) { return size_to(c.gan.onehot_dim); }},
      {"run", "seed", [](RunConfig& c, const toml::node& n, const std::string& w) { c.seed = u64_from(n, w); },
       [](const RunConfig& c) { return u64_to(c.seed); }},
      {"run", "max_steps",
       [](RunConfig& c, const toml::node& n, const std::string& w) { c.max_steps = u64_from(n, w); },
       [](const RunConfig& c) { return u64_to(c.max_steps); }},
      {"run", "checkpoint_every",
       [](RunConfig& c, const toml::node& n, const std::string& w) { c.checkpoint_every = u64_from(n, w); },
       [](const RunConfig& c) { return u64_to(c.checkpoint_every); }},
      {"run", "eval_every",
       [](RunConfig& c, const toml::node& n, const std::string& w) { c.eval_every = u64_from(n, w); },
       [](const RunConfig& c) { return u64_to(c.eval_every); }},
      {"run", "eval_windows",
       [](RunConfig& c, const toml::node& n, const std::string& w) { c.eval_windows = size_from(n, w); },
       [](const RunConfig& c) { return size_to(c.eval_windows); }},
  };
  return all;
}

#undef TSGAN_GEN
#undef TSGAN_CRITIC
#undef TSGAN_LOSS

}  // namespace

void RunConfig::validate() const {
  try {
    gan.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (max_steps == 0) throw UsageError("config: run.max_steps must be >= 1");
  if (eval_every > 0 && eval_windows == 0) throw UsageError("config: run.eval_windows must be >= 1");
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << origin << ":" << e.source().begin.line << ": " << e.description();
    throw UsageError(msg.str());
  }
  RunConfig c;
  for (const auto& [section, node] : root) {
    const auto* table = node.as_table();
    const std::string name(section.str());
    if (!table) throw UsageError(origin + ": top-level key '" + name + "' must be a section");
    for (const auto& [key, value] : *table) {
      const std::string k(key.str());
      const auto it = std::find_if(fields().begin(), fields().end(),
                                   [&](const Field& f) { return f.section == name && f.key == k; });
      if (it == fields().end()) throw UsageError(origin + ": unknown key " + name + "." + k);
      it->set(c, value, origin + ": " + name + "." + k);
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(path.string() + ": cannot open config");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string to_toml(const RunConfig& c) {
  std::string out, section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      out += (section.empty() ? "[" : "\n[") + f.section + "]\n";
      section = f.section;
    }
    out += f.key + " = " + f.get(c) + "\n";
  }
  return out;
}

}  // namespace tsgan::cli
