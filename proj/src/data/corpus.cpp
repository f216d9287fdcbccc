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

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "tsgan/datasets.hpp"

namespace tsgan::data {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'T', 'S', 'W', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 * 4;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

double get_f32(const unsigned char* p) { return std::bit_cast<float>(get_u32(p)); }

std::uint32_t narrow(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) throw DataError(std::string("corpus: ") + what + " exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

json norm_json(const NormParams& p) {
  return {{"mean", std::vector<double>(p.mean.data(), p.mean.data() + p.mean.size())},
          {"std", std::vector<double>(p.std.data(), p.std.data() + p.std.size())}};
}

NormParams norm_from(const json& j) {
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto std = j.at("std").get<std::vector<double>>();
  if (mean.size() != std.size()) throw DataError("sidecar: norm mean/std lengths differ");
  NormParams p{Eigen::Map<const Eigen::RowVectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size())),
               Eigen::Map<const Eigen::RowVectorXd>(std.data(), static_cast<Eigen::Index>(std.size()))};
  for (double s : std) {
    if (!(s > 0.0)) throw DataError("sidecar: norm std must be > 0");
  }
  return p;
}

// Write to a sibling temporary, then rename, so a failure leaves no partial file.
void write_atomically(const std::filesystem::path& path, const std::string& bytes) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      std::filesystem::remove(tmp);
      throw DataError(path.string() + ": write failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CorpusHeader parse_header(const std::string& bytes, const std::filesystem::path& path) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw DataError(path.string() + ": not a TSW1 corpus");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + 4;
  return {get_u32(p), get_u32(p + 4), get_u32(p + 8), get_u32(p + 12)};
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& corpus) {
  auto p = corpus;
  p += ".json";
  return p;
}

void write_corpus(const std::filesystem::path& path, std::span<const WindowRecord> records,
                  CorpusMeta meta) {
  if (records.empty()) throw DataError("write_corpus: no records");
  const auto t = records.front().window.rows(), d = records.front().window.cols();
  const auto label_dim = records.front().label.dim();
  if (meta.onehot_dim == 0) meta.onehot_dim = records.front().label.onehot.size();
  for (const auto& r : records) {
    if (r.window.rows() != t || r.window.cols() != d) throw DataError("write_corpus: window shapes differ");
    if (r.label.dim() != label_dim || r.label.onehot.size() != meta.onehot_dim) {
      throw DataError("write_corpus: label layouts differ");
    }
  }
  if (meta.split) meta.split->assignment(records.size());

  std::string bytes(kMagic, 4);
  bytes.reserve(kHeaderBytes + records.size() * (label_dim + static_cast<std::size_t>(t * d)) * 4);
  put_u32(bytes, narrow(records.size(), "record count"));
  put_u32(bytes, narrow(static_cast<std::size_t>(t), "t"));
  put_u32(bytes, narrow(static_cast<std::size_t>(d), "d"));
  put_u32(bytes, narrow(label_dim, "label_dim"));
  for (const auto& r : records) {
    for (double v : r.label.flat()) put_f32(bytes, v);
    for (Eigen::Index i = 0; i < r.window.size(); ++i) put_f32(bytes, r.window.data()[i]);
  }

  json side = {{"format", "TSW1"},
               {"records", records.size()},
               {"t", t},
               {"d", d},
               {"label_dim", label_dim},
               {"onehot_dim", meta.onehot_dim}};
  json norms = json::object();
  for (const auto& [name, p] : meta.norms) norms[name] = norm_json(p);
  side["norm"] = norms;
  if (meta.split) {
    json split = {{"test", meta.split->test}, {"train", meta.split->train}, {"validate", meta.split->validate}};
    if (meta.split_seed) split["seed"] = *meta.split_seed;
    side["split"] = split;
  }
  json prov = json::array();
  for (const auto& r : records) {
    prov.push_back({{"source", r.source.source}, {"start", r.source.start}, {"synthetic", r.source.synthetic}});
  }
  side["provenance"] = prov;

  write_atomically(path, bytes);
  write_atomically(sidecar_path(path), side.dump(1) + "\n");
}

CorpusHeader read_corpus_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open");
  std::string bytes(kHeaderBytes, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(kHeaderBytes));
  bytes.resize(static_cast<std::size_t>(in.gcount()));
  return parse_header(bytes, path);
}

Corpus read_corpus(const std::filesystem::path& path) {
  const std::string bytes = read_all(path);
  Corpus c;
  c.header = parse_header(bytes, path);
  const auto& h = c.header;
  const std::size_t per = static_cast<std::size_t>(h.label_dim) + static_cast<std::size_t>(h.t) * h.d;
  if (bytes.size() != kHeaderBytes + static_cast<std::size_t>(h.count) * per * 4) {
    throw DataError(path.string() + ": size does not match header (" + std::to_string(h.count) +
                    " records of t=" + std::to_string(h.t) + ", d=" + std::to_string(h.d) + ")");
  }

  c.meta.onehot_dim = h.label_dim;
  const auto side_path = sidecar_path(path);
  if (std::filesystem::exists(side_path)) {
    json side;
    try {
      side = json::parse(read_all(side_path));
      c.meta.onehot_dim = side.value("onehot_dim", static_cast<std::size_t>(h.label_dim));
      const json norms = side.value("norm", json::object());
      for (const auto& [name, p] : norms.items()) c.meta.norms[name] = norm_from(p);
      if (side.contains("split")) {
        const auto& s = side["split"];
        c.meta.split = Split{s.at("test").get<std::vector<std::size_t>>(), s.at("train").get<std::vector<std::size_t>>(),
                             s.at("validate").get<std::vector<std::size_t>>()};
        if (s.contains("seed")) c.meta.split_seed = s["seed"].get<std::uint64_t>();
      }
      const json provenance = side.value("provenance", json::array());
      for (const auto& p : provenance) {
        c.meta.provenance.push_back({p.at("source").get<std::string>(), p.at("start").get<std::uint64_t>(),
                                     p.at("synthetic").get<bool>()});
      }
    } catch (const json::exception& e) {
      throw DataError(side_path.string() + ": " + e.what());
    }
    if (!c.meta.provenance.empty() && c.meta.provenance.size() != h.count) {
      throw DataError(side_path.string() + ": provenance has " + std::to_string(c.meta.provenance.size()) +
                      " entries for " + std::to_string(h.count) + " records");
    }
    if (c.meta.split) c.meta.split->assignment(h.count);
  }
  if (c.meta.onehot_dim > h.label_dim || h.label_dim - c.meta.onehot_dim > 1) {
    throw DataError(path.string() + ": label layout must be one-hot plus at most one lifetime entry");
  }

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + kHeaderBytes;
  c.records.reserve(h.count);
  for (std::size_t r = 0; r < h.count; ++r) {
    WindowRecord rec;
    for (std::size_t k = 0; k < c.meta.onehot_dim; ++k, p += 4) rec.label.onehot.push_back(get_f32(p));
    if (h.label_dim > c.meta.onehot_dim) {
      rec.label.lifetime = get_f32(p);
      p += 4;
    }
    rec.window.resize(h.t, h.d);
    for (Eigen::Index i = 0; i < rec.window.size(); ++i, p += 4) rec.window.data()[i] = get_f32(p);
    if (!c.meta.provenance.empty()) rec.source = c.meta.provenance[r];
    c.records.push_back(std::move(rec));
  }
  return c;
}

}  // namespace tsgan::data
