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

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <ostream>

#include "cli.hpp"
#include "tsgan/datasets.hpp"
#include "tsgan/spectral.hpp"

namespace tsgan::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::string shortest(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, end};
}

std::string zero_pad(std::uint64_t v, int width) {
  std::string s = std::to_string(v);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

void require_parent(const fs::path& out) {
  const auto parent = out.parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw UsageError(out.string() + ": directory " + parent.string() + " does not exist");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw data::DataError(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw data::DataError(path.string() + ": write failed");
  }
  fs::rename(tmp, path);
}

constexpr data::Subset kSubsets[] = {data::Subset::test, data::Subset::train, data::Subset::validate};

std::map<std::string, NormParams> subset_norms(std::span<const data::WindowRecord> records,
                                               const data::Split& split) {
  std::map<std::string, NormParams> norms;
  for (auto s : kSubsets) {
    if (!split[s].empty()) norms[data::subset_name(s)] = data::fit_norm(records, split[s]);
  }
  return norms;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

const std::vector<std::size_t>& subset_indices(const data::Corpus& c, const std::string& subset,
                                               const std::vector<std::size_t>& everything) {
  if (subset.empty()) return everything;
  if (!c.meta.split) throw data::DataError("corpus has no split; cannot select subset '" + subset + "'");
  for (auto s : kSubsets) {
    if (subset == data::subset_name(s)) return (*c.meta.split)[s];
  }
  throw UsageError("unknown subset '" + subset + "'");
}

std::vector<Window> windows_at(const data::Corpus& c, std::span<const std::size_t> indices) {
  std::vector<Window> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(c.records[i].window);
  return out;
}

// --- gen-data ----------------------------------------------------------------

struct GenDataArgs {
  fs::path out;
  std::size_t n = 0, t = 0, d = 2;
  std::uint64_t seed = 0;
  bool strict = false;
};

int gen_data(const GenDataArgs& a, std::ostream& out) {
  if (!power_of_two(a.t)) throw UsageError("--t must be a power of two, got " + std::to_string(a.t));
  require_parent(a.out);
  const auto specs = data::default_artificial_specs();
  const auto counts = data::class_counts(a.n, specs.size());
  if (a.strict && a.n % specs.size() != 0) {
    throw UsageError("--n " + std::to_string(a.n) + " does not divide evenly over " +
                     std::to_string(specs.size()) + " classes");
  }

  const auto records = data::gen_artificial_dataset(a.n, a.t, a.d, specs, a.seed, {a.strict});
  data::CorpusMeta meta;
  meta.onehot_dim = specs.size();
  meta.split = data::split_dataset(records.size(), {}, a.seed);
  meta.split_seed = a.seed;
  meta.norms = subset_norms(records, *meta.split);
  data::write_corpus(a.out, records, meta);

  out << "wrote " << records.size() << " records (t=" << a.t << ", d=" << a.d << ") to " << a.out.string()
      << "\n";
  for (std::size_t c = 0; c < specs.size(); ++c) out << "  " << specs[c].name << ": " << counts[c] << "\n";
  return kOk;
}

// --- ingest ------------------------------------------------------------------

struct IngestArgs {
  fs::path dir, out;
  std::size_t window = 0, stride = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> columns{4, 5};
  bool header = false;
  std::string delimiter;
};

struct RunFiles {
  std::string id;
  std::vector<fs::path> files;
};

bool is_csv(const fs::directory_entry& e) { return e.is_regular_file() && e.path().extension() == ".csv"; }

// Subdirectories are runs made of their CSV files; without subdirectories
// every CSV file is a run of its own.
std::vector<RunFiles> discover_runs(const fs::path& dir) {
  std::vector<fs::directory_entry> entries(fs::directory_iterator(dir), fs::directory_iterator{});
  std::sort(entries.begin(), entries.end());
  std::vector<RunFiles> runs;
  const bool nested = std::any_of(entries.begin(), entries.end(), [](const auto& e) { return e.is_directory(); });
  for (const auto& e : entries) {
    if (nested && e.is_directory()) {
      RunFiles r{e.path().filename().string(), {}};
      for (const auto& f : fs::directory_iterator(e.path())) {
        if (is_csv(f)) r.files.push_back(f.path());
      }
      std::sort(r.files.begin(), r.files.end());
      if (!r.files.empty()) runs.push_back(std::move(r));
    } else if (!nested && is_csv(e)) {
      runs.push_back({e.path().stem().string(), {e.path()}});
    }
  }
  return runs;
}

int ingest(const IngestArgs& a, std::ostream& out) {
  if (!power_of_two(a.window)) {
    throw UsageError("--window must be a power of two, got " + std::to_string(a.window));
  }
  if (a.delimiter.size() > 1 || (a.delimiter.size() == 1 && a.delimiter != "," && a.delimiter != ";")) {
    throw UsageError("--delimiter must be ',' or ';'");
  }
  if (a.columns.empty()) throw UsageError("--columns needs at least one index");
  require_parent(a.out);
  if (!fs::is_directory(a.dir)) throw data::DataError(a.dir.string() + ": not a directory");
  const auto runs = discover_runs(a.dir);
  if (runs.empty()) throw data::DataError(a.dir.string() + ": no CSV runs found");

  data::CsvOptions csv;
  csv.columns = a.columns;
  csv.header = a.header;
  csv.delimiter = a.delimiter.empty() ? '\0' : a.delimiter[0];
  const std::size_t stride = a.stride == 0 ? a.window : a.stride;

  std::vector<data::WindowRecord> records;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto series = data::ingest_accel_csv(runs[r].files, runs[r].id, csv);
    std::vector<double> onehot(runs.size(), 0.0);
    onehot[r] = 1.0;
    auto windows = data::window_series(series, a.window, onehot, stride);
    out << "  " << runs[r].id << ": " << series.series.rows() << " samples, " << windows.size() << " windows\n";
    std::move(windows.begin(), windows.end(), std::back_inserter(records));
  }
  if (records.empty()) throw data::DataError("no run is long enough for --window " + std::to_string(a.window));

  data::CorpusMeta meta;
  meta.onehot_dim = runs.size();
  meta.split = data::split_dataset(records.size(), {}, a.seed);
  meta.split_seed = a.seed;
  meta.norms = subset_norms(records, *meta.split);
  data::write_corpus(a.out, records, meta);
  out << "wrote " << records.size() << " windows from " << runs.size() << " runs to " << a.out.string() << "\n";
  return kOk;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
  fs::path config, data, out, resume;
  std::uint64_t max_steps = 0;
};

void check_corpus_fits(const data::Corpus& c, const gan::GanConfig& g) {
  const auto& h = c.header;
  if (h.t != g.critic.t || h.d != g.critic.d_in) {
    throw data::DataError("corpus windows are " + std::to_string(h.t) + "x" + std::to_string(h.d) +
                          ", config expects " + std::to_string(g.critic.t) + "x" + std::to_string(g.critic.d_in));
  }
  if (h.label_dim != g.generator.label_dim || c.meta.onehot_dim != g.onehot_dim) {
    throw data::DataError("corpus labels have " + std::to_string(h.label_dim) + " entries (" +
                          std::to_string(c.meta.onehot_dim) + " one-hot), config expects " +
                          std::to_string(g.generator.label_dim) + " (" + std::to_string(g.onehot_dim) + ")");
  }
}

json step_record(const gan::StepStats& s) {
  return {{"step", s.step},
          {"critic_loss", s.critic_loss},
          {"generator_loss", s.generator_loss},
          {"gradient_penalty", s.gradient_penalty},
          {"critic_label_mse", s.critic_label_mse},
          {"generator_label_mse", s.generator_label_mse}};
}

fs::path checkpoint_name(const fs::path& dir, std::uint64_t step) {
  return dir / ("step-" + zero_pad(step, 6) + ".ckpt");
}

int train(const TrainArgs& a, std::ostream& out) {
  RunConfig config;
  std::optional<Checkpoint> resumed;
  if (!a.resume.empty()) {
    if (!a.config.empty()) throw UsageError("--config and --resume are exclusive; the checkpoint carries its config");
    resumed = load_checkpoint(a.resume);
    config = parse_config(resumed->config_toml, a.resume.string());
  } else if (!a.config.empty()) {
    config = load_config(a.config);
  } else {
    throw UsageError("train needs --config or --resume");
  }
  if (!a.data.empty()) config.data_path = a.data.string();
  if (a.max_steps != 0) config.max_steps = a.max_steps;
  config.validate();
  if (config.data_path.empty()) throw UsageError("no corpus: pass --data or set data.path");
  if (resumed && resumed->step >= config.max_steps) {
    throw UsageError("checkpoint is at step " + std::to_string(resumed->step) + ", max_steps is " +
                     std::to_string(config.max_steps));
  }
  if (fs::exists(a.out) && !fs::is_directory(a.out)) throw UsageError(a.out.string() + ": not a directory");

  const auto corpus = data::read_corpus(config.data_path);
  check_corpus_fits(corpus, config.gan);
  const auto everything = all_indices(corpus.records.size());
  const auto& train_idx = corpus.meta.split ? corpus.meta.split->train : everything;
  if (train_idx.empty()) throw data::DataError(config.data_path + ": empty training subset");
  const NormParams norm = resumed                                ? resumed->norm
                          : corpus.meta.norms.contains("train") ? corpus.meta.norms.at("train")
                                                                 : data::fit_norm(corpus.records, train_idx);
  if (norm.mean.size() != static_cast<Eigen::Index>(corpus.header.d)) {
    throw data::DataError("normalization has " + std::to_string(norm.mean.size()) + " channels, corpus has " +
                          std::to_string(corpus.header.d));
  }

  const std::size_t t = corpus.header.t, d = corpus.header.d, ld = corpus.header.label_dim;
  std::vector<std::vector<double>> windows, labels;
  for (auto i : train_idx) {
    const Window w = norm.apply(corpus.records[i].window);
    windows.emplace_back(w.data(), w.data() + w.size());
    labels.push_back(corpus.records[i].label.flat());
  }

  // Evaluation compares synthetics for the labels of evenly spaced training
  // windows against the per-channel mean NPSD of those windows.
  std::vector<data::WindowRecord> eval_real;
  std::vector<spectral::Npsd<double>> eval_centers;
  std::vector<ConditionLabel> eval_labels;
  if (config.eval_every > 0) {
    const auto picks = evenly_spaced(train_idx.size(), std::min(config.eval_windows, train_idx.size()));
    std::vector<Window> real;
    for (auto p : picks) {
      real.push_back(corpus.records[train_idx[p]].window);
      eval_labels.push_back(corpus.records[train_idx[p]].label);
    }
    eval_centers = spectral::channel_means<double>(real);
  }

  auto state = resumed ? load_state(*resumed) : std::make_unique<gan::TrainState>(config.gan, config.seed);
  fs::create_directories(a.out);
  std::ofstream metrics(a.out / "metrics.jsonl", resumed ? std::ios::app : std::ios::trunc);
  if (!metrics) throw data::DataError((a.out / "metrics.jsonl").string() + ": cannot open for writing");

  const std::size_t k = config.gan.loss.n_critic * config.gan.batch_size;
  std::uniform_int_distribution<std::size_t> pick(0, windows.size() - 1);
  std::vector<double> batch(k * t * d), batch_labels(k * ld);
  std::uint64_t saved_at = resumed ? resumed->step : 0;
  while (state->step < config.max_steps) {
    for (std::size_t r = 0; r < k; ++r) {
      const auto i = pick(state->rng);
      std::copy(windows[i].begin(), windows[i].end(), batch.begin() + static_cast<std::ptrdiff_t>(r * t * d));
      std::copy(labels[i].begin(), labels[i].end(), batch_labels.begin() + static_cast<std::ptrdiff_t>(r * ld));
    }
    const auto& stats = gan::train_step(*state, Tensor::constant({k, t, d}, batch),
                                        Tensor::constant({k, ld}, batch_labels));
    auto record = step_record(stats);
    if (config.eval_every > 0 && stats.step % config.eval_every == 0) {
      const auto syn = gan::synthesize(state->generator, eval_labels, 1, norm, config.seed + stats.step);
      record["eval_wfd"] = spectral::segment_mean_distance<double>(syn, eval_centers);
    }
    metrics << record.dump() << "\n" << std::flush;
    if (config.checkpoint_every > 0 && stats.step % config.checkpoint_every == 0) {
      save_checkpoint(checkpoint_name(a.out, stats.step), capture(*state, config, norm));
      saved_at = stats.step;
    }
  }
  if (saved_at != state->step) save_checkpoint(checkpoint_name(a.out, state->step), capture(*state, config, norm));
  out << "trained to step " << state->step << "; checkpoint " << checkpoint_name(a.out, state->step).string()
      << "\n";
  return kOk;
}

// --- synth -------------------------------------------------------------------

struct SynthArgs {
  fs::path ckpt, labels, out;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

std::vector<ConditionLabel> read_labels(const fs::path& path, std::size_t onehot_dim) {
  std::ifstream in(path);
  if (!in) throw data::DataError(path.string() + ": cannot open");
  std::vector<ConditionLabel> out;
  try {
    const json list = json::parse(in);
    if (!list.is_array() || list.empty()) throw data::DataError(path.string() + ": expected a non-empty JSON list");
    for (const auto& item : list) {
      ConditionLabel l;
      if (item.is_array()) {
        const auto flat = item.get<std::vector<double>>();
        const auto k = std::min(flat.size(), onehot_dim);
        l.onehot.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(k));
        if (flat.size() == onehot_dim + 1) l.lifetime = flat.back();
        else if (flat.size() > onehot_dim + 1) l.onehot = flat;  // rejected below by the dimension check
      } else {
        l.onehot = item.at("onehot").get<std::vector<double>>();
        if (item.contains("lifetime")) l.lifetime = item.at("lifetime").get<double>();
      }
      out.push_back(std::move(l));
    }
  } catch (const json::exception& e) {
    throw data::DataError(path.string() + ": " + e.what());
  }
  return out;
}

int synth(const SynthArgs& a, std::ostream& out) {
  require_parent(a.out);
  const auto ckpt = load_checkpoint(a.ckpt);
  const auto config = parse_config(ckpt.config_toml, a.ckpt.string());
  const auto labels = read_labels(a.labels, config.gan.onehot_dim);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].dim() != config.gan.generator.label_dim) {
      throw data::DataError(a.labels.string() + ": label " + std::to_string(i) + " has " +
                            std::to_string(labels[i].dim()) + " entries, checkpoint expects " +
                            std::to_string(config.gan.generator.label_dim));
    }
    try {
      labels[i].validate(false);
    } catch (const std::invalid_argument& e) {
      throw data::DataError(a.labels.string() + ": label " + std::to_string(i) + ": " + e.what());
    }
  }

  const auto state = load_state(ckpt);
  const auto windows = gan::synthesize(state->generator, labels, a.n, ckpt.norm, a.seed);
  std::vector<data::WindowRecord> records;
  records.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    records.push_back({windows[i], labels[i / a.n], {"synthetic", i, true}});
  }
  data::CorpusMeta meta;
  meta.onehot_dim = config.gan.onehot_dim;
  data::write_corpus(a.out, records, meta);
  out << "wrote " << records.size() << " synthetic windows to " << a.out.string() << "\n";
  return kOk;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
  fs::path real, synth, report;
  std::string subset;
  std::size_t max_pairs = 0;
};

std::vector<double> to_vector(const spectral::Vec<double>& v) { return {v.data(), v.data() + v.size()}; }

int eval(const EvalArgs& a, std::ostream& out) {
  require_parent(a.report);
  const auto real = data::read_corpus(a.real);
  const auto syn = data::read_corpus(a.synth);
  if (real.header.t != syn.header.t || real.header.d != syn.header.d) {
    throw data::DataError("corpora differ in shape: " + std::to_string(real.header.t) + "x" +
                          std::to_string(real.header.d) + " vs " + std::to_string(syn.header.t) + "x" +
                          std::to_string(syn.header.d));
  }
  const auto real_all = all_indices(real.records.size());
  const auto& real_idx = subset_indices(real, a.subset, real_all);
  if (real_idx.empty()) throw data::DataError("subset '" + a.subset + "' is empty");
  const auto a_windows = windows_at(real, real_idx);
  const auto b_windows = windows_at(syn, all_indices(syn.records.size()));

  const auto r = spectral::segment_set_report<double>(a_windows, b_windows, {}, {a.max_pairs});
  json channels = json::array();
  for (const auto& c : r.channels) {
    channels.push_back({{"intra_real", c.intra_a},
                        {"intra_synth", c.intra_b},
                        {"inter", c.inter},
                        {"pairwise_mean", c.pairwise_mean},
                        {"mean_real", to_vector(c.mean_a.mass)},
                        {"mean_synth", to_vector(c.mean_b.mass)}});
  }
  const json report = {{"t", real.header.t},
                       {"d", real.header.d},
                       {"real", {{"path", a.real.string()}, {"subset", a.subset.empty() ? "all" : a.subset},
                                 {"count", a_windows.size()}}},
                       {"synth", {{"path", a.synth.string()}, {"count", b_windows.size()}}},
                       {"intra_real", r.intra_a},
                       {"intra_synth", r.intra_b},
                       {"inter", r.inter},
                       {"pairwise_mean", r.pairwise_mean},
                       {"freqs", to_vector(r.channels.front().mean_a.freqs)},
                       {"channels", channels}};
  write_text(a.report, report.dump(2) + "\n");
  out << "inter " << shortest(r.inter) << "  intra_real " << shortest(r.intra_a) << "  intra_synth "
      << shortest(r.intra_b) << "\n";
  return kOk;
}

// --- spectra -----------------------------------------------------------------

struct SpectraArgs {
  fs::path data, out;
  std::size_t count = 0;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

int spectra(const SpectraArgs& a, std::ostream& out) {
  require_parent(a.out);
  const auto corpus = data::read_corpus(a.data);

  // Runs in order of first appearance; records keep corpus order within a run.
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> runs;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& src = corpus.meta.provenance.empty() ? std::string("corpus") : corpus.records[i].source.source;
    auto [it, fresh] = runs.try_emplace(src);
    if (fresh) order.push_back(src);
    it->second.push_back(i);
  }
  for (const auto& id : order) {
    if (a.count > runs[id].size()) {
      throw data::DataError("run '" + id + "' has " + std::to_string(runs[id].size()) + " windows, --count is " +
                            std::to_string(a.count));
    }
  }

  const std::size_t d = corpus.header.d;
  std::vector<std::string> names;
  std::vector<spectral::Npsd<double>> columns;
  for (const auto& id : order) {
    for (auto p : evenly_spaced(runs[id].size(), a.count)) {
      const auto& rec = corpus.records[runs[id][p]];
      const std::uint64_t start = corpus.meta.provenance.empty() ? runs[id][p] : rec.source.start;
      for (std::size_t c = 0; c < d; ++c) {
        names.push_back(id + "@" + std::to_string(start) + (d > 1 ? "/ch" + std::to_string(c) : ""));
        columns.push_back(spectral::normalize_psd(spectral::periodogram(rec.window.col(static_cast<Eigen::Index>(c)))));
      }
    }
  }

  std::string csv = "freq";
  for (const auto& n : names) csv += "," + csv_field(n);
  csv += "\n";
  const auto& freqs = columns.front().freqs;
  for (Eigen::Index k = 0; k < freqs.size(); ++k) {
    csv += shortest(freqs[k]);
    for (const auto& col : columns) csv += "," + shortest(col.mass[k]);
    csv += "\n";
  }
  write_text(a.out, csv);
  out << "wrote " << columns.size() << " spectra from " << order.size() << " runs to " << a.out.string() << "\n";
  return kOk;
}

}  // namespace

std::vector<std::size_t> evenly_spaced(std::size_t n, std::size_t count) {
  if (count == 0 || count > n) {
    throw data::DataError("cannot pick " + std::to_string(count) + " of " + std::to_string(n) + " windows");
  }
  if (count == 1) return {0};
  const std::size_t step = (n - 1) / (count - 1);
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = i * step;
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transformer time-series GAN toolkit"};
  app.name(args.empty() ? "tsgan" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);

  GenDataArgs gd;
  auto* gen = app.add_subcommand("gen-data", "Generate the artificial compound-wave corpus");
  gen->add_option("--out", gd.out, "Corpus path")->required();
  gen->add_option("--n", gd.n, "Window count")->required()->check(CLI::PositiveNumber);
  gen->add_option("--t", gd.t, "Window length (power of two)")->required();
  gen->add_option("--d", gd.d, "Channels")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gd.seed, "Seed")->capture_default_str();
  gen->add_flag("--strict-balance", gd.strict, "Reject counts that do not divide evenly over the classes");

  IngestArgs ig;
  auto* ing = app.add_subcommand("ingest", "Window a directory of run-to-failure CSV recordings");
  ing->add_option("--dir", ig.dir, "Directory of runs")->required();
  ing->add_option("--window", ig.window, "Window length (power of two)")->required();
  ing->add_option("--stride", ig.stride, "Window stride (default: --window)");
  ing->add_option("--out", ig.out, "Corpus path")->required();
  ing->add_option("--seed", ig.seed, "Split seed")->capture_default_str();
  ing->add_option("--columns", ig.columns, "Zero-based channel columns")->capture_default_str();
  ing->add_option("--delimiter", ig.delimiter, "',' or ';' (default: sniff)");
  ing->add_flag("--header", ig.header, "Skip the first line of every file");

  TrainArgs tr;
  auto* trn = app.add_subcommand("train", "Train the GAN");
  trn->add_option("--config", tr.config, "TOML config");
  trn->add_option("--data", tr.data, "Corpus path (overrides data.path)");
  trn->add_option("--out", tr.out, "Output directory")->required();
  trn->add_option("--resume", tr.resume, "Checkpoint to continue from");
  trn->add_option("--max-steps", tr.max_steps, "Override run.max_steps")->check(CLI::PositiveNumber);

  SynthArgs sy;
  auto* syn = app.add_subcommand("synth", "Generate synthetic windows from a checkpoint");
  syn->add_option("--ckpt", sy.ckpt, "Checkpoint")->required();
  syn->add_option("--labels", sy.labels, "JSON list of labels")->required();
  syn->add_option("--n", sy.n, "Windows per label")->required()->check(CLI::PositiveNumber);
  syn->add_option("--out", sy.out, "Corpus path")->required();
  syn->add_option("--seed", sy.seed, "Noise seed")->capture_default_str();

  EvalArgs ev;
  auto* evl = app.add_subcommand("eval", "Spectral distance report between two corpora");
  evl->add_option("--real", ev.real, "Reference corpus")->required();
  evl->add_option("--synth", ev.synth, "Compared corpus")->required();
  evl->add_option("--report", ev.report, "JSON report path")->required();
  evl->add_option("--subset", ev.subset, "Restrict the reference corpus to a split subset")
      ->check(CLI::IsMember({"test", "train", "validate"}));
  evl->add_option("--max-pairs", ev.max_pairs, "Cap on cross pairs for pairwise_mean (0: all)")
      ->capture_default_str();

  SpectraArgs sp;
  auto* spc = app.add_subcommand("spectra", "Export NPSDs of evenly spaced windows per run as CSV");
  spc->add_option("--data", sp.data, "Corpus path")->required();
  spc->add_option("--count", sp.count, "Windows per run")->required()->check(CLI::PositiveNumber);
  spc->add_option("--out", sp.out, "CSV path")->required();

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return gen_data(gd, out);
    if (ing->parsed()) return ingest(ig, out);
    if (trn->parsed()) return train(tr, out);
    if (syn->parsed()) return synth(sy, out);
    if (evl->parsed()) return eval(ev, out);
    return spectra(sp, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const gan::NumericError& e) {
    err << "numeric abort: " << e.what() << "\n";
    return kNumericAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace tsgan::cli
