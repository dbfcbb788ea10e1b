/* Copyright 2026 The dpdfnet-cpp Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "dpdfnet/corpus.hpp"
#include "dpdfnet/kernels.hpp"
#include "dpdfnet/model.hpp"
#include "dpdfnet/pipeline.hpp"
#include "dpdfnet/prism.hpp"
#include "dpdfnet/rng.hpp"
#include "dpdfnet/wav.hpp"
#include "json.hpp"

namespace dpdfnet::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnreadableWeights : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelArgs {
  std::string path;
  std::size_t k = 0;
  std::uint64_t seed = 1;
};

void add_model_options(CLI::App* cmd, ModelArgs& m) {
  cmd->add_option("--model", m.path, "weight container (otherwise a seeded random model)");
  cmd->add_option("--k", m.k, "dual-path blocks per branch for a random model");
  cmd->add_option("--seed", m.seed, "seed for a random model");
}

Model load_model(const ModelArgs& m) {
  if (!m.path.empty()) {
    if (!std::ifstream(m.path, std::ios::binary)) {
      throw UnreadableWeights("cannot read weight file '" + m.path + "'");
    }
    return Model::from_weights(load_weights_file(m.path));
  }
  ModelConfig config;
  config.dprnn_blocks = m.k;
  return build_model(config, m.seed);
}

void require_readable(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw WavError("cannot read input '" + path + "'");
}

void require_writable_dir(const std::string& path) {
  const fs::path parent = fs::absolute(fs::path(path)).parent_path();
  if (!fs::is_directory(parent)) {
    throw UsageError("output directory '" + parent.string() + "' does not exist");
  }
}

ReportFormat parse_format(const std::string& name) {
  const auto f = report_format_from_name(name);
  if (!f) throw UsageError("unknown --format '" + name + "' (text, json, csv)");
  return *f;
}

template <class Fn>
void parallel_for(std::size_t jobs, Fn&& fn) {
  const std::size_t workers = worker_count(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto body = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> stream_enhance(const Model& model, std::span<const double> x,
                                   std::size_t chunk) {
  EnhancerStream stream(model);
  std::vector<double> delayed;
  delayed.reserve(x.size() + stream.latency());
  for (std::size_t pos = 0; pos < x.size(); pos += chunk) {
    const auto n = std::min(chunk, x.size() - pos);
    const auto y = stream.push(x.subspan(pos, n));
    delayed.insert(delayed.end(), y.begin(), y.end());
  }
  const auto tail = stream.flush();
  delayed.insert(delayed.end(), tail.begin(), tail.end());
  const auto lat = static_cast<std::ptrdiff_t>(stream.latency());
  return {delayed.begin() + lat, delayed.begin() + lat + static_cast<std::ptrdiff_t>(x.size())};
}

// --- enhance -------------------------------------------------------------

struct EnhanceArgs {
  ModelArgs model;
  std::string input, output;
  std::size_t chunk = 160;
};

int cmd_enhance(const EnhanceArgs& a, std::ostream& out) {
  if (a.chunk == 0) throw UsageError("--chunk must be positive");
  require_readable(a.input);
  require_writable_dir(a.output);
  WavData wav = read_wav(a.input);
  require_16k_mono(wav, a.input);
  const Model model = load_model(a.model);
  wav.samples = stream_enhance(model, wav.samples, a.chunk);
  write_wav(a.output, wav);
  out << "enhanced " << a.input << " -> " << a.output << " (" << wav.samples.size()
      << " samples)\n";
  return kOk;
}

// --- bench ---------------------------------------------------------------

struct BenchArgs {
  ModelArgs model;
  double seconds = 10.0;
  int runs = 5;
  std::string format = "text";
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  if (!(a.seconds > 0.0)) throw UsageError("--seconds must be positive");
  if (a.runs < 5) throw UsageError("--runs must be at least 5");
  const ReportFormat format = parse_format(a.format);
  const Model model = load_model(a.model);

  Rng rng(a.model.seed);
  std::vector<double> noise(static_cast<std::size_t>(a.seconds * 16000.0));
  for (double& v : noise) v = 0.1 * rng.normal();

  std::vector<double> times;
  for (int r = 0; r < a.runs; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto y = stream_enhance(model, noise, 160);
    const auto t1 = std::chrono::steady_clock::now();
    if (y.size() != noise.size()) throw std::runtime_error("bench: length mismatch");
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  const double median = times[times.size() / 2];
  const double rtf = median / a.seconds;
  const auto params = count_params(model);
  const double gmacs = static_cast<double>(estimate_macs(model, 1.0)) * 1e-9;
  const std::string backend(kernels::active().name);

  switch (format) {
    case ReportFormat::kJson:
      out << json{{"k", model.config().dprnn_blocks}, {"backend", backend},
                  {"seconds", a.seconds}, {"runs", a.runs}, {"median_s", median},
                  {"rtf", rtf}, {"params", params},
                  {"macs_per_frame", model.macs_per_frame()}, {"gmacs_per_s", gmacs}}
                 .dump(2)
          << '\n';
      break;
    case ReportFormat::kCsv:
      out << "k,backend,seconds,runs,median_s,rtf,params,macs_per_frame,gmacs_per_s\n"
          << model.config().dprnn_blocks << ',' << backend << ',' << a.seconds << ','
          << a.runs << ',' << median << ',' << rtf << ',' << params << ','
          << model.macs_per_frame() << ',' << gmacs << '\n';
      break;
    case ReportFormat::kText:
      out << std::fixed << std::setprecision(4) << "k          " << model.config().dprnn_blocks
          << "\nbackend    " << backend << "\naudio      " << a.seconds << " s"
          << "\nmedian     " << median << " s over " << a.runs << " runs"
          << "\nRTF        " << rtf << "\nparams     " << std::setprecision(3)
          << static_cast<double>(params) * 1e-6 << " M (" << params << ")"
          << "\nMACs       " << gmacs << " G/s (" << model.macs_per_frame()
          << " per frame)\n";
      break;
  }
  return kOk;
}

// --- prism ---------------------------------------------------------------

struct PrismArgs {
  std::vector<std::string> tables;
  std::string format = "text";
};

int cmd_prism(const PrismArgs& a, std::ostream& out) {
  const ReportFormat format = parse_format(a.format);
  for (const auto& path : a.tables) {
    std::ifstream probe(path);
    if (!probe) throw PrismError("cannot read metric table '" + path + "'");
  }
  std::vector<std::string> reports(a.tables.size());
  parallel_for(a.tables.size(), [&](std::size_t i) {
    const auto scores = prism_score(load_metric_csv(a.tables[i]));
    std::ostringstream os;
    write_prism_report(os, scores, format);
    reports[i] = os.str();
  });
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports.size() > 1 && format == ReportFormat::kText) out << "# " << a.tables[i] << '\n';
    out << reports[i];
  }
  return kOk;
}

// --- mix -----------------------------------------------------------------

struct MixArgs {
  std::string noise;
  std::vector<std::string> speech;
  std::vector<double> snr{0.0, 5.0, 10.0};
  double duration = 150.0;
  double max_gap = 15.0;
  std::uint64_t seed = 1;
  std::string out;
};

std::string snr_tag(double snr) {
  std::ostringstream os;
  os << snr;
  return os.str();
}

int cmd_mix(const MixArgs& a, std::ostream& out) {
  require_readable(a.noise);
  for (const auto& p : a.speech) require_readable(p);
  require_writable_dir(a.out + ".wav");

  WavData noise = read_wav(a.noise);
  require_16k_mono(noise, a.noise);
  std::vector<SpeechSegment> segments;
  for (const auto& p : a.speech) {
    WavData w = read_wav(p);
    require_16k_mono(w, p);
    segments.push_back({fs::path(p).stem().string(), std::move(w.samples)});
  }

  std::vector<std::string> lines(a.snr.size());
  parallel_for(a.snr.size(), [&](std::size_t i) {
    MixSpec spec;
    spec.snr_db = a.snr[i];
    spec.clip_seconds = a.duration;
    spec.max_gap_seconds = a.max_gap;
    const EvalClip clip = assemble_eval_clip(segments, noise.samples, spec, a.seed,
                                             fs::path(a.noise).stem().string());
    const std::string stem = a.snr.size() > 1 ? a.out + "_snr" + snr_tag(a.snr[i]) : a.out;
    WavData w;
    w.encoding = WavEncoding::kFloat32;
    w.samples = clip.mixture;
    write_wav(stem + ".wav", w);
    w.samples = clip.clean;
    write_wav(stem + ".clean.wav", w);
    std::ofstream sidecar(stem + ".json");
    sidecar << clip_sidecar_json(clip) << '\n';
    if (!sidecar) throw std::runtime_error("cannot write '" + stem + ".json'");
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << stem << ".wav: " << clip.placements.size()
       << " segments, snr " << measure_snr(clip.clean, clip.noise) << " dB\n";
    lines[i] = os.str();
  });
  for (const auto& l : lines) out << l;
  return kOk;
}

// --- inspect / init ------------------------------------------------------

struct InspectArgs {
  std::string path;
  std::string format = "text";
};

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
  const ReportFormat format = parse_format(a.format);
  if (!std::ifstream(a.path, std::ios::binary)) {
    throw UnreadableWeights("cannot read weight file '" + a.path + "'");
  }
  const ModelWeights w = load_weights_file(a.path);
  const Model model = Model::from_weights(w);
  const ModelConfig& c = w.config;
  switch (format) {
    case ReportFormat::kJson: {
      json tensors = json::array();
      for (const auto& t : w.tensors) {
        tensors.push_back({{"name", t.name}, {"shape", t.shape}, {"numel", t.numel()}});
      }
      out << json{{"k", c.dprnn_blocks}, {"params", model.param_count()},
                  {"macs_per_frame", model.macs_per_frame()}, {"tensors", tensors}}
                 .dump(2)
          << '\n';
      break;
    }
    case ReportFormat::kCsv:
      out << "name,shape,numel\n";
      for (const auto& t : w.tensors) {
        out << t.name << ',';
        for (std::size_t i = 0; i < t.shape.size(); ++i) out << (i ? "x" : "") << t.shape[i];
        out << ',' << t.numel() << '\n';
      }
      break;
    case ReportFormat::kText:
      out << "k=" << c.dprnn_blocks << " channels=" << c.conv_channels
          << " erb_bands=" << c.erb_bands << " df_bins=" << c.df_bins
          << " df_order=" << c.df_order << " lookahead=" << c.lookahead
          << " emb_dim=" << c.emb_dim << " groups=" << c.groups << '\n';
      for (const auto& t : w.tensors) {
        std::ostringstream shape;
        for (std::size_t i = 0; i < t.shape.size(); ++i) shape << (i ? "x" : "") << t.shape[i];
        out << std::left << std::setw(40) << t.name << std::setw(14) << shape.str()
            << t.numel() << '\n';
      }
      out << "tensors " << w.tensors.size() << ", params " << model.param_count()
          << ", MACs/frame " << model.macs_per_frame() << '\n';
      break;
  }
  return kOk;
}

int cmd_init(const ModelArgs& m, const std::string& path, std::ostream& out) {
  require_writable_dir(path);
  ModelConfig config;
  config.dprnn_blocks = m.k;
  const Model model = build_model(config, m.seed);
  save_weights_file(model.weights(), path);
  out << "wrote " << path << " (k=" << m.k << ", seed=" << m.seed << ", "
      << model.param_count() << " params)\n";
  return kOk;
}

}  // namespace

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DPDFNET_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming speech enhancement and evaluation toolkit", "dpdfnet"};
  app.require_subcommand(1);

  EnhanceArgs enhance;
  auto* c_enhance = app.add_subcommand("enhance", "enhance a 16 kHz mono WAV (streaming path)");
  add_model_options(c_enhance, enhance.model);
  c_enhance->add_option("--chunk", enhance.chunk, "samples per push");
  c_enhance->add_option("input", enhance.input)->required();
  c_enhance->add_option("output", enhance.output)->required();

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "real-time factor, params and MACs");
  add_model_options(c_bench, bench.model);
  c_bench->add_option("--seconds,--duration", bench.seconds, "synthetic audio length");
  c_bench->add_option("--runs", bench.runs, "timed runs (median reported, >= 5)");
  c_bench->add_option("--format", bench.format);

  PrismArgs prism;
  auto* c_prism = app.add_subcommand("prism", "PRISM report from metric CSV tables");
  c_prism->add_option("tables", prism.tables)->required();
  c_prism->add_option("--format", prism.format);

  MixArgs mix;
  auto* c_mix = app.add_subcommand("mix", "build evaluation clips from speech and noise WAVs");
  c_mix->add_option("noise", mix.noise)->required();
  c_mix->add_option("speech", mix.speech)->required();
  c_mix->add_option("--snr", mix.snr, "target SNR(s) in dB");
  c_mix->add_option("--duration", mix.duration, "clip length in seconds");
  c_mix->add_option("--max-gap", mix.max_gap, "longest silence between segments, seconds");
  c_mix->add_option("--seed", mix.seed);
  c_mix->add_option("--out", mix.out, "output path stem")->required();

  InspectArgs inspect;
  auto* c_inspect = app.add_subcommand("inspect", "dump a weight container manifest");
  c_inspect->add_option("weights", inspect.path)->required();
  c_inspect->add_option("--format", inspect.format);

  ModelArgs init;
  std::string init_out;
  auto* c_init = app.add_subcommand("init", "write a seeded random weight container");
  c_init->add_option("--k", init.k);
  c_init->add_option("--seed", init.seed);
  c_init->add_option("--out", init_out)->required();

  // CLI11 consumes a vector from the back.
  std::vector<std::string> rev;
  if (args.size() > 1) rev.assign(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*c_enhance) return cmd_enhance(enhance, out);
    if (*c_bench) return cmd_bench(bench, out);
    if (*c_prism) return cmd_prism(prism, out);
    if (*c_mix) return cmd_mix(mix, out);
    if (*c_inspect) return cmd_inspect(inspect, out);
    if (*c_init) return cmd_init(init, init_out, out);
  } catch (const UsageError& e) {
    err << "dpdfnet: usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const WavError& e) {
    err << "dpdfnet: audio error: " << e.what() << '\n';
    return kBadAudio;
  } catch (const UnreadableWeights& e) {
    err << "dpdfnet: weight file error: " << e.what() << '\n';
    return kBadWeights;
  } catch (const WeightError& e) {
    err << "dpdfnet: weight file error: " << e.what() << '\n';
    return kBadWeights;
  } catch (const PrismError& e) {
    err << "dpdfnet: metric table error: " << e.what() << '\n';
    return kBadTable;
  } catch (const std::exception& e) {
    err << "dpdfnet: error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace dpdfnet::cli
