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

// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "dpdfnet/corpus.hpp"
#include "dpdfnet/losses.hpp"
#include "dpdfnet/model.hpp"
#include "dpdfnet/pipeline.hpp"
#include "dpdfnet/prism.hpp"
#include "dpdfnet/signal.hpp"
#include "dpdfnet/wav.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace {

using namespace dpdfnet;
using dpdfnet::testing::random_signal;
using Clock = std::chrono::steady_clock;

const std::string kDataDir = DPDFNET_DATA_DIR;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. PRISM on the published table.
Outcome prism_reproduction() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto scores = prism_score(load_metric_csv(kDataDir + "/published_metrics.csv"));
  const double elapsed = seconds_since(t0);

  std::map<std::string, double> published;
  std::ifstream in(kDataDir + "/published_prism.csv");
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto c = line.find(',');
    published[line.substr(0, c)] = std::stod(line.substr(c + 1));
  }
  double worst = 0.0;
  for (const auto& s : scores) {
    if (!published.count(s.model)) {
      o.require(false, "no published value for " + s.model);
      continue;
    }
    worst = std::max(worst, std::abs(s.prism - published[s.model]));
    if (s.model == "DPDFNet-8") o.require(s.prism == 1.0, "DPDFNet-8 not exactly 1");
  }
  o.require(scores.size() == 18 && published.size() == 18, "row count");
  o.require(worst <= 0.015, "max deviation " + fmt("%.4f", worst));
  o.require(elapsed < 1.0, "runtime " + fmt("%.3f s", elapsed));
  o.detail = o.pass ? "rows 18, max dev " + fmt("%.4f", worst) + ", " + fmt("%.4f s", elapsed)
                    : o.detail;
  return o;
}

// 2. STFT round trip.
Outcome stft_round_trip() {
  Outcome o;
  const auto t0 = Clock::now();
  const StftConfig cfg;
  double worst = 1e9;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = random_signal(16000, 500 + seed);
    const auto y = istft(stft(x, cfg), cfg, x.size());
    double sig = 0.0, err = 0.0;
    for (std::size_t n = cfg.hop; n < x.size(); ++n) {
      sig += x[n] * x[n];
      err += (y[n] - x[n]) * (y[n] - x[n]);
    }
    worst = std::min(worst, err > 0.0 ? 10.0 * std::log10(sig / err) : 400.0);
  }
  const double elapsed = seconds_since(t0);
  o.require(worst >= 120.0, "SNR " + fmt("%.1f dB", worst));
  o.require(elapsed < 1.0, "runtime " + fmt("%.3f s", elapsed));
  if (o.pass) o.detail = "min SNR " + fmt("%.1f dB", worst) + ", " + fmt("%.3f s", elapsed);
  return o;
}

// 3. Identity model through the offline pipeline.
Outcome identity_pipeline() {
  Outcome o;
  double worst = 0.0;
  for (std::size_t k : {0u, 2u}) {
    const Model m = dpdfnet::testing::identity_model(k);
    const auto x = random_signal(32000, 600 + k);
    const auto y = enhance_offline(x, m);
    o.require(y.size() == x.size(), "length");
    for (std::size_t n = 160; n < x.size(); ++n) worst = std::max(worst, std::abs(y[n] - x[n]));
  }
  o.require(worst <= 1e-5, "max error " + fmt("%.2e", worst));
  if (o.pass) o.detail = "max interior error " + fmt("%.2e", worst);
  return o;
}

std::vector<double> stream_all(const Model& m, std::span<const double> x, std::size_t chunk) {
  EnhancerStream s(m);
  std::vector<double> out;
  for (std::size_t pos = 0; pos < x.size(); pos += chunk) {
    const auto y = s.push(x.subspan(pos, std::min(chunk, x.size() - pos)));
    out.insert(out.end(), y.begin(), y.end());
  }
  const auto tail = s.flush();
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

// 4. Sample-by-sample streaming equals offline.
Outcome stream_equivalence() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto x = random_signal(160000, 700);
  std::string per_k;
  for (std::size_t k : {0u, 2u, 4u, 8u}) {
    ModelConfig cfg;
    cfg.dprnn_blocks = k;
    const Model m = build_model(cfg, 701 + k);
    const auto offline = enhance_offline(x, m);
    const auto streamed = stream_all(m, x, 1);
    double worst = 0.0;
    o.require(streamed.size() == x.size() + 640, "stream length");
    for (std::size_t n = 0; n < x.size(); ++n) {
      worst = std::max(worst, std::abs(streamed[n + 640] - offline[n]));
    }
    o.require(worst <= 1e-5, "k=" + std::to_string(k) + " error " + fmt("%.2e", worst));
    per_k += " k" + std::to_string(k) + "=" + fmt("%.1e", worst);
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 60.0, "runtime " + fmt("%.1f s", elapsed));
  if (o.pass) o.detail = "max error" + per_k + ", " + fmt("%.1f s", elapsed);
  return o;
}

// 5. Causality of the streamed output and the impulse delay.
Outcome causality_latency() {
  Outcome o;
  ModelConfig cfg;
  cfg.dprnn_blocks = 2;
  const Model m = build_model(cfg, 800);
  auto x = random_signal(16000, 801);
  const auto y0 = stream_all(m, x, 160);
  const std::size_t t = 9000;
  for (std::size_t n = t + 1; n < x.size(); ++n) x[n] += 0.25;
  const auto y1 = stream_all(m, x, 160);
  bool same = true;
  for (std::size_t n = 0; n <= t; ++n) same &= y0[n] == y1[n];
  o.require(same, "output at or before t changed");

  const Model id = dpdfnet::testing::identity_model(0);
  std::vector<double> imp(8000, 0.0);
  imp[3000] = 1.0;
  const auto yi = stream_all(id, imp, 160);
  std::size_t peak = 0;
  for (std::size_t n = 1; n < yi.size(); ++n) {
    if (std::abs(yi[n]) > std::abs(yi[peak])) peak = n;
  }
  const std::size_t delay = peak - 3000;
  o.require(delay == 640, "impulse delay " + std::to_string(delay));
  if (o.pass) o.detail = "prefix unchanged, impulse delay " + std::to_string(delay) + " samples";
  return o;
}

// 6. Losses against a brute-force DFT evaluation.
Outcome loss_oracle() {
  Outcome o;
  const auto s = random_signal(3200, 900);
  const auto y = random_signal(3200, 901, 0.2);
  double mr = 0.0, oa = 0.0;
  for (std::size_t L : {80u, 160u, 320u, 640u}) {
    const auto Y = dpdfnet::testing::naive_stft(y, L);
    const auto S = dpdfnet::testing::naive_stft(s, L);
    for (std::size_t k = 0; k < Y.size(); ++k) {
      for (std::size_t f = 0; f < Y[k].size(); ++f) {
        const double my = std::pow(std::abs(Y[k][f]), 0.3);
        const double ms = std::pow(std::abs(S[k][f]), 0.3);
        const double term = (my - ms) * (my - ms) +
                            std::norm(std::polar(my, std::arg(Y[k][f])) -
                                      std::polar(ms, std::arg(S[k][f])));
        mr += term;
        if (std::abs(S[k][f]) > std::abs(Y[k][f])) oa += term;
      }
    }
  }
  const double rel_mr = std::abs(mr_loss(y, s) - mr) / mr;
  const double rel_oa = std::abs(oa_loss(y, s) - oa) / oa;
  o.require(rel_mr <= 1e-6 && rel_oa <= 1e-6, "relative error " + fmt("%.2e", std::max(rel_mr, rel_oa)));
  o.require(total_loss(s, s) == 0.0, "L(s, s) != 0");
  std::size_t violations = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto a = random_signal(1600, 1000 + seed);
    const auto b = random_signal(1600, 2000 + seed, 0.05 + 0.005 * static_cast<double>(seed));
    const auto t = loss_terms(b, a, MrLossConfig{});
    violations += t.oa > t.mr;
  }
  o.require(violations == 0, std::to_string(violations) + " pairs with L_OA > L_MR");
  if (o.pass) o.detail = "relative error " + fmt("%.1e", std::max(rel_mr, rel_oa)) + ", 100 pairs ok";
  return o;
}

// 7. Parameter and MAC accounting.
Outcome accounting() {
  Outcome o;
  auto params = [](std::size_t k) {
    ModelConfig c;
    c.dprnn_blocks = k;
    return count_params(build_model(c, 1));
  };
  const auto p0 = params(0), p2 = params(2), p4 = params(4), p8 = params(8);
  const double rel = (static_cast<double>(p0) - 2.31e6) / 2.31e6;
  o.require(std::abs(rel) <= 0.2, "baseline params " + std::to_string(p0));
  o.require(p4 - p2 == p2 - p0 && p8 - p4 == 2 * (p4 - p2), "increment not linear in k");
  ModelConfig c;
  const double g = static_cast<double>(estimate_macs(build_model(c, 1), 1.0)) * 1e-9;
  o.require(g >= 0.1 && g <= 1.0, "baseline MACs " + fmt("%.3f G/s", g));
  if (o.pass) {
    o.detail = "k=0 " + fmt("%.3f M", static_cast<double>(p0) * 1e-6) + " (" +
               fmt("%+.1f%%", 100.0 * rel) + "), +" +
               fmt("%.3f M", static_cast<double>(p2 - p0) * 1e-6) + " per 2 blocks, " +
               fmt("%.3f G/s", g);
  }
  return o;
}

// 8. Mixing SNR, RIR split and clip determinism.
Outcome corpus_fidelity() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const double snr = rng.uniform(-5.0, 20.0);
    std::vector<double> speech(32000);
    for (std::size_t n = 0; n < speech.size(); ++n) {
      speech[n] = 0.4 * std::sin(2.0 * dpdfnet::testing::kPi * (180.0 + 20.0 * static_cast<double>(seed)) *
                                 static_cast<double>(n) / 16000.0);
    }
    const auto noise = random_signal(9000 + 97 * seed, 3000 + seed);
    const auto m = mix_at_snr(speech, noise, snr, seed);
    double ps = 0.0, pn = 0.0;
    for (std::size_t n = 0; n < speech.size(); ++n) {
      ps += speech[n] * speech[n];
      pn += m.noise[n] * m.noise[n];
    }
    worst = std::max(worst, std::abs(10.0 * std::log10(ps / pn) - snr));
  }
  o.require(worst <= 0.1, "SNR error " + fmt("%.3f dB", worst));

  auto rir = random_signal(12000, 3100);
  for (std::size_t n = 0; n < rir.size(); ++n) rir[n] *= std::exp(-static_cast<double>(n) / 3000.0);
  const auto split = split_rir(rir);
  double rerr = 0.0;
  for (std::size_t n = 0; n < rir.size(); ++n) {
    rerr = std::max(rerr, std::abs(split.early[n] + split.late[n] - rir[n]));
  }
  o.require(rerr <= 1e-9, "RIR reconstruction " + fmt("%.2e", rerr));

  std::vector<SpeechSegment> segs;
  for (int i = 0; i < 5; ++i) segs.push_back({"s" + std::to_string(i), random_signal(5 * 16000, 3200 + i)});
  MixSpec spec;
  spec.clip_seconds = 20.0;
  spec.max_gap_seconds = 1.0;
  const auto noise = random_signal(16000, 3300);
  const auto a = assemble_eval_clip(segs, noise, spec, 3301);
  const auto b = assemble_eval_clip(segs, noise, spec, 3301);
  o.require(a.mixture == b.mixture && clip_sidecar_json(a) == clip_sidecar_json(b),
            "clip not deterministic");
  if (o.pass) o.detail = "max SNR error " + fmt("%.2e dB", worst) + ", RIR " + fmt("%.1e", rerr);
  return o;
}

// Harmonic voice with syllable-rate envelope; each "language" gets its own
// pitch, syllable rate and formant tilt.
std::vector<double> synthetic_speech(int lang, double seconds) {
  Rng rng(4000 + static_cast<std::uint64_t>(lang));
  const double f0 = 90.0 + 15.0 * lang;
  const double syl = 3.0 + 0.3 * lang;
  const double tilt = 0.5 + 0.05 * lang;
  const auto n = static_cast<std::size_t>(seconds * 16000.0);
  std::vector<double> x(n);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 16000.0;
    phase += 2.0 * dpdfnet::testing::kPi * f0 * (1.0 + 0.1 * std::sin(2.0 * dpdfnet::testing::kPi * 0.7 * t)) / 16000.0;
    double v = 0.0;
    for (int h = 1; h <= 20; ++h) v += std::pow(tilt, h) * std::sin(h * phase);
    const double env = std::max(0.0, std::sin(dpdfnet::testing::kPi * syl * t));
    x[i] = 0.2 * env * v + 0.002 * rng.normal();
  }
  return x;
}

// 9. Smoke test on a 12-language clip produced by `mix`.
Outcome smoke_clip() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "dpdfnet_acceptance";
  fs::create_directories(dir);
  auto write = [](const fs::path& p, std::vector<double> s) {
    WavData w;
    w.encoding = WavEncoding::kFloat32;
    w.samples = std::move(s);
    write_wav(p.string(), w);
  };
  std::vector<std::string> args{"dpdfnet", "mix"};
  Rng rng(4100);
  std::vector<double> noise(30 * 16000);
  for (std::size_t i = 0; i < noise.size(); ++i) {
    noise[i] = 0.05 * rng.normal() * (1.0 + 0.5 * std::sin(static_cast<double>(i) * 1e-3));
  }
  write(dir / "noise.wav", noise);
  args.push_back((dir / "noise.wav").string());
  for (int lang = 0; lang < 12; ++lang) {
    const fs::path p = dir / ("lang" + std::to_string(lang) + ".wav");
    write(p, synthetic_speech(lang, 12.4));
    args.push_back(p.string());
  }
  for (const char* a : {"--snr", "5", "--max-gap", "1", "--seed", "4101", "--out"}) args.push_back(a);
  args.push_back((dir / "clip").string());
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  o.require(code == 0, "mix failed: " + err.str());
  if (!o.pass) return o;

  const auto clip = read_wav((dir / "clip.wav").string());
  std::ifstream side(dir / "clip.json");
  const auto meta = nlohmann::json::parse(side);
  o.require(meta["sources"].size() == 12, "clip has " + std::to_string(meta["sources"].size()) + " languages");

  ModelConfig cfg;
  cfg.dprnn_blocks = 2;
  const Model m = build_model(cfg, 4102);
  const auto y = enhance_offline(clip.samples, m);
  bool finite = true;
  for (double v : y) finite &= std::isfinite(v);
  o.require(y.size() == clip.samples.size(), "length changed");
  o.require(finite, "non-finite output");
  if (o.pass) {
    o.detail = fmt("%.0f s clip", static_cast<double>(y.size()) / 16000.0) + ", 12 sources, finite";
  }
  fs::remove_all(dir);
  return o;
}

// 10. Real-time factor of the baseline through the CLI benchmark.
Outcome rtf() {
  Outcome o;
  std::ostringstream out, err;
  const int code = cli::run({"dpdfnet", "bench", "--k", "0", "--seconds", "10", "--runs", "5",
                             "--format", "json"},
                            out, err);
  o.require(code == 0, "bench failed: " + err.str());
  if (!o.pass) return o;
  const auto j = nlohmann::json::parse(out.str());
  const double r = j["rtf"].get<double>();
  o.require(r < 1.0, "RTF " + fmt("%.3f", r));
  if (o.pass) o.detail = "RTF " + fmt("%.4f", r) + " (" + j["backend"].get<std::string>() + ")";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"prism reproduction", prism_reproduction},
      {"stft round trip", stft_round_trip},
      {"identity pipeline", identity_pipeline},
      {"streaming equals batch", stream_equivalence},
      {"causality and latency", causality_latency},
      {"loss oracle", loss_oracle},
      {"parameter accounting", accounting},
      {"corpus fidelity", corpus_fidelity},
      {"random-model smoke clip", smoke_clip},
      {"real-time factor", rtf},
  };
  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
