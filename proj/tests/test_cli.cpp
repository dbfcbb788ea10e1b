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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "cli.hpp"
#include "dpdfnet/model.hpp"
#include "dpdfnet/wav.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace dpdfnet {
namespace {

namespace fs = std::filesystem;
const std::string kDataDir = DPDFNET_DATA_DIR;

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "dpdfnet");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) { return ::testing::TempDir() + "/cli_" + name; }

void write_16k(const std::string& path, std::vector<double> samples, int rate = 16000) {
  WavData w;
  w.sample_rate = rate;
  w.samples = std::move(samples);
  write_wav(path, w);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  const auto r = run({"prism", kDataDir + "/published_metrics.csv", "--format", "xml"});
  EXPECT_EQ(r.code, cli::kUsage);
  EXPECT_NE(r.err.find("dpdfnet: usage error"), std::string::npos);
}

TEST(Cli, PrismOnPublishedTable) {
  const auto r = run({"prism", kDataDir + "/published_metrics.csv", "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["scores"].size(), 18u);
  EXPECT_EQ(j["scores"][17]["model"], "DPDFNet-8");
  EXPECT_EQ(j["scores"][17]["prism"].get<double>(), 1.0);
}

TEST(Cli, PrismBadTables) {
  {
    std::ofstream f(tmp("bad.csv"));
    f << "model,pesq\nx,1\n";
  }
  EXPECT_EQ(run({"prism", tmp("bad.csv")}).code, cli::kBadTable);
  EXPECT_EQ(run({"prism", tmp("missing.csv")}).code, cli::kBadTable);
}

TEST(Cli, EnhancePreservesLength) {
  write_16k(tmp("in.wav"), testing::random_signal(5000, 1, 0.1));
  const auto r = run({"enhance", "--k", "2", "--seed", "3", "--chunk", "333", tmp("in.wav"),
                      tmp("out.wav")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto w = read_wav(tmp("out.wav"));
  EXPECT_EQ(w.samples.size(), 5000u);
  EXPECT_EQ(w.sample_rate, 16000);
}

TEST(Cli, EnhanceRejectsWrongRate) {
  write_16k(tmp("44k.wav"), std::vector<double>(1000, 0.1), 44100);
  const auto r = run({"enhance", tmp("44k.wav"), tmp("never.wav")});
  EXPECT_EQ(r.code, cli::kBadAudio);
  EXPECT_NE(r.err.find("16"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(tmp("never.wav")));
}

TEST(Cli, EnhanceBadWeights) {
  write_16k(tmp("in2.wav"), std::vector<double>(1000, 0.1));
  {
    std::ofstream f(tmp("junk.bin"), std::ios::binary);
    f << "garbage";
  }
  EXPECT_EQ(run({"enhance", "--model", tmp("junk.bin"), tmp("in2.wav"), tmp("o.wav")}).code,
            cli::kBadWeights);
  EXPECT_EQ(run({"enhance", "--model", tmp("nope.bin"), tmp("in2.wav"), tmp("o.wav")}).code,
            cli::kBadWeights);
}

TEST(Cli, InitInspectAndEnhanceWithFile) {
  ASSERT_EQ(run({"init", "--k", "2", "--seed", "5", "--out", tmp("m.bin")}).code, cli::kOk);
  const auto r = run({"inspect", tmp("m.bin"), "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["k"], 2);
  ModelConfig cfg;
  cfg.dprnn_blocks = 2;
  EXPECT_EQ(j["params"].get<std::size_t>(), count_params(build_model(cfg, 5)));

  write_16k(tmp("in3.wav"), testing::random_signal(2000, 2, 0.1));
  ASSERT_EQ(run({"enhance", "--model", tmp("m.bin"), tmp("in3.wav"), tmp("o3.wav")}).code,
            cli::kOk);
  ASSERT_EQ(run({"enhance", "--k", "2", "--seed", "5", tmp("in3.wav"), tmp("o4.wav")}).code,
            cli::kOk);
  EXPECT_EQ(read_wav(tmp("o3.wav")).samples, read_wav(tmp("o4.wav")).samples);
}

TEST(Cli, Bench) {
  const auto r = run({"bench", "--seconds", "0.5", "--runs", "5", "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_GT(j["rtf"].get<double>(), 0.0);
  EXPECT_EQ(j["k"], 0);
  EXPECT_EQ(run({"bench", "--runs", "2"}).code, cli::kUsage);
}

TEST(Cli, MixWritesOutputsPerSnr) {
  write_16k(tmp("noise.wav"), testing::random_signal(16000, 3, 0.1));
  std::vector<std::string> args{"mix", tmp("noise.wav")};
  for (int i = 0; i < 4; ++i) {
    const std::string p = tmp("spk" + std::to_string(i) + ".wav");
    write_16k(p, testing::random_signal(3 * 16000, 10 + i, 0.2));
    args.push_back(p);
  }
  for (const char* a : {"--duration", "10", "--max-gap", "1", "--snr", "0", "--snr", "10",
                        "--seed", "9", "--out"}) {
    args.push_back(a);
  }
  args.push_back(tmp("clip"));
  const auto r = run(args);
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  for (const char* tag : {"_snr0", "_snr10"}) {
    const std::string stem = tmp("clip") + tag;
    const auto mix = read_wav(stem + ".wav");
    EXPECT_EQ(mix.samples.size(), 160000u);
    EXPECT_EQ(mix.encoding, WavEncoding::kFloat32);
    EXPECT_EQ(read_wav(stem + ".clean.wav").samples.size(), 160000u);
    std::ifstream side(stem + ".json");
    const auto j = nlohmann::json::parse(side);
    EXPECT_EQ(j["seed"], 9);
  }
}

TEST(Cli, WorkerCountHonoursEnvironment) {
  ::setenv("DPDFNET_THREADS", "1", 1);
  EXPECT_EQ(cli::worker_count(8), 1u);
  ::unsetenv("DPDFNET_THREADS");
  EXPECT_EQ(cli::worker_count(1), 1u);
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  EXPECT_EQ(cli::worker_count(1000), hw);
}

}  // namespace
}  // namespace dpdfnet
