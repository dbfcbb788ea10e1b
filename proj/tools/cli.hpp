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

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace dpdfnet::cli {

// Exit codes. Each failure class gets its own code and a one-line message on
// the error stream.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kBadAudio = 3,
  kBadWeights = 4,
  kBadTable = 5,
};

// Entry point for `dpdfnet <subcommand> ...`; argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// min(jobs, hardware threads, DPDFNET_THREADS when set to a positive integer).
std::size_t worker_count(std::size_t jobs);

}  // namespace dpdfnet::cli
