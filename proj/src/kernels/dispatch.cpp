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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "dpdfnet/kernels.hpp"

namespace dpdfnet::kernels {

#if defined(DPDFNET_HAVE_AVX2)
const KernelTable& avx2_table_unchecked();
#endif
#if defined(DPDFNET_HAVE_NEON)
const KernelTable& neon_table_unchecked();
#endif

const KernelTable* avx2_table() {
#if defined(DPDFNET_HAVE_AVX2)
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() {
#if defined(DPDFNET_HAVE_NEON)
  // NEON is mandatory on aarch64.
  return &neon_table_unchecked();
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return &scalar_table();
    case Backend::kAvx2:
      return avx2_table();
    case Backend::kNeon:
      return neon_table();
  }
  return nullptr;
}

// DPDFNET_BACKEND=scalar|avx2|neon overrides the choice when that backend is
// available; anything else is ignored.
const KernelTable* best_table() {
  if (const char* env = std::getenv("DPDFNET_BACKEND")) {
    for (Backend b : {Backend::kScalar, Backend::kAvx2, Backend::kNeon}) {
      if (backend_name(b) == env) {
        if (const auto* t = table_for(b)) return t;
      }
    }
  }
  if (const auto* t = avx2_table()) return t;
  if (const auto* t = neon_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{best_table()};
  return table;
}

}  // namespace

bool backend_available(Backend b) { return table_for(b) != nullptr; }

const KernelTable& active() {
  return *current().load(std::memory_order_acquire);
}

void set_backend(Backend b) {
  const KernelTable* t = table_for(b);
  if (t == nullptr) {
    throw std::invalid_argument("kernel backend '" +
                                std::string(backend_name(b)) +
                                "' is not available on this machine");
  }
  current().store(t, std::memory_order_release);
}

void reset_backend() { current().store(best_table(), std::memory_order_release); }

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

}  // namespace dpdfnet::kernels
