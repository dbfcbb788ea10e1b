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

// Data-parallel inner loops shared by the network layers and the deep filter.
//
// Every kernel has a scalar reference implementation; SIMD variants (AVX2+FMA
// on x86-64, NEON on aarch64) are compiled into separate translation units and
// selected once at runtime. The SIMD variants reorder floating-point sums, so
// they agree with the reference only up to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace dpdfnet::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

struct KernelTable {
  Backend backend;
  std::string_view name;

  // sum_i a[i] * b[i]
  float (*dot)(const float* a, const float* b, std::size_t n);
  // y[r] += sum_c w[r * cols + c] * x[c]   (w row-major, rows x cols)
  void (*gemv_acc)(const float* w, const float* x, float* y, std::size_t rows,
                   std::size_t cols);
  // y[i] += alpha * x[i]
  void (*axpy)(float alpha, const float* x, float* y, std::size_t n);
  // Interleaved complex multiply-accumulate in double precision:
  // y[i] += a[i] * b[i] for i < n complex values (2n doubles each).
  void (*cmac)(const double* a, const double* b, double* y, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the backend was not compiled in or the CPU lacks support.
const KernelTable* avx2_table();
const KernelTable* neon_table();

bool backend_available(Backend b);

// The table used by every layer. Defaults to the best supported backend.
const KernelTable& active();

// Forces a backend (tests and benchmarks). Throws std::invalid_argument if the
// backend is unavailable on this machine.
void set_backend(Backend b);
void reset_backend();

std::string_view backend_name(Backend b);

// Convenience wrappers over active().
inline float dot(std::span<const float> a, std::span<const float> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void gemv_acc(std::span<const float> w, std::span<const float> x,
                     std::span<float> y) {
  active().gemv_acc(w.data(), x.data(), y.data(), y.size(), x.size());
}
inline void axpy(float alpha, std::span<const float> x, std::span<float> y) {
  active().axpy(alpha, x.data(), y.data(), y.size());
}

}  // namespace dpdfnet::kernels
