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

#include <arm_neon.h>

#include "dpdfnet/kernels.hpp"

namespace dpdfnet::kernels {
namespace {

float dot_neon(const float* a, const float* b, std::size_t n) {
  float32x4_t acc0 = vdupq_n_f32(0.0f);
  float32x4_t acc1 = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = vfmaq_f32(acc0, vld1q_f32(a + i), vld1q_f32(b + i));
    acc1 = vfmaq_f32(acc1, vld1q_f32(a + i + 4), vld1q_f32(b + i + 4));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f32(acc0, vld1q_f32(a + i), vld1q_f32(b + i));
  }
  float acc = vaddvq_f32(vaddq_f32(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void gemv_acc_neon(const float* w, const float* x, float* y, std::size_t rows,
                   std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot_neon(w + r * cols, x, cols);
}

void axpy_neon(float alpha, const float* x, float* y, std::size_t n) {
  const float32x4_t av = vdupq_n_f32(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    vst1q_f32(y + i, vfmaq_f32(vld1q_f32(y + i), av, vld1q_f32(x + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void cmac_neon(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t av = vld1q_f64(a + 2 * i);
    const float64x2_t bv = vld1q_f64(b + 2 * i);
    const double ar = vgetq_lane_f64(av, 0), ai = vgetq_lane_f64(av, 1);
    const double br = vgetq_lane_f64(bv, 0), bi = vgetq_lane_f64(bv, 1);
    const float64x2_t prod = {ar * br - ai * bi, ar * bi + ai * br};
    vst1q_f64(y + 2 * i, vaddq_f64(vld1q_f64(y + 2 * i), prod));
  }
}

}  // namespace

const KernelTable& neon_table_unchecked() {
  static const KernelTable table{Backend::kNeon, "neon", dot_neon,
                                 gemv_acc_neon, axpy_neon, cmac_neon};
  return table;
}

}  // namespace dpdfnet::kernels
