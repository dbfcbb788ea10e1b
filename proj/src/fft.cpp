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

#include "dpdfnet/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace dpdfnet {
namespace {
// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
  }
};

RealFft::RealFft(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n == 0) throw std::invalid_argument("RealFft: size must be positive");
  const int ni = static_cast<int>(n);
  std::lock_guard lock(planner_mutex());
  plans_->real = fftw_alloc_real(n);
  plans_->spec = fftw_alloc_complex(n / 2 + 1);
  plans_->fwd = fftw_plan_dft_r2c_1d(ni, plans_->real, plans_->spec,
                                     FFTW_ESTIMATE);
  // c2r destroys its input, which is our own scratch buffer.
  plans_->inv = fftw_plan_dft_c2r_1d(ni, plans_->spec, plans_->real,
                                     FFTW_ESTIMATE);
  if (!plans_->fwd || !plans_->inv) {
    throw std::runtime_error("RealFft: FFTW planning failed");
  }
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in,
                      std::span<std::complex<double>> out) {
  if (in.size() != n_ || out.size() != bins()) {
    throw std::invalid_argument("RealFft::forward: size mismatch");
  }
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->fwd);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = {plans_->spec[k][0], plans_->spec[k][1]};
  }
}

void RealFft::inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) {
  if (in.size() != bins() || out.size() != n_) {
    throw std::invalid_argument("RealFft::inverse: size mismatch");
  }
  for (std::size_t k = 0; k < in.size(); ++k) {
    plans_->spec[k][0] = in[k].real();
    plans_->spec[k][1] = in[k].imag();
  }
  fftw_execute(plans_->inv);
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = plans_->real[i] * scale;
}

}  // namespace dpdfnet
