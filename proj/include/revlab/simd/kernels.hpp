// Copyright 2026 The revlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Data-parallel inner loops shared by the model, the optimizer and the text
// statistics. Every kernel has a scalar reference implementation; vector
// variants (AVX2+FMA on x86-64, NEON on aarch64) are chosen at runtime.
//
// Elementwise kernels (axpy, adam_update) are bitwise identical across
// variants. Reductions (dot) differ only in summation order.
//
// Set REVLAB_SIMD=scalar in the environment to force the reference path.

#ifndef REVLAB_SIMD_KERNELS_HPP_
#define REVLAB_SIMD_KERNELS_HPP_

#include <cstddef>
#include <span>

namespace revlab::simd {

struct AdamCoefficients {
  double beta1;
  double beta2;
  double learning_rate;
  double epsilon;
  // 1 - beta^t for the current step t.
  double bias_correction1;
  double bias_correction2;
};

struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // In-place Adam moment and parameter update over n contiguous entries.
  void (*adam_update)(double* param, double* m, double* v, const double* grad,
                      std::size_t n, const AdamCoefficients& c);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// The table selected for this process (first call decides).
const KernelTable& active_kernels();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace revlab::simd

#endif  // REVLAB_SIMD_KERNELS_HPP_
