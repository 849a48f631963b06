// Copyright 2026 The Earsim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EARSIM_KERNELS_H_
#define EARSIM_KERNELS_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace earsim {

// Structure-of-arrays coefficients for the gammatone cascade, one entry per
// bin. Every bin runs `order` identical one-pole complex sections
//   y <- pole * y + gain * input
// followed by e = |y|^2 and the integrator s <- decay * s + (1 - decay) * e.
struct GammatoneCoeffs {
  size_t n_bins = 0;
  int order = 3;
  std::vector<double> pole_re;
  std::vector<double> pole_im;
  std::vector<double> gain;
  std::vector<double> decay;
};

struct GammatoneState {
  // [stage * n_bins + bin]
  std::vector<double> re;
  std::vector<double> im;
  std::vector<double> integrator;

  void Reset(size_t n_bins, int order);
};

// Table of the data-parallel inner loops. The scalar table is the reference;
// SIMD tables must reproduce it (bit-exactly for the gammatone recurrence,
// to rounding for reductions).
struct Kernels {
  std::string_view name;

  // Writes in.size() rows of n_bins energies, row stride `out_stride`.
  void (*gammatone)(const GammatoneCoeffs& coeffs, GammatoneState& state,
                    std::span<const float> in, double* out,
                    size_t out_stride);

  double (*squared_distance)(const double* a, const double* b, size_t n);

  // sum_k taps[k] * samples[k]
  double (*fir_dot)(const double* taps, const float* samples, size_t n);

  // out[i] = max_j in[j] * falloff[n - 1 + i - j], falloff has 2n - 1 entries.
  void (*spread_max)(const double* in, const double* falloff, double* out,
                     size_t n);
};

const Kernels& ScalarKernels();

// nullptr when the build or the CPU lacks AVX2.
const Kernels* Avx2Kernels();

// Every table usable on this machine, scalar first.
std::vector<const Kernels*> AvailableKernels();

// Best available table, chosen once. EARSIM_KERNELS=scalar|avx2 overrides.
const Kernels& ActiveKernels();

}  // namespace earsim

#endif  // EARSIM_KERNELS_H_
