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

#include "kernels/scalar.h"

#include <algorithm>
#include <cstddef>
#include <span>

#include "earsim/kernels.h"

namespace earsim {

void GammatoneState::Reset(size_t n_bins, int order) {
  const size_t n = n_bins * static_cast<size_t>(order);
  re.assign(n, 0.0);
  im.assign(n, 0.0);
  integrator.assign(n_bins, 0.0);
}

namespace scalar {

void GammatoneBins(const GammatoneCoeffs& c, GammatoneState& state,
                   std::span<const float> in, double* out, size_t out_stride,
                   size_t bin_begin, size_t bin_end) {
  const size_t n_bins = c.n_bins;
  const int order = c.order;
  for (size_t b = bin_begin; b < bin_end; ++b) {
    const double pr = c.pole_re[b];
    const double pi = c.pole_im[b];
    const double g = c.gain[b];
    const double decay = c.decay[b];
    const double rest = 1.0 - decay;
    double yr[8];
    double yi[8];
    for (int s = 0; s < order; ++s) {
      yr[s] = state.re[s * n_bins + b];
      yi[s] = state.im[s * n_bins + b];
    }
    double acc = state.integrator[b];
    for (size_t t = 0; t < in.size(); ++t) {
      double xr = static_cast<double>(in[t]);
      double xi = 0.0;
      for (int s = 0; s < order; ++s) {
        const double nr = (pr * yr[s] - pi * yi[s]) + g * xr;
        const double ni = (pr * yi[s] + pi * yr[s]) + g * xi;
        yr[s] = nr;
        yi[s] = ni;
        xr = nr;
        xi = ni;
      }
      const double energy = xr * xr + xi * xi;
      acc = decay * acc + rest * energy;
      out[t * out_stride + b] = acc;
    }
    for (int s = 0; s < order; ++s) {
      state.re[s * n_bins + b] = yr[s];
      state.im[s * n_bins + b] = yi[s];
    }
    state.integrator[b] = acc;
  }
}

namespace {

void Gammatone(const GammatoneCoeffs& c, GammatoneState& state,
               std::span<const float> in, double* out, size_t out_stride) {
  GammatoneBins(c, state, in, out, out_stride, 0, c.n_bins);
}

}  // namespace

double SquaredDistance(const double* a, const double* b, size_t n) {
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double FirDot(const double* taps, const float* samples, size_t n) {
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += taps[i] * samples[i];
  return sum;
}

void SpreadMax(const double* in, const double* falloff, double* out,
               size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const double* k = falloff + (n - 1) + i;
    double best = 0.0;
    for (size_t j = 0; j < n; ++j) best = std::max(best, in[j] * k[-static_cast<std::ptrdiff_t>(j)]);
    out[i] = best;
  }
}

}  // namespace scalar

const Kernels& ScalarKernels() {
  static const Kernels kTable{
      .name = "scalar",
      .gammatone = scalar::Gammatone,
      .squared_distance = scalar::SquaredDistance,
      .fir_dot = scalar::FirDot,
      .spread_max = scalar::SpreadMax,
  };
  return kTable;
}

}  // namespace earsim
