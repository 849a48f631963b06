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

// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cstddef>
#include <span>

#include "earsim/kernels.h"
#include "kernels/scalar.h"

namespace earsim::avx2 {

namespace {

constexpr size_t kLanes = 4;

template <int kOrder>
void GammatoneGroup(const GammatoneCoeffs& c, GammatoneState& state,
                    std::span<const float> in, double* out, size_t out_stride,
                    size_t b) {
  const size_t n_bins = c.n_bins;
  const __m256d pr = _mm256_loadu_pd(&c.pole_re[b]);
  const __m256d pi = _mm256_loadu_pd(&c.pole_im[b]);
  const __m256d g = _mm256_loadu_pd(&c.gain[b]);
  const __m256d decay = _mm256_loadu_pd(&c.decay[b]);
  const __m256d rest = _mm256_sub_pd(_mm256_set1_pd(1.0), decay);
  __m256d yr[kOrder];
  __m256d yi[kOrder];
  for (int s = 0; s < kOrder; ++s) {
    yr[s] = _mm256_loadu_pd(&state.re[s * n_bins + b]);
    yi[s] = _mm256_loadu_pd(&state.im[s * n_bins + b]);
  }
  __m256d acc = _mm256_loadu_pd(&state.integrator[b]);
  const __m256d zero = _mm256_setzero_pd();
  for (size_t t = 0; t < in.size(); ++t) {
    __m256d xr = _mm256_set1_pd(static_cast<double>(in[t]));
    __m256d xi = zero;
    for (int s = 0; s < kOrder; ++s) {
      const __m256d nr = _mm256_add_pd(
          _mm256_sub_pd(_mm256_mul_pd(pr, yr[s]), _mm256_mul_pd(pi, yi[s])),
          _mm256_mul_pd(g, xr));
      const __m256d ni = _mm256_add_pd(
          _mm256_add_pd(_mm256_mul_pd(pr, yi[s]), _mm256_mul_pd(pi, yr[s])),
          _mm256_mul_pd(g, xi));
      yr[s] = nr;
      yi[s] = ni;
      xr = nr;
      xi = ni;
    }
    const __m256d energy =
        _mm256_add_pd(_mm256_mul_pd(xr, xr), _mm256_mul_pd(xi, xi));
    acc = _mm256_add_pd(_mm256_mul_pd(decay, acc), _mm256_mul_pd(rest, energy));
    _mm256_storeu_pd(out + t * out_stride + b, acc);
  }
  for (int s = 0; s < kOrder; ++s) {
    _mm256_storeu_pd(&state.re[s * n_bins + b], yr[s]);
    _mm256_storeu_pd(&state.im[s * n_bins + b], yi[s]);
  }
  _mm256_storeu_pd(&state.integrator[b], acc);
}

template <int kOrder>
void GammatoneVectorBins(const GammatoneCoeffs& c, GammatoneState& state,
                         std::span<const float> in, double* out,
                         size_t out_stride, size_t vector_end) {
  for (size_t b = 0; b < vector_end; b += kLanes) {
    GammatoneGroup<kOrder>(c, state, in, out, out_stride, b);
  }
}

void Gammatone(const GammatoneCoeffs& c, GammatoneState& state,
               std::span<const float> in, double* out, size_t out_stride) {
  size_t vector_end = c.n_bins - c.n_bins % kLanes;
  switch (c.order) {
    case 1:
      GammatoneVectorBins<1>(c, state, in, out, out_stride, vector_end);
      break;
    case 2:
      GammatoneVectorBins<2>(c, state, in, out, out_stride, vector_end);
      break;
    case 3:
      GammatoneVectorBins<3>(c, state, in, out, out_stride, vector_end);
      break;
    case 4:
      GammatoneVectorBins<4>(c, state, in, out, out_stride, vector_end);
      break;
    default:
      vector_end = 0;
      break;
  }
  scalar::GammatoneBins(c, state, in, out, out_stride, vector_end, c.n_bins);
}

double HorizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double SquaredDistance(const double* a, const double* b, size_t n) {
  __m256d sum0 = _mm256_setzero_pd();
  __m256d sum1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    const __m256d d0 =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + kLanes),
                                     _mm256_loadu_pd(b + i + kLanes));
    sum0 = _mm256_add_pd(sum0, _mm256_mul_pd(d0, d0));
    sum1 = _mm256_add_pd(sum1, _mm256_mul_pd(d1, d1));
  }
  double sum = HorizontalSum(_mm256_add_pd(sum0, sum1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double FirDot(const double* taps, const float* samples, size_t n) {
  __m256d sum = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d x = _mm256_cvtps_pd(_mm_loadu_ps(samples + i));
    sum = _mm256_add_pd(sum, _mm256_mul_pd(_mm256_loadu_pd(taps + i), x));
  }
  double total = HorizontalSum(sum);
  for (; i < n; ++i) total += taps[i] * samples[i];
  return total;
}

void SpreadMax(const double* in, const double* falloff, double* out,
               size_t n) {
  size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d best = _mm256_setzero_pd();
    const double* k = falloff + (n - 1) + i;
    for (size_t j = 0; j < n; ++j) {
      const __m256d v = _mm256_mul_pd(
          _mm256_set1_pd(in[j]),
          _mm256_loadu_pd(k - static_cast<std::ptrdiff_t>(j)));
      best = _mm256_max_pd(v, best);
    }
    _mm256_storeu_pd(out + i, best);
  }
  if (i < n) {
    // Tail bins via the reference loop on the full input.
    for (; i < n; ++i) {
      const double* k = falloff + (n - 1) + i;
      double best = 0.0;
      for (size_t j = 0; j < n; ++j) {
        const double v = in[j] * k[-static_cast<std::ptrdiff_t>(j)];
        best = v > best ? v : best;
      }
      out[i] = best;
    }
  }
}

}  // namespace

const Kernels& Table() {
  static const Kernels kTable{
      .name = "avx2",
      .gammatone = Gammatone,
      .squared_distance = SquaredDistance,
      .fir_dot = FirDot,
      .spread_max = SpreadMax,
  };
  return kTable;
}

}  // namespace earsim::avx2
