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

#ifndef EARSIM_SRC_KERNELS_SCALAR_H_
#define EARSIM_SRC_KERNELS_SCALAR_H_

#include <cstddef>
#include <span>

#include "earsim/kernels.h"

namespace earsim::scalar {

// Reference recurrence over bins [bin_begin, bin_end). SIMD variants call
// this for the bins left over after their full vectors.
void GammatoneBins(const GammatoneCoeffs& c, GammatoneState& state,
                   std::span<const float> in, double* out, size_t out_stride,
                   size_t bin_begin, size_t bin_end);

double SquaredDistance(const double* a, const double* b, size_t n);
double FirDot(const double* taps, const float* samples, size_t n);
void SpreadMax(const double* in, const double* falloff, double* out,
               size_t n);

}  // namespace earsim::scalar

#endif  // EARSIM_SRC_KERNELS_SCALAR_H_
