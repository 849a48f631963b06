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

#ifndef EARSIM_COMPARE_H_
#define EARSIM_COMPARE_H_

#include <cstddef>
#include <utility>
#include <vector>

#include "earsim/audio.h"
#include "earsim/kernels.h"
#include "earsim/spectrogram.h"

namespace earsim {

struct ComparisonConfig {
  // Fraction of the gap between the two spectrogram maxima that is removed.
  double normalization_fraction = 0.82;
  // Per-cell DTW cost is (Euclidean frame distance)^exponent.
  double dtw_cost_exponent = 0.5;
  size_t nsim_window_frames = 8;
  size_t nsim_window_bins = 8;
  // (0.01 * 90 dB)^2; 90 dB spans full-scale energy down to the default
  // noise floor.
  double nsim_c1 = 0.81;
  double nsim_c2 = 0.81;
  // Per-window scores are clamped to [0, 1] and raised to this power.
  double nsim_exponent = 1.5;
  // Logistic MOS mapping steepness and midpoint.
  double mos_steepness = 8.0;
  double mos_midpoint = 0.65;

  // Throws kInvalidInput naming the offending field.
  void Validate() const;
};

// (reference_frame, degraded_frame) pairs from (0, 0) to (n_ref-1, n_deg-1).
struct WarpPath {
  std::vector<std::pair<size_t, size_t>> pairs;

  size_t size() const { return pairs.size(); }
  bool operator==(const WarpPath&) const = default;
};

struct SimilarityResult {
  std::vector<double> per_channel_similarity;
  std::vector<double> per_channel_distance;
  double aggregate_distance = 0;
  double mos = 5;

  // 1 - aggregate_distance / sqrt(n_channels), in [0, 1]. This is the value
  // fed to the MOS mapping and used as the metric score in evaluation.
  double NormalizedSimilarity() const;
};

// Shifts ref down and deg up (or vice versa) by fraction * gap / 2 each,
// where gap = max(ref) - max(deg). Throws kBinMismatch.
std::pair<PerceptualSpectrogram, PerceptualSpectrogram> NormalizePair(
    const PerceptualSpectrogram& ref, const PerceptualSpectrogram& deg,
    double fraction);

// Minimum-cost monotone alignment with steps (1,0), (0,1), (1,1) and cell
// cost distance^exponent. Ties prefer the diagonal, then advancing the
// reference. Throws kEmptyInput, kBinMismatch, kInvalidInput (exponent).
WarpPath DtwAlign(const PerceptualSpectrogram& ref,
                  const PerceptualSpectrogram& deg, double exponent,
                  const Kernels& kernels = ActiveKernels());

// Sum over the path of distance^exponent.
double PathCost(const PerceptualSpectrogram& ref,
                const PerceptualSpectrogram& deg, const WarpPath& path,
                double exponent);

// Throws kInvalidPath unless `path` is a valid warp path for the shapes.
void ValidatePath(const WarpPath& path, size_t n_ref, size_t n_deg);

// Windowed structural similarity of the two spectrograms after re-indexing
// both along `path`. Result in [0, 1].
double Nsim(const PerceptualSpectrogram& ref, const PerceptualSpectrogram& deg,
            const WarpPath& path, const ComparisonConfig& config);

// Logistic map of [0, 1] onto [1, 5] with exact endpoints. Throws
// kOutOfRange.
double MapToMos(double similarity, double steepness = 8.0,
                double midpoint = 0.65);

// Full pipeline on every channel pair. Inputs at other rates are resampled
// to 48 kHz first. Throws kChannelMismatch, kTooShort and anything the
// stages raise.
SimilarityResult CompareChannels(const AudioBuffer& ref,
                                 const AudioBuffer& deg,
                                 const ComparisonConfig& config = {},
                                 const SpectrogramConfig& spectrogram = {},
                                 const Kernels& kernels = ActiveKernels());

// Same, on spectrograms already computed (one per channel).
SimilarityResult CompareSpectrograms(
    const std::vector<PerceptualSpectrogram>& ref,
    const std::vector<PerceptualSpectrogram>& deg,
    const ComparisonConfig& config = {},
    const Kernels& kernels = ActiveKernels());

}  // namespace earsim

#endif  // EARSIM_COMPARE_H_
