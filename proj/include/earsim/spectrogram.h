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

#ifndef EARSIM_SPECTROGRAM_H_
#define EARSIM_SPECTROGRAM_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "earsim/audio.h"
#include "earsim/cochlea.h"
#include "earsim/kernels.h"
#include "earsim/matrix.h"

namespace earsim {

inline constexpr double kFrameRate = 85.0;

struct LoudnessParams {
  double noise_floor_bias = 1e-9;
  std::vector<double> multipliers;

  static LoudnessParams Default(size_t n_bins = 128);

  // Loudness of zero energy in bin `bin`.
  double FloorLoudness(size_t bin) const;

  void Validate(size_t n_bins) const;
};

struct SpectrogramConfig {
  FilterbankConfig filterbank = FilterbankConfig::Create();
  ResonatorParams resonator = ResonatorParams::Default();
  bool use_resonator = true;
  // Squared resonator displacement is added to the lowest `resonator_bins`
  // bins with this weight.
  double resonator_weight = 0.1;
  size_t resonator_bins = 8;
  double spread_strength = 1.2;
  LoudnessParams loudness = LoudnessParams::Default();
  double frame_rate = kFrameRate;
};

// Rows are frames at `frame_rate`, columns are filterbank bins.
struct PerceptualSpectrogram {
  Matrix<double> frames;
  double frame_rate = kFrameRate;

  size_t num_frames() const { return frames.rows(); }
  size_t num_bins() const { return frames.cols(); }
  double Max() const;

  bool operator==(const PerceptualSpectrogram&) const = default;
};

// Number of whole frames in `n_samples`: floor(n_samples * frame_rate /
// sample_rate).
size_t FrameCount(size_t n_samples, double sample_rate, double frame_rate);

// First sample of frame `k`: floor(k * sample_rate / frame_rate).
size_t FrameStart(size_t k, double sample_rate, double frame_rate);

// Mean energy over non-overlapping windows. Throws kInvalidRate unless
// 0 < frame_rate <= sample_rate.
Matrix<double> SubsampleToFrames(const ChannelEnergies& energies,
                                 double frame_rate);

// Sigmoid falloff 2 / (1 + exp(strength * d)), exactly 1 at d = 0.
double SigmoidFalloff(double distance, double strength);

// out[i] = max_j in[j] * SigmoidFalloff(|i - j|, strength).
std::vector<double> SpreadEnergy(std::span<const double> frame,
                                 double spread_strength,
                                 const Kernels& kernels = ActiveKernels());

// out[i] = multipliers[i] * 10 * log10(frame[i] + noise_floor_bias).
std::vector<double> LoudnessDb(std::span<const double> frame,
                               const LoudnessParams& params);

// Filterbank (+ resonator blend) -> framing -> spreading -> loudness, for
// one 48 kHz channel. Streams the filterbank so per-sample energies are
// never held for the whole signal.
PerceptualSpectrogram ComputeSpectrogram(
    const AudioBuffer& audio, const SpectrogramConfig& config = {},
    const Kernels& kernels = ActiveKernels());

// Binary layout: "ESPG", uint32 frames, uint32 bins, float32 frame rate
// (little-endian), then row-major float32 values.
void WriteSpectrogramBinary(const std::filesystem::path& path,
                            const PerceptualSpectrogram& spectrogram);
PerceptualSpectrogram ReadSpectrogramBinary(const std::filesystem::path& path);

// Header `frame,time_s,bin0,...`, one row per frame.
void WriteSpectrogramCsv(std::ostream& out,
                         const PerceptualSpectrogram& spectrogram);

}  // namespace earsim

#endif  // EARSIM_SPECTROGRAM_H_
