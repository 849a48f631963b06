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

#ifndef EARSIM_COCHLEA_H_
#define EARSIM_COCHLEA_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "earsim/audio.h"
#include "earsim/kernels.h"
#include "earsim/matrix.h"

namespace earsim {

// Glasberg & Moore (1990) ERB-number scale: 21.4 * log10(1 + 0.00437 f).
double HzToErbNumber(double hz);
double ErbNumberToHz(double erb_number);

// `n_bins` center frequencies equally spaced on the ERB-number scale, with
// the first at f_min and the last at f_max. Throws kInvalidRange.
std::vector<double> ErbCenterFrequencies(size_t n_bins, double f_min,
                                         double f_max);

// Bin i gets half the span between its neighbors' centers; edge bins use the
// single gap next to them. Throws kInvalidInput unless centers are strictly
// increasing with at least two entries.
std::vector<double> AdaptiveBandwidths(std::span<const double> centers);

// 0.9996^(bw_hz * 0.7323). Throws kInvalidInput for negative bandwidth.
double IntegrationCoefficient(double bw_hz);

struct FilterbankConfig {
  size_t n_bins = 0;
  int order = 3;
  double f_min = 0;
  double f_max = 0;
  std::vector<double> centers;
  std::vector<double> bandwidths;
  std::vector<double> coefficients;

  // ERB grid, adaptive bandwidths floored at `min_bandwidth_hz`, and the
  // matching integration coefficients.
  static FilterbankConfig Create(size_t n_bins = 128, double f_min = 20.0,
                                 double f_max = 20000.0, int order = 3,
                                 double min_bandwidth_hz = 16.0);

  // Throws kInvalidInput when any invariant is violated.
  void Validate() const;
};

// Per-sample linear energies, one column per bin.
struct ChannelEnergies {
  Matrix<double> energies;
  int sample_rate = kPipelineSampleRate;
};

// Streaming complex gammatone filterbank. Each bin is a cascade of `order`
// identical complex one-pole sections followed by squared magnitude and a
// one-pole energy integrator. State persists across Process() calls.
class Filterbank {
 public:
  explicit Filterbank(const FilterbankConfig& config,
                      const Kernels& kernels = ActiveKernels());

  size_t n_bins() const { return coeffs_.n_bins; }
  const FilterbankConfig& config() const { return config_; }
  const GammatoneCoeffs& coefficients() const { return coeffs_; }

  // Resizes `energies` to samples.size() x n_bins and fills it.
  void Process(std::span<const float> samples, Matrix<double>& energies);

  void Reset();

 private:
  FilterbankConfig config_;
  GammatoneCoeffs coeffs_;
  GammatoneState state_;
  const Kernels* kernels_;
};

// One-shot analysis of a single 48 kHz channel. Throws kWrongRate or
// kInvalidInput (multi-channel input).
ChannelEnergies GammatoneAnalyze(const AudioBuffer& audio,
                                 const FilterbankConfig& config,
                                 const Kernels& kernels = ActiveKernels());

inline constexpr size_t kResonatorTaps = 32;

// Duffing-style mass-spring model driven through a 32-tap FIR:
//   a = drive - damping * v - stiffness * x - nonlinearity * x^3
// integrated with explicit Euler at the audio rate.
struct ResonatorParams {
  std::array<double, kResonatorTaps> taps{};
  double stiffness = 0;
  double damping = 0;
  double nonlinearity = 0;

  // 1 kHz linear resonance, Q = 2, feed filter a 1.5 kHz Kaiser-windowed
  // sinc lowpass whose DC gain equals `stiffness` (unit static displacement).
  static ResonatorParams Default();

  // Same feed filter shape with arbitrary resonance and Q.
  static ResonatorParams ForResonance(double resonance_hz, double q,
                                      double nonlinearity_ratio);

  double ResonanceHz() const;

  // Throws kInvalidInput when stiffness or damping is not positive.
  void Validate() const;
};

// Signed displacement per input sample. Throws kUnstable once |x| exceeds
// 1e6.
std::vector<double> ResonatorDisplacement(
    std::span<const float> samples, const ResonatorParams& params,
    const Kernels& kernels = ActiveKernels());

// Squared displacement per input sample. Throws kWrongRate, or kUnstable
// once |x| exceeds 1e6.
std::vector<double> ResonatorProcess(const AudioBuffer& audio,
                                     const ResonatorParams& params);
std::vector<double> ResonatorProcess(std::span<const float> samples,
                                     const ResonatorParams& params,
                                     const Kernels& kernels = ActiveKernels());

}  // namespace earsim

#endif  // EARSIM_COCHLEA_H_
