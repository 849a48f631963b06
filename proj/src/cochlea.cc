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

#include "earsim/cochlea.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#if defined(__x86_64__) || defined(_M_X64)
#include <xmmintrin.h>
#endif

#include "earsim/error.h"

namespace earsim {

namespace {

constexpr double kErbScale = 21.4;
constexpr double kErbSlope = 0.00437;

// Flushes subnormals to zero for the scope of a call.
class ScopedFlushDenormals {
 public:
  ScopedFlushDenormals() {
#if defined(__x86_64__) || defined(_M_X64)
    saved_ = _mm_getcsr();
    _mm_setcsr(saved_ | 0x8040);  // FTZ | DAZ
#endif
  }
  ~ScopedFlushDenormals() {
#if defined(__x86_64__) || defined(_M_X64)
    _mm_setcsr(saved_);
#endif
  }
  ScopedFlushDenormals(const ScopedFlushDenormals&) = delete;
  ScopedFlushDenormals& operator=(const ScopedFlushDenormals&) = delete;

 private:
  unsigned saved_ = 0;
};

}  // namespace

double HzToErbNumber(double hz) {
  return kErbScale * std::log10(1.0 + kErbSlope * hz);
}

double ErbNumberToHz(double erb_number) {
  return (std::pow(10.0, erb_number / kErbScale) - 1.0) / kErbSlope;
}

std::vector<double> ErbCenterFrequencies(size_t n_bins, double f_min,
                                         double f_max) {
  if (n_bins < 2 || !(f_min > 0) || !(f_min < f_max)) {
    throw Error(ErrorCode::kInvalidRange,
                "need n_bins >= 2 and 0 < f_min < f_max");
  }
  const double lo = HzToErbNumber(f_min);
  const double hi = HzToErbNumber(f_max);
  const double step = (hi - lo) / static_cast<double>(n_bins - 1);
  std::vector<double> centers(n_bins);
  for (size_t i = 0; i < n_bins; ++i) {
    centers[i] = ErbNumberToHz(lo + step * static_cast<double>(i));
  }
  centers.front() = f_min;
  centers.back() = f_max;
  return centers;
}

std::vector<double> AdaptiveBandwidths(std::span<const double> centers) {
  const size_t n = centers.size();
  if (n < 2) {
    throw Error(ErrorCode::kInvalidInput, "need at least two centers");
  }
  for (size_t i = 1; i < n; ++i) {
    if (!(centers[i] > centers[i - 1])) {
      throw Error(ErrorCode::kInvalidInput,
                  "centers must be strictly increasing");
    }
  }
  std::vector<double> bw(n);
  bw.front() = centers[1] - centers[0];
  bw.back() = centers[n - 1] - centers[n - 2];
  for (size_t i = 1; i + 1 < n; ++i) {
    bw[i] = (centers[i + 1] - centers[i - 1]) / 2.0;
  }
  return bw;
}

double IntegrationCoefficient(double bw_hz) {
  if (!(bw_hz >= 0)) {
    throw Error(ErrorCode::kInvalidInput, "bandwidth must be non-negative");
  }
  return std::pow(0.9996, bw_hz * 0.7323);
}

FilterbankConfig FilterbankConfig::Create(size_t n_bins, double f_min,
                                          double f_max, int order,
                                          double min_bandwidth_hz) {
  FilterbankConfig config;
  config.n_bins = n_bins;
  config.order = order;
  config.f_min = f_min;
  config.f_max = f_max;
  config.centers = ErbCenterFrequencies(n_bins, f_min, f_max);
  config.bandwidths = AdaptiveBandwidths(config.centers);
  for (double& bw : config.bandwidths) bw = std::max(bw, min_bandwidth_hz);
  config.coefficients.reserve(n_bins);
  for (double bw : config.bandwidths) {
    config.coefficients.push_back(IntegrationCoefficient(bw));
  }
  config.Validate();
  return config;
}

void FilterbankConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidInput, "filterbank config: " + what);
  };
  if (order < 1 || order > 8) fail("order must be in [1, 8]");
  if (centers.size() != n_bins || bandwidths.size() != n_bins ||
      coefficients.size() != n_bins) {
    fail("per-bin arrays must have n_bins entries");
  }
  for (size_t i = 0; i < n_bins; ++i) {
    if (i > 0 && !(centers[i] > centers[i - 1])) {
      fail("centers must be strictly increasing");
    }
    if (centers[i] < f_min || centers[i] > f_max) {
      fail("center outside [f_min, f_max]");
    }
    if (!(bandwidths[i] > 0)) fail("bandwidths must be positive");
    if (!(coefficients[i] > 0 && coefficients[i] <= 1)) {
      fail("coefficients must lie in (0, 1]");
    }
  }
}

namespace {

GammatoneCoeffs DesignCoefficients(const FilterbankConfig& config,
                                   double sample_rate) {
  GammatoneCoeffs c;
  c.n_bins = config.n_bins;
  c.order = config.order;
  // A cascade of N identical one-pole sections is narrower than one section
  // by sqrt(2^(1/N) - 1); widen each section so the cascade's -3 dB
  // bandwidth equals the configured bandwidth.
  const double narrowing = std::sqrt(std::exp2(1.0 / config.order) - 1.0);
  for (size_t b = 0; b < config.n_bins; ++b) {
    const double section_bw = config.bandwidths[b] / narrowing;
    const double radius =
        std::exp(-std::numbers::pi * section_bw / sample_rate);
    const double omega =
        2.0 * std::numbers::pi * config.centers[b] / sample_rate;
    c.pole_re.push_back(radius * std::cos(omega));
    c.pole_im.push_back(radius * std::sin(omega));
    c.gain.push_back(1.0 - radius);
    c.decay.push_back(config.coefficients[b]);
  }
  return c;
}

}  // namespace

Filterbank::Filterbank(const FilterbankConfig& config, const Kernels& kernels)
    : config_(config), kernels_(&kernels) {
  config_.Validate();
  coeffs_ = DesignCoefficients(config_, kPipelineSampleRate);
  Reset();
}

void Filterbank::Reset() { state_.Reset(coeffs_.n_bins, coeffs_.order); }

void Filterbank::Process(std::span<const float> samples,
                         Matrix<double>& energies) {
  energies.Resize(samples.size(), coeffs_.n_bins);
  if (samples.empty()) return;
  ScopedFlushDenormals flush;
  kernels_->gammatone(coeffs_, state_, samples, energies.data().data(),
                      coeffs_.n_bins);
}

ChannelEnergies GammatoneAnalyze(const AudioBuffer& audio,
                                 const FilterbankConfig& config,
                                 const Kernels& kernels) {
  if (audio.sample_rate() != kPipelineSampleRate) {
    throw Error(ErrorCode::kWrongRate,
                "filterbank needs 48000 Hz input, got " +
                    std::to_string(audio.sample_rate()));
  }
  if (audio.num_channels() != 1) {
    throw Error(ErrorCode::kInvalidInput, "filterbank needs one channel");
  }
  Filterbank bank(config, kernels);
  ChannelEnergies out;
  bank.Process(audio.channel(0), out.energies);
  return out;
}

namespace {

constexpr double kFeedCutoffHz = 1500.0;
constexpr double kFeedKaiserBeta = 6.0;

std::array<double, kResonatorTaps> FeedTaps(double dc_gain) {
  std::array<double, kResonatorTaps> taps{};
  const double fc = kFeedCutoffHz / kPipelineSampleRate;
  const double center = (kResonatorTaps - 1) / 2.0;
  const double norm = std::cyl_bessel_i(0.0, kFeedKaiserBeta);
  double sum = 0.0;
  for (size_t k = 0; k < kResonatorTaps; ++k) {
    const double t = static_cast<double>(k) - center;
    const double x = 2.0 * std::numbers::pi * fc * t;
    const double sinc = 2.0 * fc * std::sin(x) / x;
    const double r = t / (center + 1.0);
    const double window =
        std::cyl_bessel_i(0.0, kFeedKaiserBeta * std::sqrt(1.0 - r * r)) /
        norm;
    taps[k] = sinc * window;
    sum += taps[k];
  }
  for (double& t : taps) t *= dc_gain / sum;
  return taps;
}

}  // namespace

ResonatorParams ResonatorParams::ForResonance(double resonance_hz, double q,
                                              double nonlinearity_ratio) {
  const double omega = 2.0 * std::numbers::pi * resonance_hz;
  ResonatorParams p;
  p.stiffness = omega * omega;
  p.damping = omega / q;
  p.nonlinearity = nonlinearity_ratio * p.stiffness;
  p.taps = FeedTaps(p.stiffness);
  return p;
}

ResonatorParams ResonatorParams::Default() {
  return ForResonance(1000.0, 2.0, 0.1);
}

double ResonatorParams::ResonanceHz() const {
  return std::sqrt(stiffness) / (2.0 * std::numbers::pi);
}

void ResonatorParams::Validate() const {
  if (!(stiffness > 0) || !(damping > 0) || !(nonlinearity >= 0)) {
    throw Error(ErrorCode::kInvalidInput,
                "resonator needs stiffness > 0, damping > 0, "
                "nonlinearity >= 0");
  }
}

std::vector<double> ResonatorProcess(const AudioBuffer& audio,
                                     const ResonatorParams& params) {
  if (audio.sample_rate() != kPipelineSampleRate) {
    throw Error(ErrorCode::kWrongRate,
                "resonator needs 48000 Hz input, got " +
                    std::to_string(audio.sample_rate()));
  }
  if (audio.num_channels() != 1) {
    throw Error(ErrorCode::kInvalidInput, "resonator needs one channel");
  }
  return ResonatorProcess(audio.channel(0), params);
}

std::vector<double> ResonatorDisplacement(std::span<const float> samples,
                                          const ResonatorParams& params,
                                          const Kernels& kernels) {
  params.Validate();
  constexpr size_t kHistory = kResonatorTaps - 1;
  std::vector<float> padded(kHistory + samples.size(), 0.0f);
  std::copy(samples.begin(), samples.end(), padded.begin() + kHistory);
  std::array<double, kResonatorTaps> reversed;
  std::reverse_copy(params.taps.begin(), params.taps.end(), reversed.begin());

  const double h = 1.0 / kPipelineSampleRate;
  double x = 0.0;
  double v = 0.0;
  std::vector<double> out(samples.size());
  for (size_t n = 0; n < samples.size(); ++n) {
    const double drive =
        kernels.fir_dot(reversed.data(), padded.data() + n, kResonatorTaps);
    const double accel = drive - params.damping * v - params.stiffness * x -
                         params.nonlinearity * x * x * x;
    x += h * v;
    v += h * accel;
    if (!(std::abs(x) <= 1e6)) {
      throw Error(ErrorCode::kUnstable,
                  "resonator displacement diverged at sample " +
                      std::to_string(n));
    }
    out[n] = x;
  }
  return out;
}

std::vector<double> ResonatorProcess(std::span<const float> samples,
                                     const ResonatorParams& params,
                                     const Kernels& kernels) {
  std::vector<double> out = ResonatorDisplacement(samples, params, kernels);
  for (double& x : out) x *= x;
  return out;
}

}  // namespace earsim
