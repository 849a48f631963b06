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

#include "earsim/spectrogram.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "earsim/error.h"

namespace earsim {

LoudnessParams LoudnessParams::Default(size_t n_bins) {
  LoudnessParams p;
  p.multipliers.assign(n_bins, 1.0);
  return p;
}

double LoudnessParams::FloorLoudness(size_t bin) const {
  return multipliers.at(bin) * 10.0 * std::log10(noise_floor_bias);
}

void LoudnessParams::Validate(size_t n_bins) const {
  if (!(noise_floor_bias > 0)) {
    throw Error(ErrorCode::kInvalidInput, "noise floor bias must be positive");
  }
  if (multipliers.size() != n_bins) {
    throw Error(ErrorCode::kInvalidInput,
                "need one loudness multiplier per bin");
  }
  for (double m : multipliers) {
    if (!(m > 0)) {
      throw Error(ErrorCode::kInvalidInput,
                  "loudness multipliers must be positive");
    }
  }
}

double PerceptualSpectrogram::Max() const {
  double best = -std::numeric_limits<double>::infinity();
  for (double v : frames.data()) best = std::max(best, v);
  return best;
}

size_t FrameCount(size_t n_samples, double sample_rate, double frame_rate) {
  return static_cast<size_t>(
      std::floor(static_cast<double>(n_samples) * frame_rate / sample_rate));
}

size_t FrameStart(size_t k, double sample_rate, double frame_rate) {
  return static_cast<size_t>(
      std::floor(static_cast<double>(k) * sample_rate / frame_rate));
}

namespace {

void CheckFrameRate(double frame_rate, double sample_rate) {
  if (!(frame_rate > 0) || frame_rate > sample_rate) {
    throw Error(ErrorCode::kInvalidRate,
                "frame rate must lie in (0, sample_rate]");
  }
}

// Accumulates per-sample energy rows into frame means.
class FrameAccumulator {
 public:
  FrameAccumulator(size_t n_bins, double sample_rate, double frame_rate,
                   size_t total_samples)
      : sample_rate_(sample_rate),
        frame_rate_(frame_rate),
        total_frames_(FrameCount(total_samples, sample_rate, frame_rate)),
        sums_(n_bins, 0.0),
        frame_end_(FrameStart(1, sample_rate, frame_rate)) {}

  size_t total_frames() const { return total_frames_; }
  bool done() const { return frame_ >= total_frames_; }

  // Adds one sample's energies. Returns true when a frame just completed,
  // with its mean in `mean`.
  bool Add(std::span<const double> row, std::vector<double>& mean) {
    for (size_t b = 0; b < sums_.size(); ++b) sums_[b] += row[b];
    ++sample_;
    if (sample_ < frame_end_) return false;
    const double count = static_cast<double>(frame_end_ - frame_start_);
    mean.resize(sums_.size());
    for (size_t b = 0; b < sums_.size(); ++b) {
      mean[b] = sums_[b] / count;
      sums_[b] = 0.0;
    }
    ++frame_;
    frame_start_ = frame_end_;
    frame_end_ = FrameStart(frame_ + 1, sample_rate_, frame_rate_);
    return true;
  }

 private:
  double sample_rate_;
  double frame_rate_;
  size_t total_frames_;
  std::vector<double> sums_;
  size_t sample_ = 0;
  size_t frame_ = 0;
  size_t frame_start_ = 0;
  size_t frame_end_;
};

std::vector<double> FalloffTable(size_t n, double strength) {
  std::vector<double> table(2 * n - 1);
  for (size_t i = 0; i < table.size(); ++i) {
    const double d = std::abs(static_cast<double>(i) - static_cast<double>(n - 1));
    table[i] = SigmoidFalloff(d, strength);
  }
  return table;
}

}  // namespace

Matrix<double> SubsampleToFrames(const ChannelEnergies& energies,
                                 double frame_rate) {
  const double rate = energies.sample_rate;
  CheckFrameRate(frame_rate, rate);
  const Matrix<double>& e = energies.energies;
  FrameAccumulator acc(e.cols(), rate, frame_rate, e.rows());
  Matrix<double> out(0, e.cols());
  std::vector<double> mean;
  for (size_t t = 0; t < e.rows() && !acc.done(); ++t) {
    if (acc.Add(e.row(t), mean)) out.AppendRow(mean);
  }
  return out;
}

double SigmoidFalloff(double distance, double strength) {
  if (distance == 0.0) return 1.0;
  return 2.0 / (1.0 + std::exp(strength * distance));
}

std::vector<double> SpreadEnergy(std::span<const double> frame,
                                 double spread_strength,
                                 const Kernels& kernels) {
  std::vector<double> out(frame.size());
  if (frame.empty()) return out;
  const std::vector<double> table = FalloffTable(frame.size(), spread_strength);
  kernels.spread_max(frame.data(), table.data(), out.data(), frame.size());
  return out;
}

std::vector<double> LoudnessDb(std::span<const double> frame,
                               const LoudnessParams& params) {
  std::vector<double> out(frame.size());
  for (size_t i = 0; i < frame.size(); ++i) {
    out[i] = params.multipliers[i] * 10.0 *
             std::log10(frame[i] + params.noise_floor_bias);
  }
  return out;
}

PerceptualSpectrogram ComputeSpectrogram(const AudioBuffer& audio,
                                         const SpectrogramConfig& config,
                                         const Kernels& kernels) {
  if (audio.sample_rate() != kPipelineSampleRate) {
    throw Error(ErrorCode::kWrongRate,
                "spectrogram needs 48000 Hz input, got " +
                    std::to_string(audio.sample_rate()));
  }
  if (audio.num_channels() != 1) {
    throw Error(ErrorCode::kInvalidInput, "spectrogram needs one channel");
  }
  const size_t n_bins = config.filterbank.n_bins;
  config.loudness.Validate(n_bins);
  CheckFrameRate(config.frame_rate, kPipelineSampleRate);

  const std::span<const float> samples = audio.channel(0);
  std::vector<double> resonance;
  if (config.use_resonator) {
    resonance = ResonatorProcess(samples, config.resonator, kernels);
  }
  const size_t blend_bins = std::min(config.resonator_bins, n_bins);

  Filterbank bank(config.filterbank, kernels);
  FrameAccumulator acc(n_bins, kPipelineSampleRate, config.frame_rate,
                       samples.size());
  const std::vector<double> falloff =
      FalloffTable(n_bins, config.spread_strength);

  PerceptualSpectrogram out;
  out.frame_rate = config.frame_rate;
  out.frames.Resize(0, n_bins);

  constexpr size_t kBlock = 4096;
  Matrix<double> block;
  std::vector<double> mean;
  std::vector<double> spread(n_bins);
  for (size_t start = 0; start < samples.size() && !acc.done();
       start += kBlock) {
    const size_t len = std::min(kBlock, samples.size() - start);
    bank.Process(samples.subspan(start, len), block);
    for (size_t t = 0; t < len && !acc.done(); ++t) {
      std::span<double> row = block.row(t);
      if (config.use_resonator) {
        const double extra = config.resonator_weight * resonance[start + t];
        for (size_t b = 0; b < blend_bins; ++b) row[b] += extra;
      }
      if (!acc.Add(row, mean)) continue;
      kernels.spread_max(mean.data(), falloff.data(), spread.data(), n_bins);
      out.frames.AppendRow(LoudnessDb(spread, config.loudness));
    }
  }
  return out;
}

}  // namespace earsim
