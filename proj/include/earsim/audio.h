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

#ifndef EARSIM_AUDIO_H_
#define EARSIM_AUDIO_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace earsim {

// Every analysis stage runs at this rate.
inline constexpr int kPipelineSampleRate = 48000;

// Multi-channel waveform. Channels have equal length, samples are finite and
// nominally in [-1, 1].
class AudioBuffer {
 public:
  AudioBuffer() = default;
  // Throws kInvalidRate for a non-positive rate and kInvalidInput for ragged
  // channels or non-finite samples.
  AudioBuffer(std::vector<std::vector<float>> channels, int sample_rate);

  static AudioBuffer Mono(std::vector<float> samples, int sample_rate);

  size_t num_channels() const { return channels_.size(); }
  size_t num_samples() const {
    return channels_.empty() ? 0 : channels_.front().size();
  }
  int sample_rate() const { return sample_rate_; }
  double duration_seconds() const {
    return sample_rate_ > 0 ? static_cast<double>(num_samples()) / sample_rate_
                            : 0.0;
  }

  std::span<const float> channel(size_t index) const {
    return channels_.at(index);
  }
  const std::vector<std::vector<float>>& channels() const { return channels_; }

  // Single-channel view of channel `index`, sharing the sample rate.
  AudioBuffer ExtractChannel(size_t index) const;

  bool operator==(const AudioBuffer&) const = default;

 private:
  std::vector<std::vector<float>> channels_;
  int sample_rate_ = kPipelineSampleRate;
};

enum class WavSampleFormat { kPcm16, kPcm24, kPcm32, kFloat32 };

// Decodes a RIFF/WAVE file. Integer formats are divided by 2^(bits-1).
// Errors: kFileNotFound, kUnsupportedFormat, kCorruptHeader, kInvalidInput
// (non-finite float samples).
AudioBuffer LoadWav(const std::filesystem::path& path);
AudioBuffer DecodeWav(std::span<const std::byte> bytes);

// Integer formats clip to the representable range.
void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio,
              WavSampleFormat format = WavSampleFormat::kFloat32);
std::vector<std::byte> EncodeWav(const AudioBuffer& audio,
                                 WavSampleFormat format);

// Band-limited rational resampler: polyphase windowed sinc, Kaiser window
// beta = 10, at least 64 taps per phase. Output length is
// round(n * target_rate / source_rate). Passing the source rate returns the
// input unchanged. Throws kInvalidRate for target_rate <= 0.
AudioBuffer Resample(const AudioBuffer& audio, int target_rate);

}  // namespace earsim

#endif  // EARSIM_AUDIO_H_
