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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "earsim/audio.h"
#include "earsim/error.h"

namespace earsim {

namespace {

constexpr double kKaiserBeta = 10.0;
constexpr int kMinTapsPerPhase = 64;
// Passband edge as a fraction of the lower of the two Nyquist frequencies.
constexpr double kCutoffFraction = 0.9;

double Sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double Kaiser(double x, double half_width) {
  const double r = x / half_width;
  if (std::abs(r) >= 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) /
         std::cyl_bessel_i(0.0, kKaiserBeta);
}

// Taps for every output phase, laid out phase-major. For phase p the output
// instant sits p/up input samples after input index `base`, and tap k
// multiplies input[base - half + 1 + k].
struct PolyphaseTable {
  int64_t up = 1;
  int64_t down = 1;
  int taps = 0;
  int half = 0;
  std::vector<float> coeffs;
};

PolyphaseTable DesignTable(int64_t up, int64_t down) {
  PolyphaseTable t;
  t.up = up;
  t.down = down;
  const double rel = std::min(1.0, static_cast<double>(up) / down);
  const double cutoff = kCutoffFraction * rel;
  t.half = static_cast<int>(std::ceil(kMinTapsPerPhase / (2.0 * rel)));
  t.taps = 2 * t.half;
  t.coeffs.resize(static_cast<size_t>(up) * t.taps);
  for (int64_t p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / up;
    double sum = 0.0;
    std::vector<double> row(t.taps);
    for (int k = 0; k < t.taps; ++k) {
      const double offset = frac + (t.half - 1 - k);
      row[k] = cutoff * Sinc(cutoff * offset) * Kaiser(offset, t.half);
      sum += row[k];
    }
    // Unity DC gain per phase removes phase-dependent ripple.
    for (int k = 0; k < t.taps; ++k) {
      t.coeffs[p * t.taps + k] = static_cast<float>(row[k] / sum);
    }
  }
  return t;
}

std::vector<float> ResampleChannel(std::span<const float> in,
                                   const PolyphaseTable& t, size_t out_len) {
  std::vector<float> out(out_len);
  const auto n_in = static_cast<int64_t>(in.size());
  for (size_t n = 0; n < out_len; ++n) {
    const int64_t pos = static_cast<int64_t>(n) * t.down;
    const int64_t base = pos / t.up;
    const int64_t phase = pos % t.up;
    const float* h = t.coeffs.data() + phase * t.taps;
    const int64_t first = base - t.half + 1;
    double acc = 0.0;
    const int k0 = static_cast<int>(std::max<int64_t>(0, -first));
    const int k1 =
        static_cast<int>(std::min<int64_t>(t.taps, n_in - first));
    for (int k = k0; k < k1; ++k) {
      acc += static_cast<double>(h[k]) * in[first + k];
    }
    out[n] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace

AudioBuffer Resample(const AudioBuffer& audio, int target_rate) {
  if (target_rate <= 0) {
    throw Error(ErrorCode::kInvalidRate,
                "target rate must be positive, got " +
                    std::to_string(target_rate));
  }
  if (target_rate == audio.sample_rate()) return audio;

  const int64_t g = std::gcd<int64_t>(target_rate, audio.sample_rate());
  const int64_t up = target_rate / g;
  const int64_t down = audio.sample_rate() / g;
  const auto n = static_cast<int64_t>(audio.num_samples());
  const auto out_len = static_cast<size_t>((n * up + down / 2) / down);

  std::vector<std::vector<float>> channels;
  channels.reserve(audio.num_channels());
  if (n > 0) {
    const PolyphaseTable table = DesignTable(up, down);
    for (const auto& ch : audio.channels()) {
      channels.push_back(ResampleChannel(ch, table, out_len));
    }
  } else {
    channels.assign(audio.num_channels(), {});
  }
  return AudioBuffer(std::move(channels), target_rate);
}

}  // namespace earsim
