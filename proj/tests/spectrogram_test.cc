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
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "earsim/error.h"
#include "gtest/gtest.h"
#include "test_signals.h"

namespace earsim {
namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an earsim::Error";
  return ErrorCode::kUsage;
}

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("earsim_spectrogram_test_" + name);
}

ChannelEnergies Constant(size_t rows, size_t cols, double value) {
  ChannelEnergies e;
  e.energies.Resize(rows, cols);
  for (double& v : e.energies.data()) v = value;
  return e;
}

TEST(Framing, OneSecondIs85Frames) {
  const Matrix<double> f = SubsampleToFrames(Constant(48000, 4, 2.5), 85);
  ASSERT_EQ(f.rows(), 85u);
  for (double v : f.data()) EXPECT_DOUBLE_EQ(v, 2.5);
}

TEST(Framing, ShorterThanOneFrameGivesNone) {
  EXPECT_EQ(SubsampleToFrames(Constant(480, 4, 1), 85).rows(), 0u);
  EXPECT_EQ(SubsampleToFrames(Constant(564, 4, 1), 85).rows(), 0u);
  EXPECT_EQ(SubsampleToFrames(Constant(565, 4, 1), 85).rows(), 1u);
}

TEST(Framing, FramesAreMeansOfTheirWindows) {
  ChannelEnergies e;
  e.energies.Resize(2000, 1);
  for (size_t t = 0; t < 2000; ++t) e.energies(t, 0) = static_cast<double>(t);
  const Matrix<double> f = SubsampleToFrames(e, 85);
  ASSERT_EQ(f.rows(), FrameCount(2000, 48000, 85));
  for (size_t k = 0; k < f.rows(); ++k) {
    const size_t a = FrameStart(k, 48000, 85);
    const size_t b = FrameStart(k + 1, 48000, 85);
    EXPECT_DOUBLE_EQ(f(k, 0), (a + b - 1) / 2.0);
  }
}

TEST(Framing, InvalidRate) {
  EXPECT_EQ(CodeOf([] { SubsampleToFrames(Constant(10, 1, 1), 0); }),
            ErrorCode::kInvalidRate);
  EXPECT_EQ(CodeOf([] { SubsampleToFrames(Constant(10, 1, 1), 96000); }),
            ErrorCode::kInvalidRate);
  EXPECT_EQ(CodeOf([] { SubsampleToFrames(Constant(10, 1, 1), -85); }),
            ErrorCode::kInvalidRate);
}

TEST(Spreading, FalloffShape) {
  EXPECT_EQ(SigmoidFalloff(0, 1.2), 1.0);
  EXPECT_NEAR(SigmoidFalloff(1, 1.2), 2.0 / (1.0 + std::exp(1.2)), 1e-15);
  EXPECT_LT(SigmoidFalloff(2, 1.2), SigmoidFalloff(1, 1.2));
}

TEST(Spreading, ZeroStaysZero) {
  for (double v : SpreadEnergy(std::vector<double>(128, 0.0), 1.2)) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(Spreading, SinglePeakIsSymmetricAndNonIncreasing) {
  std::vector<double> x(41, 0.0);
  x[20] = 3.0;
  const std::vector<double> y = SpreadEnergy(x, 1.2);
  EXPECT_EQ(y[20], 3.0);
  for (size_t d = 1; d <= 20; ++d) {
    EXPECT_EQ(y[20 - d], y[20 + d]);
    EXPECT_LE(y[20 + d], y[20 + d - 1]);
    EXPECT_GT(y[20 + d], 0.0);
  }
}

TEST(Spreading, InfiniteStrengthIsIdentity) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<double> x(64);
  for (double& v : x) v = u(rng);
  EXPECT_EQ(SpreadEnergy(x, std::numeric_limits<double>::infinity()), x);
}

TEST(Spreading, NeverBelowInputAndReflectionEquivariant) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(1 + trial * 3);
    for (double& v : x) v = u(rng);
    const std::vector<double> y = SpreadEnergy(x, 1.2);
    for (size_t i = 0; i < x.size(); ++i) ASSERT_GE(y[i], x[i]);
    std::vector<double> xr(x.rbegin(), x.rend());
    std::vector<double> yr = SpreadEnergy(xr, 1.2);
    std::reverse(yr.begin(), yr.end());
    ASSERT_EQ(yr, y);
    const auto in_max = std::max_element(x.begin(), x.end()) - x.begin();
    const auto out_max = std::max_element(y.begin(), y.end()) - y.begin();
    ASSERT_EQ(in_max, out_max);
  }
}

TEST(Spreading, MatchesDirectMaximum) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(128);
  for (double& v : x) v = u(rng) * u(rng);
  const std::vector<double> y = SpreadEnergy(x, 0.7);
  for (size_t i = 0; i < x.size(); ++i) {
    double want = 0;
    for (size_t j = 0; j < x.size(); ++j) {
      const double d = std::abs(static_cast<double>(i) - static_cast<double>(j));
      want = std::max(want, x[j] * (d == 0 ? 1.0 : 2.0 / (1.0 + std::exp(0.7 * d))));
    }
    ASSERT_DOUBLE_EQ(y[i], want);
  }
}

TEST(Loudness, FloorAndAlgebra) {
  LoudnessParams p = LoudnessParams::Default(3);
  p.multipliers = {1.0, 2.0, 1.0};
  EXPECT_NEAR(p.FloorLoudness(0), -90.0, 1e-12);
  EXPECT_NEAR(p.FloorLoudness(1), -180.0, 1e-12);
  const std::vector<double> l = LoudnessDb(std::vector<double>{0.0, 1.0, 1e6}, p);
  EXPECT_NEAR(l[0], -90.0, 1e-12);
  EXPECT_NEAR(l[1], 2.0 * 10.0 * std::log10(1.0 + 1e-9), 1e-12);
  EXPECT_NEAR(l[2], 60.0, 1e-9);
}

TEST(Loudness, DoublingEnergyAddsThreeDecibels) {
  for (double mult : {1.0, 0.5, 3.0}) {
    LoudnessParams p = LoudnessParams::Default(1);
    p.multipliers = {mult};
    const double e = 1e6 * p.noise_floor_bias;
    const double delta = LoudnessDb(std::vector<double>{2 * e}, p)[0] -
                         LoudnessDb(std::vector<double>{e}, p)[0];
    EXPECT_NEAR(delta, 3.0103 * mult, 0.01 * 3.0103 * mult);
  }
}

TEST(Loudness, StrictlyMonotone) {
  const LoudnessParams p = LoudnessParams::Default(1);
  double prev = LoudnessDb(std::vector<double>{0.0}, p)[0];
  for (double e = 1e-12; e < 1e3; e *= 1.7) {
    const double l = LoudnessDb(std::vector<double>{e}, p)[0];
    EXPECT_GT(l, prev);
    prev = l;
  }
}

TEST(Loudness, InvalidParams) {
  LoudnessParams p = LoudnessParams::Default(4);
  EXPECT_EQ(CodeOf([&] { p.Validate(5); }), ErrorCode::kInvalidInput);
  p.noise_floor_bias = 0;
  EXPECT_EQ(CodeOf([&] { p.Validate(4); }), ErrorCode::kInvalidInput);
  p = LoudnessParams::Default(4);
  p.multipliers[2] = -1;
  EXPECT_EQ(CodeOf([&] { p.Validate(4); }), ErrorCode::kInvalidInput);
}

TEST(ComputeSpectrogram, SilenceSitsAtTheFloor) {
  const PerceptualSpectrogram s =
      ComputeSpectrogram(testing::Mono48k(std::vector<float>(48000)));
  ASSERT_EQ(s.num_frames(), 85u);
  ASSERT_EQ(s.num_bins(), 128u);
  const LoudnessParams p = LoudnessParams::Default();
  for (size_t k = 0; k < 85; ++k) {
    for (size_t b = 0; b < 128; ++b) {
      ASSERT_NEAR(s.frames(k, b), p.FloorLoudness(b), 1e-9);
    }
  }
}

TEST(ComputeSpectrogram, ToneArgmaxIsStable) {
  const SpectrogramConfig config;
  const PerceptualSpectrogram s =
      ComputeSpectrogram(testing::Mono48k(testing::Sine(1000, 1.0, 0.5)), config);
  size_t nearest = 0;
  for (size_t b = 1; b < 128; ++b) {
    if (std::abs(config.filterbank.centers[b] - 1000) <
        std::abs(config.filterbank.centers[nearest] - 1000)) {
      nearest = b;
    }
  }
  for (size_t k = 5; k < s.num_frames(); ++k) {
    const std::span<const double> row = s.frames.row(k);
    const auto argmax = static_cast<size_t>(
        std::max_element(row.begin(), row.end()) - row.begin());
    EXPECT_LE(std::max(argmax, nearest) - std::min(argmax, nearest), 1u) << k;
  }
}

TEST(ComputeSpectrogram, ShapeAndFloorForArbitraryLengths) {
  const LoudnessParams p = LoudnessParams::Default();
  for (size_t n : {0u, 300u, 565u, 10000u, 33333u}) {
    const PerceptualSpectrogram s =
        ComputeSpectrogram(testing::Mono48k(testing::WhiteNoise(n, 0.3, 9)));
    EXPECT_EQ(s.num_frames(), n * 85 / 48000) << n;
    EXPECT_EQ(s.num_bins(), 128u);
    for (size_t k = 0; k < s.num_frames(); ++k) {
      for (size_t b = 0; b < 128; ++b) {
        ASSERT_GE(s.frames(k, b), p.FloorLoudness(b) - 1e-9);
      }
    }
  }
}

TEST(ComputeSpectrogram, EarlierFramesIgnoreLaterAudio) {
  std::vector<float> a = testing::Sine(700, 0.5, 0.4);
  a.resize(48000, 0.0f);
  std::vector<float> ab = a;
  const std::vector<float> b = testing::WhiteNoise(24000, 0.5, 13);
  ab.insert(ab.end(), b.begin(), b.end());
  const PerceptualSpectrogram sa = ComputeSpectrogram(testing::Mono48k(a));
  const PerceptualSpectrogram sab = ComputeSpectrogram(testing::Mono48k(ab));
  ASSERT_EQ(sa.num_frames(), 85u);
  ASSERT_EQ(sab.num_frames(), 127u);
  for (size_t k = 0; k < 85; ++k) {
    for (size_t bin = 0; bin < 128; ++bin) {
      ASSERT_EQ(sa.frames(k, bin), sab.frames(k, bin));
    }
  }
}

TEST(ComputeSpectrogram, ResonatorOnlyTouchesLowBins) {
  SpectrogramConfig with;
  SpectrogramConfig without;
  without.use_resonator = false;
  const AudioBuffer audio = testing::Mono48k(testing::WhiteNoise(9600, 0.3, 2));
  // Compare before spreading leaks the change upward.
  with.spread_strength = std::numeric_limits<double>::infinity();
  without.spread_strength = with.spread_strength;
  const PerceptualSpectrogram a = ComputeSpectrogram(audio, with);
  const PerceptualSpectrogram b = ComputeSpectrogram(audio, without);
  bool low_differs = false;
  for (size_t k = 0; k < a.num_frames(); ++k) {
    for (size_t bin = 0; bin < 128; ++bin) {
      if (bin < with.resonator_bins) {
        low_differs |= a.frames(k, bin) != b.frames(k, bin);
        ASSERT_GE(a.frames(k, bin), b.frames(k, bin));
      } else {
        ASSERT_EQ(a.frames(k, bin), b.frames(k, bin));
      }
    }
  }
  EXPECT_TRUE(low_differs);
}

TEST(ComputeSpectrogram, RejectsWrongRateAndChannels) {
  EXPECT_EQ(CodeOf([] { ComputeSpectrogram(AudioBuffer::Mono({0.f}, 44100)); }),
            ErrorCode::kWrongRate);
  EXPECT_EQ(CodeOf([] {
              ComputeSpectrogram(AudioBuffer({{0.f}, {0.f}}, 48000));
            }),
            ErrorCode::kInvalidInput);
}

PerceptualSpectrogram Random(size_t frames, size_t bins, uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(-90, 10);
  PerceptualSpectrogram s;
  s.frames.Resize(frames, bins);
  for (double& v : s.frames.data()) v = u(rng);
  return s;
}

TEST(SpectrogramIo, BinaryRoundTrip) {
  const PerceptualSpectrogram s = Random(17, 128, 1);
  const std::filesystem::path path = TempPath("rt.espg");
  WriteSpectrogramBinary(path, s);
  EXPECT_EQ(std::filesystem::file_size(path), 16u + 17u * 128u * 4u);
  const PerceptualSpectrogram back = ReadSpectrogramBinary(path);
  EXPECT_EQ(back, s);
  std::filesystem::remove(path);
}

TEST(SpectrogramIo, ReadErrors) {
  EXPECT_EQ(CodeOf([] { ReadSpectrogramBinary(TempPath("missing.espg")); }),
            ErrorCode::kFileNotFound);
  const std::filesystem::path path = TempPath("bad.espg");
  {
    std::ofstream f(path, std::ios::binary);
    f << "NOPE and then some padding bytes";
  }
  EXPECT_EQ(CodeOf([&] { ReadSpectrogramBinary(path); }),
            ErrorCode::kUnsupportedFormat);
  WriteSpectrogramBinary(path, Random(4, 8, 2));
  std::filesystem::resize_file(path, 16 + 4 * 8 * 4 - 1);
  EXPECT_EQ(CodeOf([&] { ReadSpectrogramBinary(path); }),
            ErrorCode::kCorruptHeader);
  std::filesystem::remove(path);
}

TEST(SpectrogramIo, CsvLayout) {
  const PerceptualSpectrogram s = Random(3, 2, 3);
  std::ostringstream out;
  WriteSpectrogramCsv(out, s);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "frame,time_s,bin0,bin1");
  size_t rows = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(fields, cell, ',')) values.push_back(std::stod(cell));
    ASSERT_EQ(values.size(), 4u);
    EXPECT_EQ(values[0], static_cast<double>(rows));
    EXPECT_NEAR(values[1], rows / 85.0, 1e-6);
    EXPECT_NEAR(values[2], s.frames(rows, 0), 1e-4);
    EXPECT_NEAR(values[3], s.frames(rows, 1), 1e-4);
    ++rows;
  }
  EXPECT_EQ(rows, 3u);
}

}  // namespace
}  // namespace earsim
