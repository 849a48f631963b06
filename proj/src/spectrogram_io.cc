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

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "earsim/error.h"
#include "earsim/spectrogram.h"

namespace earsim {

namespace {

constexpr char kMagic[4] = {'E', 'S', 'P', 'G'};

struct Header {
  char magic[4];
  uint32_t n_frames;
  uint32_t n_bins;
  float frame_rate;
};
static_assert(sizeof(Header) == 16);

}  // namespace

void WriteSpectrogramBinary(const std::filesystem::path& path,
                            const PerceptualSpectrogram& spectrogram) {
  Header header{};
  std::memcpy(header.magic, kMagic, 4);
  header.n_frames = static_cast<uint32_t>(spectrogram.num_frames());
  header.n_bins = static_cast<uint32_t>(spectrogram.num_bins());
  header.frame_rate = static_cast<float>(spectrogram.frame_rate);
  std::vector<float> values(spectrogram.frames.data().begin(),
                            spectrogram.frames.data().end());
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(&header), sizeof(header));
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

PerceptualSpectrogram ReadSpectrogramBinary(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  }
  Header header{};
  in.read(reinterpret_cast<char*>(&header), sizeof(header));
  if (!in || std::memcmp(header.magic, kMagic, 4) != 0) {
    throw Error(ErrorCode::kUnsupportedFormat,
                path.string() + " is not a spectrogram dump");
  }
  const uint64_t count = static_cast<uint64_t>(header.n_frames) * header.n_bins;
  std::error_code ec;
  const uint64_t size = std::filesystem::file_size(path, ec);
  if (ec || size < sizeof(Header) + count * sizeof(float)) {
    throw Error(ErrorCode::kCorruptHeader,
                path.string() + ": payload shorter than header declares");
  }
  std::vector<float> values(count);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!in) {
    throw Error(ErrorCode::kCorruptHeader,
                path.string() + ": payload shorter than header declares");
  }
  PerceptualSpectrogram out;
  out.frame_rate = header.frame_rate;
  out.frames.Resize(header.n_frames, header.n_bins);
  std::copy(values.begin(), values.end(), out.frames.data().begin());
  return out;
}

void WriteSpectrogramCsv(std::ostream& out,
                         const PerceptualSpectrogram& spectrogram) {
  out << "frame,time_s";
  for (size_t b = 0; b < spectrogram.num_bins(); ++b) out << ",bin" << b;
  out << '\n';
  char buf[32];
  for (size_t f = 0; f < spectrogram.num_frames(); ++f) {
    out << f << ',' << static_cast<double>(f) / spectrogram.frame_rate;
    for (double v : spectrogram.frames.row(f)) {
      std::snprintf(buf, sizeof(buf), ",%.6f", v);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace earsim
