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

#include "earsim/audio.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "earsim/error.h"

namespace earsim {

static_assert(std::endian::native == std::endian::little,
              "WAV codec assumes a little-endian host");

AudioBuffer::AudioBuffer(std::vector<std::vector<float>> channels,
                         int sample_rate)
    : channels_(std::move(channels)), sample_rate_(sample_rate) {
  if (sample_rate_ <= 0) {
    throw Error(ErrorCode::kInvalidRate,
                "sample rate must be positive, got " +
                    std::to_string(sample_rate_));
  }
  for (const auto& ch : channels_) {
    if (ch.size() != channels_.front().size()) {
      throw Error(ErrorCode::kInvalidInput, "channels differ in length");
    }
    for (float s : ch) {
      if (!std::isfinite(s)) {
        throw Error(ErrorCode::kInvalidInput, "non-finite sample");
      }
    }
  }
}

AudioBuffer AudioBuffer::Mono(std::vector<float> samples, int sample_rate) {
  std::vector<std::vector<float>> channels;
  channels.push_back(std::move(samples));
  return AudioBuffer(std::move(channels), sample_rate);
}

AudioBuffer AudioBuffer::ExtractChannel(size_t index) const {
  return Mono(channels_.at(index), sample_rate_);
}

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  size_t remaining() const { return bytes_.size() - pos_; }
  size_t position() const { return pos_; }

  uint32_t U32() {
    uint32_t v;
    Copy(&v, 4);
    return v;
  }
  uint16_t U16() {
    uint16_t v;
    Copy(&v, 2);
    return v;
  }
  std::string Tag() {
    std::string tag(4, '\0');
    Copy(tag.data(), 4);
    return tag;
  }
  std::span<const std::byte> Take(size_t n) {
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  void Skip(size_t n) { pos_ += std::min(n, remaining()); }

 private:
  void Copy(void* dst, size_t n) {
    if (remaining() < n) {
      throw Error(ErrorCode::kCorruptHeader, "truncated WAV header");
    }
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }

  std::span<const std::byte> bytes_;
  size_t pos_ = 0;
};

struct FormatChunk {
  uint16_t tag = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t block_align = 0;
  uint16_t bits = 0;
};

float DecodeSample(const std::byte* p, const FormatChunk& fmt) {
  if (fmt.tag == kFormatFloat) {
    float v;
    std::memcpy(&v, p, 4);
    return v;
  }
  switch (fmt.bits) {
    case 16: {
      int16_t v;
      std::memcpy(&v, p, 2);
      return static_cast<float>(v / 32768.0);
    }
    case 24: {
      const auto b0 = static_cast<uint32_t>(p[0]);
      const auto b1 = static_cast<uint32_t>(p[1]);
      const auto b2 = static_cast<uint32_t>(p[2]);
      int32_t v = static_cast<int32_t>((b0 << 8) | (b1 << 16) | (b2 << 24));
      v >>= 8;
      return static_cast<float>(v / 8388608.0);
    }
    default: {
      int32_t v;
      std::memcpy(&v, p, 4);
      return static_cast<float>(v / 2147483648.0);
    }
  }
}

}  // namespace

AudioBuffer DecodeWav(std::span<const std::byte> bytes) {
  if (bytes.size() < 12) {
    throw Error(ErrorCode::kUnsupportedFormat, "not a RIFF/WAVE file");
  }
  ByteReader reader(bytes);
  const std::string riff = reader.Tag();
  reader.U32();
  const std::string wave = reader.Tag();
  if (riff != "RIFF" || wave != "WAVE") {
    throw Error(ErrorCode::kUnsupportedFormat, "not a RIFF/WAVE file");
  }

  FormatChunk fmt;
  bool have_fmt = false;
  std::span<const std::byte> payload;
  bool have_data = false;
  while (reader.remaining() >= 8 && !have_data) {
    const std::string id = reader.Tag();
    const uint32_t size = reader.U32();
    if (id == "fmt ") {
      if (size < 16 || size > reader.remaining()) {
        throw Error(ErrorCode::kCorruptHeader, "malformed fmt chunk");
      }
      const size_t start = reader.position();
      fmt.tag = reader.U16();
      fmt.channels = reader.U16();
      fmt.sample_rate = reader.U32();
      reader.U32();  // byte rate
      fmt.block_align = reader.U16();
      fmt.bits = reader.U16();
      if (fmt.tag == kFormatExtensible) {
        if (size < 40) {
          throw Error(ErrorCode::kCorruptHeader, "short extensible fmt chunk");
        }
        reader.U16();  // cbSize
        reader.U16();  // valid bits
        reader.U32();  // channel mask
        fmt.tag = reader.U16();  // leading bytes of the subformat GUID
      }
      reader.Skip(size - (reader.position() - start));
      have_fmt = true;
    } else if (id == "data") {
      if (size > reader.remaining()) {
        throw Error(ErrorCode::kCorruptHeader,
                    "data chunk declares " + std::to_string(size) +
                        " bytes but only " +
                        std::to_string(reader.remaining()) + " remain");
      }
      payload = reader.Take(size);
      have_data = true;
    } else {
      reader.Skip(size + (size & 1));
    }
  }
  if (!have_fmt || !have_data) {
    throw Error(ErrorCode::kCorruptHeader, "missing fmt or data chunk");
  }

  const bool pcm_ok = fmt.tag == kFormatPcm &&
                      (fmt.bits == 16 || fmt.bits == 24 || fmt.bits == 32);
  const bool float_ok = fmt.tag == kFormatFloat && fmt.bits == 32;
  if (!pcm_ok && !float_ok) {
    throw Error(ErrorCode::kUnsupportedFormat,
                "unsupported WAV encoding (tag " + std::to_string(fmt.tag) +
                    ", " + std::to_string(fmt.bits) + " bits)");
  }
  if (fmt.channels < 1 || fmt.channels > 8) {
    throw Error(ErrorCode::kUnsupportedFormat,
                "unsupported channel count " + std::to_string(fmt.channels));
  }
  const size_t bytes_per_sample = fmt.bits / 8;
  if (fmt.block_align != fmt.channels * bytes_per_sample ||
      fmt.sample_rate == 0) {
    throw Error(ErrorCode::kCorruptHeader, "inconsistent fmt chunk");
  }
  if (payload.size() % fmt.block_align != 0) {
    throw Error(ErrorCode::kCorruptHeader,
                "data length is not a whole number of frames");
  }

  const size_t frames = payload.size() / fmt.block_align;
  std::vector<std::vector<float>> channels(fmt.channels,
                                           std::vector<float>(frames));
  const std::byte* p = payload.data();
  for (size_t i = 0; i < frames; ++i) {
    for (size_t c = 0; c < fmt.channels; ++c) {
      channels[c][i] = DecodeSample(p, fmt);
      p += bytes_per_sample;
    }
  }
  return AudioBuffer(std::move(channels), static_cast<int>(fmt.sample_rate));
}

AudioBuffer LoadWav(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kFileNotFound, "no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFileNotFound, "cannot open: " + path.string());
  }
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  try {
    return DecodeWav(std::as_bytes(std::span(raw)));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

namespace {

void PutU16(std::vector<std::byte>& out, uint16_t v) {
  out.push_back(static_cast<std::byte>(v & 0xff));
  out.push_back(static_cast<std::byte>(v >> 8));
}

void PutU32(std::vector<std::byte>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
  }
}

void PutTag(std::vector<std::byte>& out, const char* tag) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>(tag[i]));
}

int64_t Quantize(float s, int bits) {
  const double scale = std::ldexp(1.0, bits - 1);
  const double v = std::round(static_cast<double>(s) * scale);
  return static_cast<int64_t>(std::clamp(v, -scale, scale - 1));
}

}  // namespace

std::vector<std::byte> EncodeWav(const AudioBuffer& audio,
                                 WavSampleFormat format) {
  int bits = 32;
  uint16_t tag = kFormatPcm;
  switch (format) {
    case WavSampleFormat::kPcm16:
      bits = 16;
      break;
    case WavSampleFormat::kPcm24:
      bits = 24;
      break;
    case WavSampleFormat::kPcm32:
      break;
    case WavSampleFormat::kFloat32:
      tag = kFormatFloat;
      break;
  }
  const auto channels = static_cast<uint16_t>(audio.num_channels());
  const uint16_t block_align = channels * (bits / 8);
  const auto data_size =
      static_cast<uint32_t>(audio.num_samples() * block_align);

  std::vector<std::byte> out;
  out.reserve(44 + data_size);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_size);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, tag);
  PutU16(out, channels);
  PutU32(out, static_cast<uint32_t>(audio.sample_rate()));
  PutU32(out, static_cast<uint32_t>(audio.sample_rate()) * block_align);
  PutU16(out, block_align);
  PutU16(out, static_cast<uint16_t>(bits));
  PutTag(out, "data");
  PutU32(out, data_size);
  for (size_t i = 0; i < audio.num_samples(); ++i) {
    for (size_t c = 0; c < channels; ++c) {
      const float s = audio.channel(c)[i];
      if (tag == kFormatFloat) {
        PutU32(out, std::bit_cast<uint32_t>(s));
        continue;
      }
      const auto q = static_cast<uint32_t>(Quantize(s, bits));
      for (int b = 0; b < bits / 8; ++b) {
        out.push_back(static_cast<std::byte>((q >> (8 * b)) & 0xff));
      }
    }
  }
  return out;
}

void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio,
              WavSampleFormat format) {
  const std::vector<std::byte> bytes = EncodeWav(audio, format);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
}

}  // namespace earsim
