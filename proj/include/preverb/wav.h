/*
Copyright 2026 The preverb Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef PREVERB_WAV_H_
#define PREVERB_WAV_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "preverb/error.h"

namespace preverb {

// Mono audio, nominal range [-1, 1].
struct AudioBuffer {
  int sample_rate = 44100;
  std::vector<double> samples;

  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

inline double Peak(const AudioBuffer& audio) {
  double peak = 0.0;
  for (double s : audio.samples) peak = std::max(peak, std::abs(s));
  return peak;
}

namespace wav_internal {

inline void Put16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xff));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

inline void Put32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline uint16_t Get16(std::span<const uint8_t> b, size_t at) {
  return static_cast<uint16_t>(b[at] | (b[at + 1] << 8));
}

inline uint32_t Get32(std::span<const uint8_t> b, size_t at) {
  return static_cast<uint32_t>(b[at]) | (static_cast<uint32_t>(b[at + 1]) << 8) |
         (static_cast<uint32_t>(b[at + 2]) << 16) |
         (static_cast<uint32_t>(b[at + 3]) << 24);
}

inline int16_t Quantize(double x) {
  const long q = std::lround(x * 32768.0);
  return static_cast<int16_t>(std::clamp<long>(q, -32768, 32767));
}

}  // namespace wav_internal

// Number of samples that do not fit in 16-bit PCM and would be clipped.
inline size_t CountClipped(const AudioBuffer& audio) {
  size_t n = 0;
  for (double s : audio.samples) {
    const long q = std::lround(s * 32768.0);
    n += (q < -32768 || q > 32767) ? 1 : 0;
  }
  return n;
}

// 16-bit PCM mono RIFF/WAVE, little endian.
inline std::vector<uint8_t> WavWrite(const AudioBuffer& audio) {
  using namespace wav_internal;
  for (double s : audio.samples) {
    if (!std::isfinite(s)) throw InputError("audio contains non-finite samples");
  }
  const uint32_t data_bytes = static_cast<uint32_t>(audio.samples.size() * 2);
  std::vector<uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  Put32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  Put32(out, 16);
  Put16(out, 1);  // PCM
  Put16(out, 1);  // mono
  Put32(out, static_cast<uint32_t>(audio.sample_rate));
  Put32(out, static_cast<uint32_t>(audio.sample_rate) * 2);
  Put16(out, 2);   // block align
  Put16(out, 16);  // bits per sample
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  Put32(out, data_bytes);
  for (double s : audio.samples) Put16(out, static_cast<uint16_t>(Quantize(s)));
  return out;
}

inline AudioBuffer WavRead(std::span<const uint8_t> bytes) {
  using namespace wav_internal;
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw InputError("wav: malformed header (not RIFF/WAVE)");
  }
  AudioBuffer audio;
  bool have_fmt = false;
  size_t at = 12;
  while (at + 8 <= bytes.size()) {
    const uint32_t size = Get32(bytes, at + 4);
    const size_t body = at + 8;
    if (body + size > bytes.size()) throw InputError("wav: truncated chunk");
    if (std::memcmp(bytes.data() + at, "fmt ", 4) == 0) {
      if (size < 16) throw InputError("wav: malformed fmt chunk");
      const uint16_t format = Get16(bytes, body);
      const uint16_t channels = Get16(bytes, body + 2);
      const uint16_t bits = Get16(bytes, body + 14);
      if (format != 1 || bits != 16) {
        throw InputError("wav: unsupported encoding (need 16-bit PCM)");
      }
      if (channels != 1) throw InputError("wav: unsupported encoding (need mono)");
      audio.sample_rate = static_cast<int>(Get32(bytes, body + 4));
      have_fmt = true;
    } else if (std::memcmp(bytes.data() + at, "data", 4) == 0) {
      if (!have_fmt) throw InputError("wav: data chunk before fmt chunk");
      audio.samples.resize(size / 2);
      for (size_t i = 0; i < audio.samples.size(); ++i) {
        audio.samples[i] = static_cast<int16_t>(Get16(bytes, body + 2 * i)) / 32768.0;
      }
      return audio;
    }
    at = body + size + (size & 1);
  }
  throw InputError(have_fmt ? "wav: missing data chunk" : "wav: malformed header");
}

inline AudioBuffer WavReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return WavRead(bytes);
}

inline void WavWriteFile(const std::string& path, const AudioBuffer& audio) {
  const auto bytes = WavWrite(audio);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace preverb

#endif  // PREVERB_WAV_H_
