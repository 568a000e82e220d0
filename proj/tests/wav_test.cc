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


#include "preverb/wav.h"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"

namespace preverb {
namespace {

TEST(WavTest, SineRoundTripWithinOneLsb) {
  AudioBuffer a{44100, std::vector<double>(44100)};
  for (size_t i = 0; i < a.samples.size(); ++i) {
    a.samples[i] = std::sin(2.0 * std::numbers::pi * 440.0 * i / 44100.0);
  }
  const std::vector<uint8_t> bytes = WavWrite(a);
  EXPECT_EQ(bytes.size(), 44u + 2 * 44100);
  const AudioBuffer b = WavRead(bytes);
  EXPECT_EQ(b.sample_rate, 44100);
  ASSERT_EQ(b.samples.size(), a.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_LE(std::abs(a.samples[i] - b.samples[i]), 1.0 / 32768.0);
  }
}

TEST(WavTest, ZeroLength) {
  const std::vector<uint8_t> bytes = WavWrite(AudioBuffer{48000, {}});
  EXPECT_EQ(bytes.size(), 44u);
  const AudioBuffer b = WavRead(bytes);
  EXPECT_EQ(b.sample_rate, 48000);
  EXPECT_TRUE(b.samples.empty());
}

TEST(WavTest, TruncatedHeader) {
  std::vector<uint8_t> bytes = WavWrite(AudioBuffer{44100, {0.1, 0.2}});
  EXPECT_THROW(WavRead(std::span(bytes).first(10)), InputError);
  EXPECT_THROW(WavRead(std::span(bytes).first(30)), InputError);
  EXPECT_THROW(WavRead(std::span(bytes).first(46)), InputError);
  bytes[0] = 'X';
  EXPECT_THROW(WavRead(bytes), InputError);
}

TEST(WavTest, UnsupportedEncodings) {
  std::vector<uint8_t> bytes = WavWrite(AudioBuffer{44100, {0.1}});
  std::vector<uint8_t> stereo = bytes;
  stereo[22] = 2;
  EXPECT_THROW(WavRead(stereo), InputError);
  std::vector<uint8_t> float_format = bytes;
  float_format[20] = 3;
  EXPECT_THROW(WavRead(float_format), InputError);
  std::vector<uint8_t> eight_bit = bytes;
  eight_bit[34] = 8;
  EXPECT_THROW(WavRead(eight_bit), InputError);
}

TEST(WavTest, SkipsUnknownChunks) {
  std::vector<uint8_t> bytes = WavWrite(AudioBuffer{44100, {0.5, -0.5}});
  const std::vector<uint8_t> list{'L', 'I', 'S', 'T', 3, 0, 0, 0, 'a', 'b', 'c', 0};
  bytes.insert(bytes.begin() + 36, list.begin(), list.end());
  const AudioBuffer b = WavRead(bytes);
  ASSERT_EQ(b.samples.size(), 2u);
  EXPECT_EQ(b.samples[0], 0.5);
  EXPECT_EQ(b.samples[1], -0.5);
}

TEST(WavTest, ClippingIsCountedNotHidden) {
  const AudioBuffer a{44100, {0.5, 1.5, -2.0, 1.0, -1.0}};
  EXPECT_DOUBLE_EQ(Peak(a), 2.0);
  EXPECT_EQ(CountClipped(a), 3u);
  const AudioBuffer b = WavRead(WavWrite(a));
  EXPECT_EQ(b.samples[1], 32767.0 / 32768.0);
  EXPECT_EQ(b.samples[2], -1.0);
  EXPECT_THROW(WavWrite(AudioBuffer{44100, {std::nan("")}}), InputError);
}

TEST(WavTest, FileRoundTrip) {
  const std::string path = ::testing::TempDir() + "/preverb_wav_test.wav";
  WavWriteFile(path, AudioBuffer{44100, {0.25, -0.25}});
  EXPECT_EQ(WavReadFile(path).samples, (std::vector<double>{0.25, -0.25}));
  std::remove(path.c_str());
  EXPECT_THROW(WavReadFile(path), InputError);
}

}  // namespace
}  // namespace preverb
