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

#ifndef PREVERB_REVERB_DSP_H_
#define PREVERB_REVERB_DSP_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "preverb/error.h"
#include "preverb/preverb_metric.h"
#include "preverb/wav.h"

namespace preverb {

inline constexpr int kNumCombs = 4;
inline constexpr int kNumAllpasses = 2;

// Nominal Schroeder delays in milliseconds.
inline constexpr std::array<double, kNumCombs> kCombDelaysMs{29.7, 37.1, 41.1, 43.7};
inline constexpr std::array<double, kNumAllpasses> kAllpassDelaysMs{5.0, 1.7};
inline constexpr double kDefaultAllpassGain = 0.7;
inline constexpr double kDefaultWetDryMix = 0.5;
// Smallest admissible comb gain; below this the comb is effectively gone.
inline constexpr double kMinCombGain = 1e-4;
// The tail is rendered until the wet envelope would fall below -80 dBFS.
inline constexpr double kTailFloor = 1e-4;
inline constexpr double kCrossfadeSeconds = 0.05;

struct ReverbParams {
  int sample_rate = 44100;
  std::array<int, kNumCombs> comb_delays{};  // samples
  std::array<double, kNumCombs> comb_gains{};
  std::array<int, kNumAllpasses> allpass_delays{};  // samples
  double allpass_gain = kDefaultAllpassGain;
  double wet_dry_mix = kDefaultWetDryMix;

  void Validate() const {
    if (sample_rate <= 0) throw InputError("sample rate must be > 0");
    for (int i = 0; i < kNumCombs; ++i) {
      if (comb_delays[i] < 1) throw InputError("comb delays must be >= 1 sample");
      if (!(comb_gains[i] > 0.0 && comb_gains[i] < 1.0)) {
        throw InputError("comb gains must lie in (0, 1)");
      }
      for (int j = 0; j < i; ++j) {
        if (std::gcd(comb_delays[i], comb_delays[j]) != 1) {
          throw InputError("comb delays must be pairwise coprime");
        }
      }
    }
    for (int d : allpass_delays) {
      if (d < 1) throw InputError("allpass delays must be >= 1 sample");
    }
    if (!(std::abs(allpass_gain) < 1.0)) throw InputError("allpass gain must be < 1");
    if (!(wet_dry_mix >= 0.0 && wet_dry_mix <= 1.0)) {
      throw InputError("wet/dry mix must lie in [0, 1]");
    }
  }
};

// Feedback gain giving 60 dB of decay every `rt60` seconds for a loop of
// `delay_seconds`.
inline double CombGain(double delay_seconds, double rt60) {
  return std::pow(10.0, -3.0 * delay_seconds / rt60);
}

// Sample counts nearest to `delays_ms`, nudged to the closest value that is
// coprime with every earlier delay.
inline std::array<int, kNumCombs> CoprimeCombDelays(
    int sample_rate, const std::array<double, kNumCombs>& delays_ms = kCombDelaysMs) {
  std::array<int, kNumCombs> out{};
  for (int i = 0; i < kNumCombs; ++i) {
    const double exact = delays_ms[i] * 1e-3 * sample_rate;
    auto ok = [&](long d) {
      if (d < 1) return false;
      for (int j = 0; j < i; ++j) {
        if (std::gcd(static_cast<int>(d), out[j]) != 1) return false;
      }
      return true;
    };
    const long lo = static_cast<long>(std::floor(exact));
    long best = -1;
    for (long r = 0; best < 0; ++r) {
      // Candidates at distance r around [lo, lo + 1], nearest first.
      std::array<long, 2> cand{lo - r, lo + 1 + r};
      std::sort(cand.begin(), cand.end(), [&](long a, long b) {
        return std::abs(a - exact) < std::abs(b - exact);
      });
      for (long c : cand) {
        if (ok(c)) {
          best = c;
          break;
        }
      }
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

inline ReverbParams ParamsFromRt60(double rt60, int sample_rate) {
  if (!(rt60 > 0.0)) throw InputError("rt60 must be > 0");
  if (sample_rate != 44100 && sample_rate != 48000) {
    throw InputError("sample rate must be 44100 or 48000 Hz");
  }
  ReverbParams p;
  p.sample_rate = sample_rate;
  p.comb_delays = CoprimeCombDelays(sample_rate);
  for (int i = 0; i < kNumCombs; ++i) {
    p.comb_gains[i] =
        CombGain(static_cast<double>(p.comb_delays[i]) / sample_rate, rt60);
    if (p.comb_gains[i] < kMinCombGain) {
      throw InputError("rt60 too small: comb gain below 1e-4, filter degenerates");
    }
  }
  for (int i = 0; i < kNumAllpasses; ++i) {
    p.allpass_delays[i] =
        static_cast<int>(std::lround(kAllpassDelaysMs[i] * 1e-3 * sample_rate));
  }
  return p;
}

// Samples after the end of the input until every comb and allpass has rung
// down below kTailFloor. Depends only on the parameters, so rendering stays
// linear in the input.
inline size_t TailSamples(const ReverbParams& p) {
  double tail = 0.0;
  for (int i = 0; i < kNumCombs; ++i) {
    const double loops = std::ceil(std::log(kTailFloor) / std::log(p.comb_gains[i]));
    tail = std::max(tail, (loops + 1.0) * p.comb_delays[i]);
  }
  const double g = std::abs(p.allpass_gain);
  for (int d : p.allpass_delays) {
    const double loops = g > 0.0 ? std::ceil(std::log(kTailFloor) / std::log(g)) : 1.0;
    tail += (loops + 1.0) * d;
  }
  return static_cast<size_t>(tail);
}

// Schroeder reverberator: four parallel feedback combs, scaled by 1/4, into
// two series allpasses. Gains may be changed between samples.
class SchroederReverb {
 public:
  explicit SchroederReverb(const ReverbParams& p) : params_(p) {
    p.Validate();
    for (int i = 0; i < kNumCombs; ++i) combs_[i].assign(p.comb_delays[i], 0.0);
    for (int i = 0; i < kNumAllpasses; ++i) allpasses_[i].assign(p.allpass_delays[i], 0.0);
    gains_ = p.comb_gains;
  }

  void SetCombGains(const std::array<double, kNumCombs>& gains) { gains_ = gains; }
  const std::array<double, kNumCombs>& CombGains() const { return gains_; }

  // Wet output for one input sample.
  double Process(double x) {
    double wet = 0.0;
    for (int i = 0; i < kNumCombs; ++i) {
      auto& line = combs_[i];
      size_t& pos = comb_pos_[i];
      const double y = line[pos];
      line[pos] = x + gains_[i] * y;
      pos = pos + 1 == line.size() ? 0 : pos + 1;
      wet += y;
    }
    wet *= 1.0 / kNumCombs;
    const double g = params_.allpass_gain;
    for (int i = 0; i < kNumAllpasses; ++i) {
      auto& line = allpasses_[i];
      size_t& pos = allpass_pos_[i];
      const double delayed = line[pos];
      const double v = wet + g * delayed;
      line[pos] = v;
      pos = pos + 1 == line.size() ? 0 : pos + 1;
      wet = -g * v + delayed;
    }
    return wet;
  }

 private:
  ReverbParams params_;
  std::array<std::vector<double>, kNumCombs> combs_;
  std::array<size_t, kNumCombs> comb_pos_{};
  std::array<std::vector<double>, kNumAllpasses> allpasses_;
  std::array<size_t, kNumAllpasses> allpass_pos_{};
  std::array<double, kNumCombs> gains_{};
};

inline AudioBuffer RenderReverb(const AudioBuffer& dry, const ReverbParams& params) {
  if (dry.sample_rate != params.sample_rate) {
    throw InputError("sample-rate mismatch: audio " + std::to_string(dry.sample_rate) +
                     " Hz, reverb " + std::to_string(params.sample_rate) + " Hz");
  }
  SchroederReverb reverb(params);
  AudioBuffer out;
  out.sample_rate = dry.sample_rate;
  out.samples.resize(dry.samples.size() + TailSamples(params));
  const double mix = params.wet_dry_mix;
  for (size_t n = 0; n < out.samples.size(); ++n) {
    const double x = n < dry.samples.size() ? dry.samples[n] : 0.0;
    out.samples[n] = mix * reverb.Process(x) + (1.0 - mix) * x;
  }
  return out;
}

// Which cluster the listener is in from `t_start` seconds on.
struct ScheduleEntry {
  double t_start = 0.0;
  size_t cluster = 0;
};

// Renders with the reverberator target switching between the clusters'
// RT60s (band mean) as the listener moves. Comb gains cross-fade linearly
// over 50 ms at each switch; delays are the same for every RT60.
inline AudioBuffer RenderPath(const AudioBuffer& dry, const ClusterMap& map,
                              std::span<const ScheduleEntry> schedule,
                              double wet_dry_mix = kDefaultWetDryMix) {
  if (schedule.empty()) throw InputError("schedule is empty");
  if (schedule.front().t_start > 0.0) {
    throw InputError("schedule gap: first entry starts at " +
                     std::to_string(schedule.front().t_start) + " s, not 0");
  }
  for (size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i].t_start > schedule[i - 1].t_start)) {
      throw InputError("schedule times must be strictly increasing");
    }
  }
  std::vector<ReverbParams> params(schedule.size());
  size_t tail = 0;
  for (size_t i = 0; i < schedule.size(); ++i) {
    const size_t c = schedule[i].cluster;
    if (c >= map.clusters.size()) {
      throw InputError("schedule references unknown cluster " + std::to_string(c));
    }
    if (!map.clusters[c].rt60) {
      throw InputError("cluster " + std::to_string(c) + " has no rt60");
    }
    params[i] = ParamsFromRt60(map.clusters[c].rt60->Mean(), dry.sample_rate);
    params[i].wet_dry_mix = wet_dry_mix;
    tail = std::max(tail, TailSamples(params[i]));
  }
  params[0].Validate();

  SchroederReverb reverb(params[0]);
  AudioBuffer out;
  out.sample_rate = dry.sample_rate;
  out.samples.resize(dry.samples.size() + tail);
  const size_t fade = static_cast<size_t>(std::lround(kCrossfadeSeconds * dry.sample_rate));
  size_t active = 0;
  size_t fade_start = 0;
  std::array<double, kNumCombs> from = params[0].comb_gains;
  bool fading = false;
  for (size_t n = 0; n < out.samples.size(); ++n) {
    const double t = static_cast<double>(n) / dry.sample_rate;
    if (active + 1 < schedule.size() && t >= schedule[active + 1].t_start) {
      ++active;
      from = reverb.CombGains();
      fade_start = n;
      fading = true;
    }
    if (fading) {
      const double w = std::min(1.0, static_cast<double>(n - fade_start) / fade);
      std::array<double, kNumCombs> g;
      for (int i = 0; i < kNumCombs; ++i) {
        g[i] = from[i] + w * (params[active].comb_gains[i] - from[i]);
      }
      reverb.SetCombGains(g);
      if (w >= 1.0) fading = false;
    }
    const double x = n < dry.samples.size() ? dry.samples[n] : 0.0;
    out.samples[n] = wet_dry_mix * reverb.Process(x) + (1.0 - wet_dry_mix) * x;
  }
  return out;
}

}  // namespace preverb

#endif  // PREVERB_REVERB_DSP_H_
