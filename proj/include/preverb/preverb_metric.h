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

#ifndef PREVERB_PREVERB_METRIC_H_
#define PREVERB_PREVERB_METRIC_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "preverb/acoustics.h"
#include "preverb/error.h"
#include "preverb/geometry.h"

namespace preverb {

// Constants of the perceptual metric. The early-reflection psychometric
// curve is p(mu) = slope * mu + intercept, measured against a reference room
// with mean-free path mu_ref. jnd_er_abs is the mu offset detected half the
// time; offset_c relates the early-reflection and late-reverberation JNDs as
// jnd_lr = jnd_er - offset_c * mu_ref.
struct PReverbConstants {
  double slope = 3.89;      // 1/m
  double intercept = -7.5;
  double offset_c = 0.02;
  double mu_ref = 2.0;      // m
  double jnd_er_abs = 0.06; // m

  // Fitted domain of the psychometric curve, m.
  double fit_min = 2.0;
  double fit_max = 2.17;

  // mu at which the fitted curve crosses 0.5, minus mu_ref.
  double FittedJndEr() const { return (0.5 - intercept) / slope - mu_ref; }

  // The stored JND must agree with the one implied by the fit, to the
  // precision it was reported with.
  bool SelfConsistent(double tolerance = 0.005) const {
    return std::abs(FittedJndEr() - jnd_er_abs) <= tolerance;
  }
};

struct DetectionProbability {
  double p = 0.0;
  bool extrapolated = false;
};

// Probability that a room with mean-free path `mu` is judged different from
// the reference room using early reflections only.
inline DetectionProbability DetectionProbabilityEr(
    double mu, const PReverbConstants& c = {}) {
  DetectionProbability out;
  out.p = std::clamp(c.slope * mu + c.intercept, 0.0, 1.0);
  out.extrapolated = mu < c.fit_min || mu > c.fit_max;
  return out;
}

enum class JndMode {
  kRelative,  // JND scales with the cluster's reference mu (1% by default)
  kAbsolute,  // fixed JND measured at the reference room (0.02 m by default)
};

inline const char* ToString(JndMode m) {
  return m == JndMode::kRelative ? "relative" : "absolute";
}

inline JndMode ParseJndMode(const std::string& s) {
  if (s == "relative") return JndMode::kRelative;
  if (s == "absolute") return JndMode::kAbsolute;
  throw InputError("jnd mode must be 'relative' or 'absolute', got '" + s + "'");
}

// Late-reverberation JND in meters of mean-free path around `mu_ref`.
// Rounded to the picometer so that decimal constants give decimal results
// (0.06 - 0.04 is not 0.02 in binary floating point).
inline double JndLr(double mu_ref, const PReverbConstants& c = {},
                    JndMode mode = JndMode::kRelative) {
  if (!(mu_ref > 0.0)) throw InputError("reference mean-free path must be > 0");
  constexpr double kPicometersPerMeter = 1e12;
  double jnd = c.jnd_er_abs - c.offset_c * c.mu_ref;
  if (mode == JndMode::kRelative) {
    const double jnd_er = c.jnd_er_abs / c.mu_ref * mu_ref;
    jnd = jnd_er - c.offset_c * mu_ref;
  }
  return std::round(jnd * kPicometersPerMeter) / kPicometersPerMeter;
}

enum class MuSource { kErTrace, kAnalytic };

struct PathSample {
  size_t index = 0;
  Vec3 position;
  double mu = 0.0;  // m
  MuSource source = MuSource::kErTrace;
};

// Members are the contiguous sample range [begin, end).
struct Cluster {
  size_t begin = 0;
  size_t end = 0;
  double mu_ref = 0.0;   // first member's mu
  double mu_mean = 0.0;
  double jnd_rel = 0.0;  // JND used, as a fraction of mu_ref
  std::optional<Rt60Estimate> rt60;

  size_t Size() const { return end - begin; }
  bool Contains(size_t index) const { return index >= begin && index < end; }
};

struct ClusterMap {
  std::vector<Cluster> clusters;
  JndMode mode = JndMode::kRelative;

  size_t NumSamples() const { return clusters.empty() ? 0 : clusters.back().end; }

  size_t ClusterOf(size_t sample_index) const {
    if (sample_index >= NumSamples()) {
      throw InputError("sample index " + std::to_string(sample_index) +
                       " out of range");
    }
    const auto it = std::upper_bound(
        clusters.begin(), clusters.end(), sample_index,
        [](size_t i, const Cluster& c) { return i < c.begin; });
    return static_cast<size_t>(it - clusters.begin()) - 1;
  }
};

struct ClusterOptions {
  JndMode mode = JndMode::kRelative;
  // Compare against the running mean of the open cluster instead of its
  // first member.
  bool running_mean_reference = false;
};

// Single forward pass. A sample joins the open cluster while its mu stays
// within the late-reverberation JND of the cluster reference; otherwise it
// opens a new cluster and becomes the reference.
inline ClusterMap ClusterPath(std::span<const PathSample> samples,
                              const PReverbConstants& constants = {},
                              const ClusterOptions& options = {}) {
  if (samples.empty()) throw InputError("cannot cluster an empty path");
  for (const PathSample& s : samples) {
    if (!(s.mu > 0.0)) {
      throw InputError("sample " + std::to_string(s.index) + " has mu <= 0");
    }
  }
  ClusterMap map;
  map.mode = options.mode;
  auto open = [&](size_t i) {
    Cluster c;
    c.begin = i;
    c.end = i + 1;
    c.mu_ref = samples[i].mu;
    c.mu_mean = samples[i].mu;
    c.jnd_rel = JndLr(c.mu_ref, constants, options.mode) / c.mu_ref;
    map.clusters.push_back(c);
  };
  open(0);
  double sum = samples[0].mu;
  for (size_t i = 1; i < samples.size(); ++i) {
    Cluster& c = map.clusters.back();
    const double reference =
        options.running_mean_reference ? sum / static_cast<double>(c.Size()) : c.mu_ref;
    const double threshold = JndLr(reference, constants, options.mode);
    // Same picometer resolution as JndLr, so 2.02 vs 2.00 sits on the boundary.
    const double distance = std::round(std::abs(samples[i].mu - reference) * 1e12) / 1e12;
    if (distance <= threshold) {
      c.end = i + 1;
      sum += samples[i].mu;
      c.mu_mean = sum / static_cast<double>(c.Size());
    } else {
      open(i);
      sum = samples[i].mu;
    }
  }
  return map;
}

// sample_index,x,y,z,mu,cluster_id
inline std::string ClusterCsv(std::span<const PathSample> samples,
                              const ClusterMap& map) {
  std::ostringstream out;
  out.precision(10);
  out << "sample_index,x,y,z,mu,cluster_id\n";
  for (size_t i = 0; i < samples.size(); ++i) {
    const PathSample& s = samples[i];
    out << s.index << ',' << s.position.x << ',' << s.position.y << ','
        << s.position.z << ',' << s.mu << ',' << map.ClusterOf(i) << '\n';
  }
  return out.str();
}

}  // namespace preverb

#endif  // PREVERB_PREVERB_METRIC_H_
