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

#ifndef PREVERB_ACOUSTICS_H_
#define PREVERB_ACOUSTICS_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "preverb/error.h"
#include "preverb/geometry.h"
#include "preverb/scene.h"
#include "preverb/tracer.h"

namespace preverb {

// Sabine constant, s/m.
inline constexpr double kSabineConstant = 0.1611;
// Proportionality constant of RT60 = k * mu / -ln(1 - a). Substituting
// mu = 4V/S into Eyring's formula gives k = 0.1611 / 4.
inline constexpr double kMfpRt60Constant = kSabineConstant / 4.0;

// Decay regression span, dB below the integrated maximum.
inline constexpr double kFitStartDb = -5.0;
inline constexpr double kFitEndDb = -35.0;
inline constexpr double kTruncationGuard = 0.9;  // fraction of the curve

struct MfpEstimate {
  double mu = 0.0;  // m
  size_t segments_used = 0;
  size_t rays_completed = 0;
  Vec3 source;
};

enum class Rt60Method { kSabine, kEyringMfp, kDecayRegression };

inline const char* ToString(Rt60Method m) {
  switch (m) {
    case Rt60Method::kSabine:
      return "sabine";
    case Rt60Method::kEyringMfp:
      return "eyring_mfp";
    case Rt60Method::kDecayRegression:
      return "decay_regression";
  }
  return "unknown";
}

struct Rt60Estimate {
  BandValues rt60{};  // s
  Rt60Method method = Rt60Method::kSabine;
  std::optional<BandValues> fit_r2;  // decay regression only

  double Mean() const {
    double sum = 0.0;
    for (double v : rt60) sum += v;
    return sum / kNumBands;
  }
};

inline double MfpAnalytic(double volume, double area) {
  if (!(volume > 0.0) || !(area > 0.0)) {
    throw InputError("mean-free path needs V > 0 and S > 0");
  }
  return 4.0 * volume / area;
}

// mu = sum(d_i) / (segments traversed). Without escapes the denominator is
// n_rays * n_bounces.
inline MfpEstimate MfpFromTrace(const PathTraceResult& trace,
                                const Vec3& source = {}) {
  if (trace.total_segments == 0) {
    throw AcousticError("no collisions; mean-free path undefined");
  }
  double sum = 0.0;
  for (const RayPath& ray : trace.rays) {
    for (double d : ray.segments) sum += d;
  }
  return {sum / static_cast<double>(trace.total_segments), trace.total_segments,
          trace.CompletedRays(), source};
}

inline void RequireOpenUnitInterval(const BandValues& absorption) {
  for (double a : absorption) {
    if (!(a > 0.0 && a < 1.0)) {
      throw InputError("mean absorption must lie in (0, 1); a = 0 gives an "
                       "infinite RT60");
    }
  }
}

inline Rt60Estimate Rt60Sabine(double volume, double area,
                               const BandValues& absorption) {
  if (!(volume > 0.0) || !(area > 0.0)) {
    throw InputError("Sabine RT60 needs V > 0 and S > 0");
  }
  RequireOpenUnitInterval(absorption);
  Rt60Estimate out;
  out.method = Rt60Method::kSabine;
  for (int b = 0; b < kNumBands; ++b) {
    out.rt60[b] = kSabineConstant * volume / (area * absorption[b]);
  }
  return out;
}

inline Rt60Estimate Rt60FromMfp(double mu, const BandValues& absorption) {
  if (!(mu > 0.0)) throw InputError("mean-free path must be > 0");
  RequireOpenUnitInterval(absorption);
  Rt60Estimate out;
  out.method = Rt60Method::kEyringMfp;
  for (int b = 0; b < kNumBands; ++b) {
    out.rt60[b] = kMfpRt60Constant * mu / -std::log1p(-absorption[b]);
  }
  return out;
}

// Area-weighted mean absorption per band.
inline BandValues MeanAbsorption(const Scene& scene) {
  BandValues weighted{};
  double total = 0.0;
  for (const Triangle& tri : scene.Triangles()) {
    const double area = tri.Area();
    const Material& m = scene.Materials().materials[tri.material_id];
    for (int b = 0; b < kNumBands; ++b) weighted[b] += area * m.absorption[b];
    total += area;
  }
  for (double& w : weighted) w /= total;
  return weighted;
}

// Schroeder backward integral of one band, in dB relative to its value at
// t = 0 (the total energy). Entry i covers the energy arriving at or after
// i * bin_width.
inline std::vector<double> BackwardIntegralDb(const std::vector<double>& bins) {
  std::vector<double> db(bins.size());
  double tail = 0.0;
  for (size_t i = bins.size(); i-- > 0;) {
    tail += bins[i];
    db[i] = tail;
  }
  const double total = db.empty() ? 0.0 : db[0];
  for (double& v : db) {
    v = v > 0.0 ? 10.0 * std::log10(v / total) : -std::numeric_limits<double>::infinity();
  }
  return db;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LineFit FitLine(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

// RT60 per band from a decay histogram: backward-integrate, convert to dB,
// fit a line over the -5..-35 dB span and extrapolate to 60 dB.
inline Rt60Estimate Rt60FromDecay(const EnergyDecayCurve& curve) {
  Rt60Estimate out;
  out.method = Rt60Method::kDecayRegression;
  BandValues r2{};
  for (int b = 0; b < kNumBands; ++b) {
    const auto& bins = curve.bins[b];
    if (!(curve.Total(b) > 0.0)) {
      throw AcousticError("band " + std::to_string(b) + " has no energy");
    }
    const std::vector<double> db = BackwardIntegralDb(bins);
    std::vector<double> t, y;
    bool reached_end = false;
    for (size_t i = 0; i < db.size(); ++i) {
      if (db[i] < kFitEndDb) {
        // A crossing in the last bins comes from truncating the integral,
        // not from decay.
        reached_end = static_cast<double>(i) < kTruncationGuard * static_cast<double>(db.size());
        break;
      }
      if (db[i] <= kFitStartDb) {
        t.push_back(static_cast<double>(i) * curve.bin_width);
        y.push_back(db[i]);
      }
    }
    if (!reached_end || t.size() < 2) {
      throw AcousticError("insufficient decay; increase bounces/duration");
    }
    const LineFit fit = FitLine(t, y);
    if (!(fit.slope < 0.0)) {
      throw AcousticError("insufficient decay; increase bounces/duration");
    }
    out.rt60[b] = -60.0 / fit.slope;
    r2[b] = fit.r2;
  }
  out.fit_r2 = r2;
  return out;
}

// time_s,band0_db,...,band3_db of the backward-integrated curve.
inline std::string DecayCurveCsv(const EnergyDecayCurve& curve) {
  std::array<std::vector<double>, kNumBands> db;
  for (int b = 0; b < kNumBands; ++b) db[b] = BackwardIntegralDb(curve.bins[b]);
  std::ostringstream out;
  out << "time_s,band0_db,band1_db,band2_db,band3_db\n";
  for (size_t i = 0; i < curve.NumBins(); ++i) {
    out << static_cast<double>(i) * curve.bin_width;
    for (int b = 0; b < kNumBands; ++b) {
      out << ',';
      if (std::isfinite(db[b][i])) {
        out << db[b][i];
      } else {
        out << "-inf";
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace preverb

#endif  // PREVERB_ACOUSTICS_H_
