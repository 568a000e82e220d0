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

#ifndef PREVERB_TRACER_H_
#define PREVERB_TRACER_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "preverb/error.h"
#include "preverb/geometry.h"
#include "preverb/parallel.h"
#include "preverb/scene.h"

namespace preverb {

struct TraceConfig {
  int n_rays = 500;
  int n_bounces = 20;
  uint64_t rng_seed = 1;
  double speed_of_sound = 343.0;  // m/s
  unsigned threads = 1;           // 0 = hardware concurrency

  void Validate() const {
    if (n_rays < 1) throw InputError("n_rays must be >= 1");
    if (n_bounces < 1) throw InputError("n_bounces must be >= 1");
    if (!(speed_of_sound > 0.0)) throw InputError("speed_of_sound must be > 0");
  }
};

// A re-traced ray starts this far off the surface, along the normal that
// faces the side it leaves from.
inline constexpr double kSurfaceOffset = 1e-6;
// Minimum hit distance for re-traced rays. The origin offset already rules
// out self-hits, so this only guards against exact zero-distance returns.
inline constexpr double kRetraceTMin = 1e-9;
// Rays stop once every band's energy drops below this.
inline constexpr double kEnergyFloor = 1e-12;
// Decay histogram resolution.
inline constexpr double kDecayBinWidth = 1e-3;  // s

// Direction for ray `index` of a trace seeded with `seed`, uniform on the
// unit sphere. Each ray owns its own generator, so the result does not
// depend on how rays are scheduled.
inline Vec3 SampleSphere(uint64_t seed, uint64_t index) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double z = 1.0 - 2.0 * unit(rng);
  const double phi = 2.0 * std::numbers::pi * unit(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

struct RayPath {
  std::vector<double> segments;  // segment k ends at hit k + 1
  bool escaped = false;
  int escaped_at = -1;  // bounce index at which no surface was found
};

struct PathTraceResult {
  std::vector<RayPath> rays;
  int n_bounces = 0;
  size_t total_segments = 0;

  size_t CompletedRays() const {
    size_t n = 0;
    for (const RayPath& r : rays) n += r.escaped ? 0 : 1;
    return n;
  }
};

inline void RequireInside(const Scene& scene, const Vec3& source) {
  if (!IsFinite(source) || !scene.Bounds().StrictlyContains(source)) {
    std::ostringstream msg;
    msg << "source " << source << " is not strictly inside the scene bounds";
    throw InputError(msg.str());
  }
}

// Follows one specular ray for up to `bounces` hits, calling
// on_hit(segment_length, hit) after each one. Returns false if it escaped.
template <typename OnHit>
bool FollowSpecularRay(const Scene& scene, Vec3 origin, Vec3 direction,
                       int bounces, OnHit&& on_hit) {
  double t_min = 0.0;
  for (int b = 0; b < bounces; ++b) {
    const auto hit = scene.Intersect(origin, direction, t_min);
    if (!hit) return false;
    if (!on_hit(hit->t, *hit)) return true;
    direction = Normalize(Reflect(direction, hit->normal));
    origin = hit->point + kSurfaceOffset * hit->normal;
    t_min = kRetraceTMin;
  }
  return true;
}

// Low-order specular trace used for mean-free-path estimation. The segment
// from the source to the first hit counts as the first segment, so a ray
// that never escapes contributes exactly n_bounces segments.
inline PathTraceResult TraceSegments(const Scene& scene, const Vec3& source,
                                     const TraceConfig& cfg) {
  cfg.Validate();
  RequireInside(scene, source);
  PathTraceResult result;
  result.n_bounces = cfg.n_bounces;
  result.rays.resize(cfg.n_rays);
  ParallelFor(result.rays.size(), cfg.threads, [&](size_t i) {
    RayPath& ray = result.rays[i];
    ray.segments.reserve(cfg.n_bounces);
    const bool closed = FollowSpecularRay(
        scene, source, SampleSphere(cfg.rng_seed, i), cfg.n_bounces,
        [&](double length, const SurfaceHit&) {
          ray.segments.push_back(length);
          return true;
        });
    if (!closed) {
      ray.escaped = true;
      ray.escaped_at = static_cast<int>(ray.segments.size());
    }
  });
  for (const RayPath& r : result.rays) result.total_segments += r.segments.size();
  if (result.total_segments == 0) {
    throw AcousticError("no collisions; mean-free path undefined");
  }
  return result;
}

// One row per segment: ray_index,bounce_index,length_m.
inline std::string SegmentsCsv(const PathTraceResult& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "ray_index,bounce_index,length_m\n";
  for (size_t r = 0; r < trace.rays.size(); ++r) {
    const auto& segs = trace.rays[r].segments;
    for (size_t b = 0; b < segs.size(); ++b) {
      out << r << ',' << b << ',' << segs[b] << '\n';
    }
  }
  return out.str();
}

// Per-band energy histogram over arrival time. The source emits a total of
// 1 per band.
struct EnergyDecayCurve {
  double bin_width = kDecayBinWidth;  // s
  std::array<std::vector<double>, kNumBands> bins;

  size_t NumBins() const { return bins[0].size(); }
  double Duration() const { return bin_width * static_cast<double>(NumBins()); }

  double Total(int band) const {
    double sum = 0.0;
    for (double e : bins[band]) sum += e;
    return sum;
  }
};

// Histogram from a sampled signal's squared amplitude, identical in every
// band. Used to run the decay regression on rendered impulse responses.
inline EnergyDecayCurve DecayCurveFromSignal(std::span<const double> samples,
                                             double sample_rate,
                                             double bin_width = kDecayBinWidth) {
  EnergyDecayCurve curve;
  const size_t per_bin = std::max<size_t>(1, std::lround(bin_width * sample_rate));
  curve.bin_width = static_cast<double>(per_bin) / sample_rate;
  const size_t n = (samples.size() + per_bin - 1) / per_bin;
  std::vector<double> energy(n, 0.0);
  for (size_t i = 0; i < samples.size(); ++i) {
    energy[i / per_bin] += samples[i] * samples[i];
  }
  for (auto& band : curve.bins) band = energy;
  return curve;
}

struct EnergyDeposit {
  double time = 0.0;  // s
  BandValues energy{};
};

// Energy left in one ray after each hit, for `bounces` hits or until every
// band falls under kEnergyFloor.
inline std::vector<EnergyDeposit> TraceRayEnergy(const Scene& scene,
                                                 const Vec3& source,
                                                 const Vec3& direction,
                                                 const TraceConfig& cfg) {
  std::vector<EnergyDeposit> out;
  BandValues energy;
  energy.fill(1.0 / cfg.n_rays);
  double path_length = 0.0;
  const auto& materials = scene.Materials().materials;
  FollowSpecularRay(scene, source, direction, cfg.n_bounces,
                    [&](double length, const SurfaceHit& hit) {
                      path_length += length;
                      const Material& m = materials[hit.material_id];
                      bool alive = false;
                      for (int b = 0; b < kNumBands; ++b) {
                        energy[b] *= 1.0 - m.absorption[b];
                        alive = alive || energy[b] >= kEnergyFloor;
                      }
                      out.push_back({path_length / cfg.speed_of_sound, energy});
                      return alive;
                    });
  return out;
}

// High-order specular trace binned into an energy decay histogram. Each ray
// starts with 1/n_rays per band; after every hit the surviving energy is
// deposited at the bin of its arrival time. The histogram spans twice the
// latest deposit time.
inline EnergyDecayCurve TraceEnergyDecay(const Scene& scene, const Vec3& source,
                                         const TraceConfig& cfg) {
  cfg.Validate();
  RequireInside(scene, source);
  std::vector<std::vector<EnergyDeposit>> per_ray(cfg.n_rays);
  ParallelFor(per_ray.size(), cfg.threads, [&](size_t i) {
    per_ray[i] = TraceRayEnergy(scene, source, SampleSphere(cfg.rng_seed, i), cfg);
  });

  double last = 0.0;
  size_t deposits = 0;
  for (const auto& ray : per_ray) {
    deposits += ray.size();
    if (!ray.empty()) last = std::max(last, ray.back().time);
  }
  if (deposits == 0) throw AcousticError("no collisions; decay curve undefined");

  EnergyDecayCurve curve;
  const size_t n_bins =
      static_cast<size_t>(std::ceil(2.0 * last / curve.bin_width)) + 1;
  for (auto& band : curve.bins) band.assign(n_bins, 0.0);
  // Summed in ray order so the result is independent of the thread count.
  for (const auto& ray : per_ray) {
    for (const EnergyDeposit& d : ray) {
      const size_t bin = static_cast<size_t>(d.time / curve.bin_width);
      for (int b = 0; b < kNumBands; ++b) curve.bins[b][bin] += d.energy[b];
    }
  }
  return curve;
}

}  // namespace preverb

#endif  // PREVERB_TRACER_H_
