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


// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "preverb/acoustics.h"
#include "preverb/bvh.h"
#include "preverb/pipeline.h"
#include "preverb/preverb_metric.h"
#include "preverb/reverb_dsp.h"
#include "preverb/tracer.h"
#include "test_scenes.h"

namespace preverb {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome Table1Reproduction() {
  const auto start = Clock::now();
  const auto rows = ValidateTable1();
  const double seconds = SecondsSince(start);
  std::ostringstream out;
  out.precision(3);
  bool pass = seconds < 10.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    pass = pass && rows[i].error_pct <= (i < 3 ? 3.5 : 5.0);
    out << rows[i].shape << " " << std::fixed << rows[i].mu_er << "/" << rows[i].mu_an << " ("
        << rows[i].error_pct << "%); ";
  }
  out << "runtime " << seconds << " s";
  return {pass && rows.size() == 4, out.str()};
}

Outcome MetricConstants() {
  const PReverbConstants c;
  const double jnd = JndLr(2.0, c);
  const double p = DetectionProbabilityEr(2.06, c).p;
  const double fitted = c.FittedJndEr();
  std::ostringstream out;
  out.precision(17);
  out << "jnd_lr(2) = " << jnd << ", p(2.06) = " << p << ", fitted jnd_er - mu_ref = " << fitted;
  const bool pass = jnd == 0.02 && p >= 0.50 && p <= 0.52 && fitted >= 0.055 &&
                    fitted <= 0.065 && c.SelfConsistent();
  return {pass, out.str()};
}

struct CorridorRun {
  CorridorReport report;
  std::string serialized;  // without timestamp
};

const CorridorRun& Corridor() {
  static const CorridorRun run = [] {
    CorridorRun r;
    r.report = ValidateCorridor();
    r.serialized = SerializeBake(r.report.bake.file, false);
    return r;
  }();
  return run;
}

Outcome CorridorClustering() {
  const CorridorReport& r = Corridor().report;
  std::ostringstream out;
  out.precision(4);
  out << r.bake.stats.n_clusters << " clusters, dominant sizes";
  for (size_t c : r.dominant) out << " " << r.bake.file.clusters.clusters[c].Size();
  out << ", coverage " << r.Coverage() << ", max mu dev " << 100 * r.max_mu_deviation
      << "%, max RT60 dev " << 100 * r.max_rt60_deviation << "%, runtime " << r.runtime_s
      << " s";
  const bool pass = r.dominant.size() == 3 && r.Coverage() >= 0.8 &&
                    r.max_mu_deviation <= 0.015 && r.max_rt60_deviation <= 0.05 &&
                    r.runtime_s < 120.0;
  return {pass, out.str()};
}

Outcome ApertureSensitivity() {
  const CorridorReport& r = Corridor().report;
  std::ostringstream out;
  out << r.aperture_samples.size() << " samples within " << kApertureRadius
      << " m of an aperture, clusters:";
  for (size_t i : r.aperture_samples) out << " " << r.bake.file.clusters.ClusterOf(i);
  out << "; dominant:";
  for (size_t c : r.dominant) out << " " << c;
  return {!r.aperture_samples.empty() && r.apertures_isolated, out.str()};
}

Outcome Rt60CrossCheck() {
  std::ostringstream out;
  out.precision(4);
  bool pass = true;
  for (double a : {0.1, 0.2, 0.4}) {
    const Scene scene = testing::CubeScene(5.0, a);
    TraceConfig cfg;
    cfg.n_bounces = 300;
    const Rt60Estimate decay = Rt60FromDecay(TraceEnergyDecay(scene, {2.5, 2.5, 2.5}, cfg));
    const BandValues alpha{a, a, a, a};
    const double eyring = Rt60FromMfp(MfpAnalytic(125, 150), alpha).rt60[0];
    const double sabine = Rt60Sabine(125, 150, alpha).rt60[0];
    for (double t : decay.rt60) {
      pass = pass && std::abs(t - eyring) <= 0.15 * eyring && std::abs(t - sabine) <= 0.20 * sabine;
    }
    out << "a=" << a << ": decay " << decay.rt60[0] << " eyring " << eyring << " sabine "
        << sabine << "; ";
  }
  for (double rt : {0.5, 1.0, 2.0}) {
    EnergyDecayCurve c;
    for (auto& band : c.bins) {
      band.resize(static_cast<size_t>(2.0 * rt / c.bin_width));
      for (size_t i = 0; i < band.size(); ++i) {
        band[i] = std::exp(-13.815510557964274 * static_cast<double>(i) * c.bin_width / rt);
      }
    }
    const Rt60Estimate e = Rt60FromDecay(c);
    pass = pass && std::abs(e.rt60[0] - rt) <= 0.02 * rt && (*e.fit_r2)[0] > 0.999;
    out << "synthetic " << rt << " -> " << e.rt60[0] << " (R2 " << (*e.fit_r2)[0] << "); ";
  }
  return {pass, out.str()};
}

Outcome FilterRoundTrip() {
  std::ostringstream out;
  out.precision(4);
  bool pass = true;
  for (double rt : {0.5, 1.0, 2.0}) {
    AudioBuffer impulse{44100, {1.0}};
    const AudioBuffer ir = RenderReverb(impulse, ParamsFromRt60(rt, 44100));
    const double measured = Rt60FromDecay(DecayCurveFromSignal(ir.samples, 44100)).rt60[0];
    pass = pass && std::abs(measured - rt) <= 0.10 * rt;
    out << rt << " s -> " << measured << " s; ";
  }
  return {pass, out.str()};
}

Outcome PrecomputationEconomy() {
  const BakeStats& s = Corridor().report.bake.stats;
  std::ostringstream out;
  out.precision(4);
  out << s.n_points << " points, " << s.n_clusters << " clusters, " << s.lr_simulations
      << " high-order simulations, t_er " << s.t_er_ms << " ms, t_lr " << s.t_lr_ms << " ms";
  const bool pass = s.n_points == kCorridorPathPoints && s.lr_simulations == s.n_clusters &&
                    s.n_clusters <= 12 && s.t_lr_ms > s.t_er_ms;
  return {pass, out.str()};
}

Outcome Determinism() {
  const Scene scene = Scene::Create(CorridorMesh(), UniformMaterial(CorridorAbsorption()));
  const std::vector<Vec3> path = CorridorLayout{}.Path(kCorridorPathPoints);
  bool pass = true;
  std::ostringstream out;
  for (unsigned threads : {1u, 4u, 0u}) {
    BakeConfig cfg;
    cfg.threads = threads;
    const std::string text = SerializeBake(Bake(scene, path, cfg).file, false);
    const bool same = text == Corridor().serialized;
    pass = pass && same;
    out << "threads=" << threads << (same ? " identical" : " DIFFERS") << "; ";
  }
  return {pass, out.str()};
}

Outcome OracleEquivalence() {
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(-0.2, 1.2);
  bool pass = true;
  std::ostringstream out;
  for (const auto& [name, scene] : testing::AllTestScenes()) {
    std::vector<TrianglePoints> tris;
    for (const Triangle& t : scene.Triangles()) tris.push_back({t.v0, t.v1, t.v2});
    const Aabb box = scene.Bounds();
    int mismatches = 0;
    for (int i = 0; i < 100000; ++i) {
      const Vec3 o{box.min.x + unit(rng) * (box.max.x - box.min.x),
                   box.min.y + unit(rng) * (box.max.y - box.min.y),
                   box.min.z + unit(rng) * (box.max.z - box.min.z)};
      const Vec3 d = Normalize({gauss(rng), gauss(rng), gauss(rng)});
      const PrimitiveHit a = scene.Accelerator().Intersect(o, d, 0.0);
      const PrimitiveHit b = IntersectExhaustive(tris, o, d, 0.0);
      if (a.primitive != b.primitive || (a.Valid() && a.t != b.t)) ++mismatches;
    }
    pass = pass && mismatches == 0;
    out << name << " " << mismatches << "; ";
  }
  return {pass, out.str() + "mismatches over 1e5 rays each"};
}

int Run() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 mean-free path of reference shapes", Table1Reproduction},
      {"2 metric constants", MetricConstants},
      {"3 corridor clustering", CorridorClustering},
      {"4 aperture sensitivity", ApertureSensitivity},
      {"5 RT60 estimator cross-check", Rt60CrossCheck},
      {"6 filter round trip", FilterRoundTrip},
      {"7 precomputation economy", PrecomputationEconomy},
      {"8 bake determinism", Determinism},
      {"9 BVH vs exhaustive intersection", OracleEquivalence},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace preverb

int main() { return preverb::Run(); }
