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

#ifndef PREVERB_PIPELINE_H_
#define PREVERB_PIPELINE_H_

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <iomanip>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "preverb/acoustics.h"
#include "preverb/error.h"
#include "preverb/fixtures.h"
#include "preverb/parallel.h"
#include "preverb/preverb_metric.h"
#include "preverb/reverb_dsp.h"
#include "preverb/scene.h"
#include "preverb/tracer.h"

namespace preverb {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kBakeFormatVersion = 1;

inline std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

// Content hash of geometry and materials; used to detect stale bakes.
inline std::string SceneFingerprint(const Scene& scene) {
  return "sha256:" + Sha256Hex(WriteObj(scene) + SerializeMaterials(scene.Materials()));
}

enum class LrSource { kFirstMember, kCentroid };

struct BakeConfig {
  TraceConfig er{500, 20, 1, 343.0, 1};
  TraceConfig lr{500, 300, 1, 343.0, 1};
  uint64_t seed = 1;
  PReverbConstants constants;
  ClusterOptions clustering;
  LrSource lr_source = LrSource::kFirstMember;
  unsigned threads = 1;  // 0 = hardware concurrency
  // Also run the high-order simulation at every sample (for validation).
  bool pointwise_rt60 = false;
};

struct BakeFile {
  std::string tool_version = kToolVersion;
  std::string created_utc;  // excluded from determinism and content hash
  std::string scene_fingerprint;
  BandLayout bands;
  std::vector<PathSample> samples;
  ClusterMap clusters;
  int er_rays = 0, er_bounces = 0, lr_rays = 0, lr_bounces = 0;
  uint64_t seed = 0;
  bool running_mean_reference = false;
  LrSource lr_source = LrSource::kFirstMember;
};

struct BakeStats {
  size_t n_points = 0;
  size_t n_clusters = 0;
  double t_er_ms = 0.0;  // mean ER trace time per point
  double t_lr_ms = 0.0;  // mean LR simulation time per cluster
  size_t lr_calls_saved = 0;
  size_t lr_simulations = 0;  // high-order simulations actually executed
};

struct BakeResult {
  BakeFile file;
  BakeStats stats;
  // Filled when BakeConfig::pointwise_rt60 is set; not part of the bake.
  std::vector<Rt60Estimate> pointwise_rt60;
};

namespace pipeline_internal {

inline double MillisSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   start)
      .count();
}

inline std::string UtcNow() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

// Runs fn(i) for every item; errors are rethrown for the lowest failing
// index, prefixed with `what` and that index, keeping the original type.
template <typename Fn>
void ForEachIndexed(size_t count, unsigned threads, const char* what, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  ParallelFor(count, threads, [&](size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    const std::string prefix = std::string(what) + " " + std::to_string(i) + ": ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const AcousticError& e) {
      throw AcousticError(prefix + e.what());
    } catch (const InputError& e) {
      throw InputError(prefix + e.what());
    }
  }
}

}  // namespace pipeline_internal

// Per point: low-order trace -> mu. Cluster the sequence. Per cluster: one
// high-order decay trace -> RT60.
inline BakeResult Bake(const Scene& scene, std::span<const Vec3> positions,
                       const BakeConfig& config) {
  using namespace pipeline_internal;
  if (positions.empty()) throw InputError("listener path is empty");
  TraceConfig er = config.er;
  TraceConfig lr = config.lr;
  er.rng_seed = lr.rng_seed = config.seed;
  er.threads = lr.threads = 1;  // parallelism is across points and clusters
  er.Validate();
  lr.Validate();

  BakeResult result;
  BakeFile& file = result.file;
  file.created_utc = UtcNow();
  file.scene_fingerprint = SceneFingerprint(scene);
  file.bands = scene.Bands();
  file.er_rays = er.n_rays;
  file.er_bounces = er.n_bounces;
  file.lr_rays = lr.n_rays;
  file.lr_bounces = lr.n_bounces;
  file.seed = config.seed;
  file.running_mean_reference = config.clustering.running_mean_reference;
  file.lr_source = config.lr_source;

  file.samples.resize(positions.size());
  std::vector<double> er_ms(positions.size());
  ForEachIndexed(positions.size(), config.threads, "point", [&](size_t i) {
    const auto start = std::chrono::steady_clock::now();
    const MfpEstimate mfp = MfpFromTrace(TraceSegments(scene, positions[i], er), positions[i]);
    er_ms[i] = MillisSince(start);
    file.samples[i] = {i, positions[i], mfp.mu, MuSource::kErTrace};
  });

  file.clusters = ClusterPath(file.samples, config.constants, config.clustering);
  auto& clusters = file.clusters.clusters;

  std::atomic<size_t> lr_calls{0};
  std::vector<double> lr_ms(clusters.size());
  auto simulate = [&](const Vec3& source) {
    ++lr_calls;
    return Rt60FromDecay(TraceEnergyDecay(scene, source, lr));
  };
  ForEachIndexed(clusters.size(), config.threads, "cluster", [&](size_t c) {
    Cluster& cluster = clusters[c];
    Vec3 source = file.samples[cluster.begin].position;
    if (config.lr_source == LrSource::kCentroid) {
      source = {};
      for (size_t i = cluster.begin; i < cluster.end; ++i) source += file.samples[i].position;
      source = source / static_cast<double>(cluster.Size());
    }
    const auto start = std::chrono::steady_clock::now();
    cluster.rt60 = simulate(source);
    lr_ms[c] = MillisSince(start);
  });
  if (lr_calls != clusters.size()) {
    throw std::logic_error("bake ran " + std::to_string(lr_calls.load()) +
                           " high-order simulations for " +
                           std::to_string(clusters.size()) + " clusters");
  }

  BakeStats& stats = result.stats;
  stats.n_points = positions.size();
  stats.n_clusters = clusters.size();
  stats.lr_simulations = lr_calls;
  stats.lr_calls_saved = stats.n_points - stats.n_clusters;
  for (double t : er_ms) stats.t_er_ms += t;
  for (double t : lr_ms) stats.t_lr_ms += t;
  stats.t_er_ms /= static_cast<double>(er_ms.size());
  stats.t_lr_ms /= static_cast<double>(lr_ms.size());

  if (config.pointwise_rt60) {
    result.pointwise_rt60.resize(positions.size());
    ForEachIndexed(positions.size(), config.threads, "point", [&](size_t i) {
      result.pointwise_rt60[i] = Rt60FromDecay(TraceEnergyDecay(scene, positions[i], lr));
    });
  }
  return result;
}

// ---- Bake file (JSON) ------------------------------------------------------

namespace pipeline_internal {

inline nlohmann::ordered_json BakeBody(const BakeFile& f) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["format"] = "preverb-bake";
  doc["version"] = kBakeFormatVersion;
  doc["tool_version"] = f.tool_version;
  doc["scene_fingerprint"] = f.scene_fingerprint;
  doc["band_edges_hz"] = f.bands.edges_hz;
  doc["config"] = {
      {"er", {{"n_rays", f.er_rays}, {"n_bounces", f.er_bounces}}},
      {"lr", {{"n_rays", f.lr_rays}, {"n_bounces", f.lr_bounces}}},
      {"seed", f.seed},
      {"jnd_mode", ToString(f.clusters.mode)},
      {"cluster_reference", f.running_mean_reference ? "running_mean" : "first_member"},
      {"lr_source", f.lr_source == LrSource::kCentroid ? "centroid" : "first_member"},
  };
  ordered_json samples = ordered_json::array();
  for (const PathSample& s : f.samples) {
    samples.push_back({{"index", s.index},
                       {"position", {s.position.x, s.position.y, s.position.z}},
                       {"mu", s.mu},
                       {"mu_source", s.source == MuSource::kErTrace ? "er_trace" : "analytic"}});
  }
  doc["samples"] = samples;
  ordered_json clusters = ordered_json::array();
  for (const Cluster& c : f.clusters.clusters) {
    ordered_json jc = {{"begin", c.begin},
                       {"end", c.end},
                       {"mu_ref", c.mu_ref},
                       {"mu_mean", c.mu_mean},
                       {"jnd_rel", c.jnd_rel}};
    if (c.rt60) {
      jc["rt60"] = {{"method", ToString(c.rt60->method)}, {"seconds", c.rt60->rt60}};
      if (c.rt60->fit_r2) jc["rt60"]["fit_r2"] = *c.rt60->fit_r2;
    }
    clusters.push_back(jc);
  }
  doc["clusters"] = clusters;
  return doc;
}

}  // namespace pipeline_internal

// Bake document. Everything except `created_utc` is a pure function of the
// inputs; `content_hash` covers the document without those two fields.
inline std::string SerializeBake(const BakeFile& file, bool include_timestamp = true) {
  nlohmann::ordered_json body = pipeline_internal::BakeBody(file);
  const std::string hash = "sha256:" + Sha256Hex(body.dump());
  nlohmann::ordered_json doc;
  for (auto it = body.begin(); it != body.end(); ++it) {
    doc[it.key()] = it.value();
    if (it.key() == "tool_version" && include_timestamp) doc["created_utc"] = file.created_utc;
  }
  doc["content_hash"] = hash;
  return doc.dump(2) + "\n";
}

inline BakeFile ParseBake(std::string_view text) {
  BakeFile f;
  std::string content_hash;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format") != "preverb-bake") throw InputError("bake: not a bake file");
    if (doc.at("version").get<int>() != kBakeFormatVersion) {
      throw InputError("bake: unsupported version " + doc.at("version").dump());
    }
    content_hash = doc.value("content_hash", "");
    f.tool_version = doc.at("tool_version").get<std::string>();
    f.created_utc = doc.value("created_utc", "");
    f.scene_fingerprint = doc.at("scene_fingerprint").get<std::string>();
    f.bands.edges_hz = doc.at("band_edges_hz").get<std::array<double, kNumBands + 1>>();
    const auto& cfg = doc.at("config");
    f.er_rays = cfg.at("er").at("n_rays");
    f.er_bounces = cfg.at("er").at("n_bounces");
    f.lr_rays = cfg.at("lr").at("n_rays");
    f.lr_bounces = cfg.at("lr").at("n_bounces");
    f.seed = cfg.at("seed").get<uint64_t>();
    f.clusters.mode = ParseJndMode(cfg.at("jnd_mode").get<std::string>());
    f.running_mean_reference = cfg.at("cluster_reference") == "running_mean";
    f.lr_source = cfg.at("lr_source") == "centroid" ? LrSource::kCentroid
                                                    : LrSource::kFirstMember;
    for (const auto& js : doc.at("samples")) {
      PathSample s;
      s.index = js.at("index");
      const auto p = js.at("position").get<std::array<double, 3>>();
      s.position = {p[0], p[1], p[2]};
      s.mu = js.at("mu");
      s.source = js.at("mu_source") == "analytic" ? MuSource::kAnalytic : MuSource::kErTrace;
      f.samples.push_back(s);
    }
    for (const auto& jc : doc.at("clusters")) {
      Cluster c;
      c.begin = jc.at("begin");
      c.end = jc.at("end");
      c.mu_ref = jc.at("mu_ref");
      c.mu_mean = jc.at("mu_mean");
      c.jnd_rel = jc.at("jnd_rel");
      if (jc.contains("rt60")) {
        Rt60Estimate r;
        const std::string method = jc["rt60"].at("method");
        r.method = method == "sabine"       ? Rt60Method::kSabine
                   : method == "eyring_mfp" ? Rt60Method::kEyringMfp
                                            : Rt60Method::kDecayRegression;
        r.rt60 = jc["rt60"].at("seconds").get<BandValues>();
        if (jc["rt60"].contains("fit_r2")) r.fit_r2 = jc["rt60"]["fit_r2"].get<BandValues>();
        c.rt60 = r;
      }
      f.clusters.clusters.push_back(c);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bake: ") + e.what());
  }
  // Structural checks: clusters partition the samples in order.
  size_t expected = 0;
  for (const Cluster& c : f.clusters.clusters) {
    if (c.begin != expected || c.end <= c.begin) throw InputError("bake: clusters do not partition samples");
    if (!c.rt60) throw InputError("bake: cluster without rt60");
    expected = c.end;
  }
  if (expected != f.samples.size() || f.samples.empty()) {
    throw InputError("bake: clusters do not partition samples");
  }
  if (!content_hash.empty() &&
      content_hash != "sha256:" + Sha256Hex(pipeline_internal::BakeBody(f).dump())) {
    throw InputError("bake: content hash mismatch (file edited or corrupted)");
  }
  return f;
}

// Throws if `bake` was produced for a different scene.
inline void RequireSameScene(const BakeFile& bake, const Scene& scene) {
  if (bake.scene_fingerprint != SceneFingerprint(scene)) {
    throw InputError("bake is stale: scene fingerprint " + bake.scene_fingerprint +
                     " does not match " + SceneFingerprint(scene));
  }
}

// ---- Runtime lookup ----------------------------------------------------------

struct LookupResult {
  size_t sample_index = 0;
  size_t cluster = 0;
  Rt60Estimate rt60;
  double distance = 0.0;  // m, position queries only
};

inline LookupResult Lookup(const BakeFile& bake, size_t sample_index) {
  const size_t c = bake.clusters.ClusterOf(sample_index);
  return {sample_index, c, *bake.clusters.clusters[c].rt60, 0.0};
}

// Nearest baked sample to `position`; fails beyond `radius` meters.
inline LookupResult Lookup(const BakeFile& bake, const Vec3& position, double radius = 1.0) {
  size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < bake.samples.size(); ++i) {
    const double d = Length(bake.samples[i].position - position);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (!(best_d <= radius)) {
    std::ostringstream msg;
    msg << "position " << position << " is out of coverage (nearest sample " << best
        << " is " << best_d << " m away, radius " << radius << " m)";
    throw InputError(msg.str());
  }
  LookupResult r = Lookup(bake, best);
  r.distance = best_d;
  return r;
}

// ---- Direct sound --------------------------------------------------------------

inline constexpr double kMinDirectDistance = 0.1;  // m

// Inverse-distance gain if the straight path is unobstructed, 0 otherwise.
inline double DirectSoundGain(const Vec3& source, const Vec3& listener, const Scene& scene) {
  const Vec3 delta = listener - source;
  const double distance = Length(delta);
  if (!(distance > 0.0)) throw InputError("source and listener coincide");
  const auto hit = scene.Intersect(source, delta / distance, 0.0);
  if (hit && hit->t < distance) return 0.0;
  return 1.0 / std::max(distance, kMinDirectDistance);
}

// ---- Validation suites ------------------------------------------------------------

struct Table1Row {
  std::string shape;
  std::string dims;
  double mu_er = 0.0;
  double mu_an = 0.0;
  double error_pct = 0.0;
};

struct Table1Case {
  std::string shape;
  std::string dims;
  Mesh mesh;
  Vec3 source;
};

inline std::vector<Table1Case> Table1Cases() {
  PillarRoomLayout pillars;
  return {
      {"Cube", "5", BoxMesh({0, 0, 0}, {5, 5, 5}), {2.5, 2.5, 2.5}},
      {"Rect. Prism", "(2,3,4)", BoxMesh({0, 0, 0}, {2, 3, 4}), {1.0, 1.5, 2.0}},
      {"Sq. Pyramid", "(2.8,3) (b,h)", PyramidMesh(2.8, 3.0), {0.0, 0.0, 0.75}},
      {"Room with Pillars", "(5,6,12)", PillarRoomMesh(pillars), pillars.Source()},
  };
}

// Early-reflection mu against 4V/S for the four reference shapes.
inline std::vector<Table1Row> ValidateTable1(const TraceConfig& cfg = {}) {
  std::vector<Table1Row> rows;
  for (const Table1Case& c : Table1Cases()) {
    const Scene scene = Scene::Create(c.mesh, UniformMaterial(0.2));
    const VolumeAndArea va = AnalyticVolumeAndArea(scene);
    Table1Row row{c.shape, c.dims};
    row.mu_an = MfpAnalytic(va.volume, va.area);
    row.mu_er = MfpFromTrace(TraceSegments(scene, c.source, cfg)).mu;
    row.error_pct = 100.0 * std::abs(row.mu_er - row.mu_an) / row.mu_an;
    rows.push_back(row);
  }
  return rows;
}

inline std::string Table1Csv(std::span<const Table1Row> rows) {
  std::ostringstream out;
  out << "shape,dims,mu_er_m,mu_an_m,error_pct\n";
  out << std::fixed << std::setprecision(4);
  for (const Table1Row& r : rows) {
    out << '"' << r.shape << "\",\"" << r.dims << "\"," << r.mu_er << ',' << r.mu_an << ','
        << r.error_pct << '\n';
  }
  return out.str();
}

inline constexpr int kCorridorPathPoints = 60;
inline constexpr double kApertureRadius = 0.5;  // m

struct CorridorReport {
  BakeResult bake;
  std::vector<Vec3> path;
  std::vector<size_t> dominant;  // the three largest clusters, largest first
  size_t dominant_samples = 0;
  double max_mu_deviation = 0.0;    // |mu - cluster mean mu| / cluster mean mu
  double max_rt60_deviation = 0.0;  // pointwise vs cluster RT60, any band
  std::vector<size_t> aperture_samples;
  bool apertures_isolated = true;
  double runtime_s = 0.0;

  double Coverage() const {
    return path.empty() ? 0.0
                        : static_cast<double>(dominant_samples) / static_cast<double>(path.size());
  }
};

// Bakes the three-room corridor with pointwise RT60 and summarizes the
// dominant clusters.
inline CorridorReport ValidateCorridor(BakeConfig config = {},
                                       const CorridorLayout& layout = {},
                                       int n_points = kCorridorPathPoints) {
  const auto start = std::chrono::steady_clock::now();
  CorridorReport report;
  const Scene scene = Scene::Create(CorridorMesh(layout), UniformMaterial(CorridorAbsorption()));
  report.path = layout.Path(n_points);
  config.pointwise_rt60 = true;
  report.bake = Bake(scene, report.path, config);

  const auto& clusters = report.bake.file.clusters.clusters;
  std::vector<size_t> order(clusters.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return clusters[a].Size() > clusters[b].Size();
  });
  order.resize(std::min<size_t>(3, order.size()));
  report.dominant = order;

  for (size_t c : report.dominant) {
    const Cluster& cluster = clusters[c];
    report.dominant_samples += cluster.Size();
    for (size_t i = cluster.begin; i < cluster.end; ++i) {
      const double mu = report.bake.file.samples[i].mu;
      report.max_mu_deviation =
          std::max(report.max_mu_deviation, std::abs(mu - cluster.mu_mean) / cluster.mu_mean);
      for (int b = 0; b < kNumBands; ++b) {
        const double ref = cluster.rt60->rt60[b];
        const double point = report.bake.pointwise_rt60[i].rt60[b];
        report.max_rt60_deviation =
            std::max(report.max_rt60_deviation, std::abs(point - ref) / ref);
      }
    }
  }
  for (size_t i = 0; i < report.path.size(); ++i) {
    if (layout.DistanceToAperture(report.path[i]) > kApertureRadius) continue;
    report.aperture_samples.push_back(i);
    const size_t c = report.bake.file.clusters.ClusterOf(i);
    if (std::find(report.dominant.begin(), report.dominant.end(), c) != report.dominant.end()) {
      report.apertures_isolated = false;
    }
  }
  report.runtime_s = pipeline_internal::MillisSince(start) / 1000.0;
  return report;
}

// ---- CSV inputs ---------------------------------------------------------------------

namespace pipeline_internal {

inline std::vector<std::vector<std::string>> ReadCsv(std::string_view text,
                                                     const std::vector<std::string>& header,
                                                     const std::string& what) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::vector<std::vector<std::string>> rows;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) {
      const auto b = field.find_first_not_of(" \t");
      const auto e = field.find_last_not_of(" \t");
      fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!seen_header) {
      if (fields != header) {
        std::string expected;
        for (size_t i = 0; i < header.size(); ++i) expected += (i ? "," : "") + header[i];
        throw InputError(what + ": expected header '" + expected + "'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw InputError(what + " line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    fields.push_back(std::to_string(line_no));
    rows.push_back(std::move(fields));
  }
  if (!seen_header) throw InputError(what + ": missing header");
  return rows;
}

inline double ToDouble(const std::string& s, const std::string& what, const std::string& line) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v)) {
    throw InputError(what + " line " + line + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace pipeline_internal

// Listener path, header `x,y,z`, meters.
inline std::vector<Vec3> ParsePathCsv(std::string_view text) {
  using namespace pipeline_internal;
  std::vector<Vec3> out;
  for (const auto& row : ReadCsv(text, {"x", "y", "z"}, "path csv")) {
    out.push_back({ToDouble(row[0], "path csv", row[3]), ToDouble(row[1], "path csv", row[3]),
                   ToDouble(row[2], "path csv", row[3])});
  }
  return out;
}

inline std::string PathCsv(std::span<const Vec3> path) {
  std::ostringstream out;
  out.precision(17);
  out << "x,y,z\n";
  for (const Vec3& p : path) out << p.x << ',' << p.y << ',' << p.z << '\n';
  return out.str();
}

struct ScheduleRow {
  double t_start = 0.0;
  size_t sample_index = 0;
};

// Listener schedule, header `t_start_s,sample_index`.
inline std::vector<ScheduleRow> ParseScheduleCsv(std::string_view text) {
  using namespace pipeline_internal;
  std::vector<ScheduleRow> out;
  for (const auto& row : ReadCsv(text, {"t_start_s", "sample_index"}, "schedule csv")) {
    const double t = ToDouble(row[0], "schedule csv", row[2]);
    const double idx = ToDouble(row[1], "schedule csv", row[2]);
    if (idx < 0 || idx != std::floor(idx)) {
      throw InputError("schedule csv line " + row[2] + ": bad sample index");
    }
    out.push_back({t, static_cast<size_t>(idx)});
  }
  return out;
}

// Maps a sample-index schedule onto clusters of a bake.
inline std::vector<ScheduleEntry> ClusterSchedule(const BakeFile& bake,
                                                  std::span<const ScheduleRow> rows) {
  std::vector<ScheduleEntry> out;
  for (const ScheduleRow& r : rows) {
    out.push_back({r.t_start, bake.clusters.ClusterOf(r.sample_index)});
  }
  return out;
}

}  // namespace preverb

#endif  // PREVERB_PIPELINE_H_
