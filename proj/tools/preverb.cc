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

// Command-line front end: bake, lookup, render, mfp, rt60, validate and
// export-fixture.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "preverb/acoustics.h"
#include "preverb/error.h"
#include "preverb/fixtures.h"
#include "preverb/pipeline.h"
#include "preverb/scene.h"
#include "preverb/tracer.h"
#include "preverb/wav.h"

namespace preverb {
namespace {

constexpr int kExitFailedCheck = 1;
constexpr int kExitInput = 2;
constexpr int kExitAcoustic = 3;

Vec3 ParsePoint(const std::string& text, const std::string& what) {
  std::vector<double> v;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != field.size() || !std::isfinite(x)) {
      throw InputError(what + ": bad coordinate '" + field + "'");
    }
    v.push_back(x);
  }
  if (v.size() != 3) throw InputError(what + ": expected x,y,z");
  return {v[0], v[1], v[2]};
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path + "'");
}

// Without a materials file every material named in the mesh gets a uniform
// absorption of 0.2, which is enough for the geometric quantities.
Scene LoadSceneArgs(const std::string& mesh_path, const std::string& materials_path) {
  if (!materials_path.empty()) return LoadSceneFiles(mesh_path, materials_path);
  Mesh mesh = ParseObj(ReadTextFile(mesh_path));
  std::set<std::string> names;
  for (const MeshFace& f : mesh.faces) names.insert(f.material);
  MaterialTable table;
  for (const std::string& name : names) table.materials.push_back({name, {0.2, 0.2, 0.2, 0.2}});
  return Scene::Create(std::move(mesh), table);
}

std::string FormatBands(const BandValues& v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  for (int b = 0; b < kNumBands; ++b) out << (b ? " " : "") << v[b];
  return out.str();
}

struct BakeArgs {
  std::string scene, materials, path, out;
  uint64_t seed = 1;
  std::string jnd_mode = "relative";
  unsigned threads = 0;
  bool running_mean = false;
  bool centroid = false;
  std::string cluster_csv;
};

int RunBake(const BakeArgs& a) {
  const Scene scene = LoadSceneFiles(a.scene, a.materials);
  const std::vector<Vec3> path = ParsePathCsv(ReadTextFile(a.path));
  BakeConfig config;
  config.seed = a.seed;
  config.threads = a.threads;
  config.clustering.mode = ParseJndMode(a.jnd_mode);
  config.clustering.running_mean_reference = a.running_mean;
  config.lr_source = a.centroid ? LrSource::kCentroid : LrSource::kFirstMember;
  const BakeResult r = Bake(scene, path, config);
  WriteTextFile(a.out, SerializeBake(r.file));
  if (!a.cluster_csv.empty()) {
    WriteTextFile(a.cluster_csv, ClusterCsv(r.file.samples, r.file.clusters));
  }
  const BakeStats& s = r.stats;
  std::printf("points %zu clusters %zu lr_simulations %zu lr_calls_saved %zu\n", s.n_points,
              s.n_clusters, s.lr_simulations, s.lr_calls_saved);
  std::printf("t_er_ms %.3f t_lr_ms %.3f\n", s.t_er_ms, s.t_lr_ms);
  return 0;
}

int RunLookup(const std::string& bake_path, std::optional<size_t> index,
              const std::string& pos, double radius) {
  const BakeFile bake = ParseBake(ReadTextFile(bake_path));
  const LookupResult r =
      index ? Lookup(bake, *index) : Lookup(bake, ParsePoint(pos, "--pos"), radius);
  std::printf("sample %zu cluster %zu distance_m %.6f\n", r.sample_index, r.cluster, r.distance);
  std::printf("rt60_s %s\n", FormatBands(r.rt60.rt60).c_str());
  return 0;
}

int RunRender(const std::string& bake_path, const std::string& dry_path,
              const std::string& schedule_path, const std::string& out_path, double mix) {
  const BakeFile bake = ParseBake(ReadTextFile(bake_path));
  const AudioBuffer dry = WavReadFile(dry_path);
  const auto rows = ParseScheduleCsv(ReadTextFile(schedule_path));
  for (const ScheduleRow& row : rows) {
    if (row.sample_index >= bake.samples.size()) {
      throw InputError("schedule references sample " + std::to_string(row.sample_index) +
                       " but the bake has " + std::to_string(bake.samples.size()));
    }
  }
  const auto schedule = ClusterSchedule(bake, rows);
  const AudioBuffer wet = RenderPath(dry, bake.clusters, schedule, mix);
  WavWriteFile(out_path, wet);
  const double peak = Peak(wet);
  std::printf("samples %zu peak %.4f\n", wet.samples.size(), peak);
  if (peak > 1.0) {
    std::fprintf(stderr, "warning: peak %.4f exceeds full scale; %zu samples clipped\n", peak,
                 CountClipped(wet));
  }
  return 0;
}

int RunMfp(const std::string& scene_path, const std::string& materials,
           const std::string& source_text, TraceConfig cfg, const std::string& dump) {
  const Scene scene = LoadSceneArgs(scene_path, materials);
  const Vec3 source = ParsePoint(source_text, "--source");
  const PathTraceResult trace = TraceSegments(scene, source, cfg);
  if (!dump.empty()) WriteTextFile(dump, SegmentsCsv(trace));
  const MfpEstimate est = MfpFromTrace(trace, source);
  std::printf("mu_er_m %.6f segments %zu rays_completed %zu\n", est.mu, est.segments_used,
              est.rays_completed);
  try {
    const VolumeAndArea va = AnalyticVolumeAndArea(scene);
    std::printf("mu_an_m %.6f volume_m3 %.6f area_m2 %.6f\n", MfpAnalytic(va.volume, va.area),
                va.volume, va.area);
  } catch (const AcousticError& e) {
    std::printf("mu_an_m n/a (%s)\n", e.what());
  }
  return 0;
}

int RunRt60(const std::string& scene_path, const std::string& materials,
            const std::string& source_text, const std::string& mode, TraceConfig cfg,
            const std::string& decay_csv) {
  const Scene scene = LoadSceneArgs(scene_path, materials);
  const Vec3 source = ParsePoint(source_text, "--source");
  RequireInside(scene, source);
  Rt60Estimate est;
  if (mode == "decay") {
    const EnergyDecayCurve curve = TraceEnergyDecay(scene, source, cfg);
    if (!decay_csv.empty()) WriteTextFile(decay_csv, DecayCurveCsv(curve));
    est = Rt60FromDecay(curve);
  } else {
    const VolumeAndArea va = AnalyticVolumeAndArea(scene);
    const BandValues a = MeanAbsorption(scene);
    est = mode == "sabine" ? Rt60Sabine(va.volume, va.area, a)
                           : Rt60FromMfp(MfpAnalytic(va.volume, va.area), a);
  }
  std::printf("method %s\nrt60_s %s\n", ToString(est.method), FormatBands(est.rt60).c_str());
  if (est.fit_r2) std::printf("fit_r2 %s\n", FormatBands(*est.fit_r2).c_str());
  return 0;
}

int RunValidate(const std::string& suite, uint64_t seed, unsigned threads,
                const std::string& csv_path) {
  if (suite == "table1") {
    const auto start = std::chrono::steady_clock::now();
    TraceConfig cfg;
    cfg.rng_seed = seed;
    cfg.threads = threads;
    const auto rows = ValidateTable1(cfg);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string csv = Table1Csv(rows);
    std::fputs(csv.c_str(), stdout);
    if (!csv_path.empty()) WriteTextFile(csv_path, csv);
    bool ok = true;
    for (const Table1Row& r : rows) ok = ok && r.error_pct <= 5.0;
    std::printf("runtime_s %.3f\n%s\n", seconds, ok ? "PASS" : "FAIL");
    return ok ? 0 : kExitFailedCheck;
  }
  BakeConfig config;
  config.seed = seed;
  config.threads = threads;
  const CorridorReport r = ValidateCorridor(config);
  const auto& clusters = r.bake.file.clusters.clusters;
  if (!csv_path.empty()) {
    WriteTextFile(csv_path, ClusterCsv(r.bake.file.samples, r.bake.file.clusters));
  }
  std::printf("cluster,begin,end,size,mu_mean_m,rt60_mean_s\n");
  for (size_t c = 0; c < clusters.size(); ++c) {
    std::printf("%zu,%zu,%zu,%zu,%.4f,%.4f\n", c, clusters[c].begin, clusters[c].end,
                clusters[c].Size(), clusters[c].mu_mean, clusters[c].rt60->Mean());
  }
  const BakeStats& s = r.bake.stats;
  std::printf("coverage %.3f max_mu_dev %.4f max_rt60_dev %.4f apertures_isolated %d\n",
              r.Coverage(), r.max_mu_deviation, r.max_rt60_deviation, r.apertures_isolated);
  std::printf("lr_simulations %zu n_clusters %zu t_er_ms %.3f t_lr_ms %.3f runtime_s %.2f\n",
              s.lr_simulations, s.n_clusters, s.t_er_ms, s.t_lr_ms, r.runtime_s);
  const bool ok = r.Coverage() >= 0.8 && r.max_mu_deviation <= 0.015 &&
                  r.max_rt60_deviation <= 0.05 && r.apertures_isolated &&
                  s.n_clusters <= 12 && s.lr_simulations == s.n_clusters;
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : kExitFailedCheck;
}

int RunExportFixture(const std::string& name, const std::string& dir) {
  Mesh mesh;
  MaterialTable materials;
  std::vector<Vec3> path;
  if (name == "corridor") {
    CorridorLayout layout;
    mesh = CorridorMesh(layout);
    materials = UniformMaterial(CorridorAbsorption());
    path = layout.Path(kCorridorPathPoints);
  } else {
    for (const Table1Case& c : Table1Cases()) {
      std::string id = c.shape;
      for (char& ch : id) ch = ch == ' ' ? '_' : static_cast<char>(std::tolower(ch));
      id.erase(std::remove(id.begin(), id.end(), '.'), id.end());
      if (id != name) continue;
      mesh = c.mesh;
      materials = UniformMaterial(0.2);
      path = {c.source};
    }
    if (mesh.faces.empty()) throw InputError("unknown fixture '" + name + "'");
  }
  const Scene scene = Scene::Create(mesh, materials);
  const std::string base = dir + "/" + name;
  WriteTextFile(base + ".obj", WriteObj(scene));
  WriteTextFile(base + ".materials.json", SerializeMaterials(scene.Materials()));
  WriteTextFile(base + ".path.csv", PathCsv(path));
  std::printf("wrote %s.{obj,materials.json,path.csv}\n", base.c_str());
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Perceptual late-reverberation baking and rendering"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  BakeArgs bake;
  auto* bake_cmd = app.add_subcommand("bake", "Bake per-cluster RT60 along a listener path");
  bake_cmd->add_option("--scene", bake.scene, "OBJ mesh")->required();
  bake_cmd->add_option("--materials", bake.materials, "Materials JSON")->required();
  bake_cmd->add_option("--path", bake.path, "Path CSV (x,y,z)")->required();
  bake_cmd->add_option("--out", bake.out, "Bake file to write")->required();
  bake_cmd->add_option("--seed", bake.seed, "RNG seed")->capture_default_str();
  bake_cmd->add_option("--jnd-mode", bake.jnd_mode, "Clustering threshold")
      ->check(CLI::IsMember({"relative", "absolute"}))
      ->capture_default_str();
  bake_cmd->add_option("--threads", bake.threads, "Worker threads, 0 = all cores")
      ->capture_default_str();
  bake_cmd->add_flag("--running-mean", bake.running_mean, "Compare against the running mean");
  bake_cmd->add_flag("--centroid", bake.centroid, "Late-reverb source at cluster centroid");
  bake_cmd->add_option("--cluster-csv", bake.cluster_csv, "Also write the cluster map CSV");

  std::string lookup_bake, lookup_pos;
  std::optional<size_t> lookup_index;
  double lookup_radius = 1.0;
  auto* lookup_cmd = app.add_subcommand("lookup", "Cluster and RT60 for a sample or position");
  lookup_cmd->add_option("--bake", lookup_bake)->required();
  auto* index_opt = lookup_cmd->add_option("--index", lookup_index, "Baked sample index");
  auto* pos_opt = lookup_cmd->add_option("--pos", lookup_pos, "Position x,y,z");
  index_opt->excludes(pos_opt);
  lookup_cmd->add_option("--radius", lookup_radius, "Coverage radius, m")->capture_default_str();

  std::string render_bake, render_dry, render_schedule, render_out;
  double render_mix = kDefaultWetDryMix;
  auto* render_cmd = app.add_subcommand("render", "Apply baked reverb along a schedule");
  render_cmd->add_option("--bake", render_bake)->required();
  render_cmd->add_option("--dry", render_dry, "Mono 16-bit PCM WAV")->required();
  render_cmd->add_option("--schedule", render_schedule, "CSV t_start_s,sample_index")
      ->required();
  render_cmd->add_option("--out", render_out)->required();
  render_cmd->add_option("--mix", render_mix, "Wet/dry mix")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  std::string scene_path, materials_path, source, dump, decay_csv;
  std::string rt60_mode = "sabine";
  TraceConfig er_cfg;
  TraceConfig lr_cfg{500, 300, 1, 343.0, 0};
  er_cfg.threads = 0;
  auto* mfp_cmd = app.add_subcommand("mfp", "Mean-free path from early reflections");
  mfp_cmd->add_option("--scene", scene_path)->required();
  mfp_cmd->add_option("--materials", materials_path);
  mfp_cmd->add_option("--source", source, "x,y,z")->required();
  mfp_cmd->add_option("--rays", er_cfg.n_rays)->capture_default_str();
  mfp_cmd->add_option("--bounces", er_cfg.n_bounces)->capture_default_str();
  mfp_cmd->add_option("--seed", er_cfg.rng_seed)->capture_default_str();
  mfp_cmd->add_option("--dump-segments", dump, "Write ray_index,bounce_index,length_m CSV");

  auto* rt60_cmd = app.add_subcommand("rt60", "Reverberation time estimate");
  rt60_cmd->add_option("--scene", scene_path)->required();
  rt60_cmd->add_option("--materials", materials_path);
  rt60_cmd->add_option("--source", source, "x,y,z")->required();
  rt60_cmd->add_option("--mode", rt60_mode)
      ->check(CLI::IsMember({"sabine", "eyring", "decay"}))
      ->capture_default_str();
  rt60_cmd->add_option("--rays", lr_cfg.n_rays)->capture_default_str();
  rt60_cmd->add_option("--bounces", lr_cfg.n_bounces)->capture_default_str();
  rt60_cmd->add_option("--seed", lr_cfg.rng_seed)->capture_default_str();
  rt60_cmd->add_option("--decay-csv", decay_csv, "Write the integrated decay curve");

  std::string suite = "table1", validate_csv;
  uint64_t validate_seed = 1;
  unsigned validate_threads = 0;
  auto* validate_cmd = app.add_subcommand("validate", "Run a validation suite");
  validate_cmd->add_option("--suite", suite)
      ->check(CLI::IsMember({"table1", "corridor"}))
      ->required();
  validate_cmd->add_option("--seed", validate_seed)->capture_default_str();
  validate_cmd->add_option("--threads", validate_threads)->capture_default_str();
  validate_cmd->add_option("--csv", validate_csv, "Write the suite's CSV output");

  std::string fixture = "corridor", fixture_dir = ".";
  auto* export_cmd = app.add_subcommand("export-fixture", "Write a built-in scene to disk");
  export_cmd->add_option("--name", fixture, "corridor, cube, rect_prism, sq_pyramid, ...")
      ->capture_default_str();
  export_cmd->add_option("--dir", fixture_dir)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*bake_cmd) return RunBake(bake);
    if (*lookup_cmd) {
      if (!lookup_index && lookup_pos.empty()) throw InputError("need --index or --pos");
      return RunLookup(lookup_bake, lookup_index, lookup_pos, lookup_radius);
    }
    if (*render_cmd) {
      return RunRender(render_bake, render_dry, render_schedule, render_out, render_mix);
    }
    if (*mfp_cmd) return RunMfp(scene_path, materials_path, source, er_cfg, dump);
    if (*rt60_cmd) {
      return RunRt60(scene_path, materials_path, source, rt60_mode, lr_cfg, decay_csv);
    }
    if (*validate_cmd) return RunValidate(suite, validate_seed, validate_threads, validate_csv);
    if (*export_cmd) return RunExportFixture(fixture, fixture_dir);
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const AcousticError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitAcoustic;
  }
  return 0;
}

}  // namespace
}  // namespace preverb

int main(int argc, char** argv) { return preverb::Main(argc, argv); }
