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

#ifndef PREVERB_SCENE_H_
#define PREVERB_SCENE_H_

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "preverb/bvh.h"
#include "preverb/error.h"
#include "preverb/geometry.h"

namespace preverb {

inline constexpr int kNumBands = 4;

using BandValues = std::array<double, kNumBands>;

// Five strictly increasing frequency edges delimiting the four bands.
struct BandLayout {
  std::array<double, kNumBands + 1> edges_hz{0.0, 176.0, 775.0, 3408.0,
                                             22050.0};

  void Validate() const {
    for (int i = 0; i < kNumBands; ++i) {
      if (!(edges_hz[i] < edges_hz[i + 1])) {
        throw InputError("band edges must be strictly increasing");
      }
    }
  }

  friend bool operator==(const BandLayout&, const BandLayout&) = default;
};

struct Material {
  std::string name;
  BandValues absorption{};

  // Absorption of 1 makes log(1 - a) singular; it is rejected.
  void Validate() const {
    for (double a : absorption) {
      if (!(a >= 0.0 && a < 1.0)) {
        throw InputError("material '" + name +
                         "': absorption coefficients must lie in [0, 1)");
      }
    }
  }
};

struct MaterialTable {
  BandLayout bands;
  std::vector<Material> materials;

  std::optional<uint32_t> Find(std::string_view name) const {
    for (uint32_t i = 0; i < materials.size(); ++i) {
      if (materials[i].name == name) return i;
    }
    return std::nullopt;
  }
};

// Minimum accepted triangle area in m^2.
inline constexpr double kMinTriangleArea = 1e-12;

struct Triangle {
  Vec3 v0;
  Vec3 v1;
  Vec3 v2;
  uint32_t material_id = 0;
  // Indices into Scene::Vertices(); used for topology checks.
  std::array<uint32_t, 3> vertex_ids{};

  double Area() const { return 0.5 * Length(Cross(v1 - v0, v2 - v0)); }
  Vec3 GeometricNormal() const { return Normalize(Cross(v1 - v0, v2 - v0)); }
};

// Face as it comes out of a mesh source, before materials are resolved.
struct MeshFace {
  std::array<uint32_t, 3> vertex_ids{};
  std::string material;
  int line = 0;  // 1-based source line, 0 when generated
};

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<MeshFace> faces;
};

struct SurfaceHit {
  double t = 0.0;
  Vec3 point;
  Vec3 normal;  // unit, facing the incoming ray
  uint32_t material_id = 0;
  uint32_t triangle = 0;
};

struct VolumeAndArea {
  double volume = 0.0;
  double area = 0.0;
};

// Immutable triangle scene with an acceleration structure. All queries are
// const and safe to call from several threads.
class Scene {
 public:
  static Scene Create(const Mesh& mesh, MaterialTable table) {
    table.bands.Validate();
    for (const Material& m : table.materials) m.Validate();
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
      if (!IsFinite(mesh.vertices[i])) {
        throw InputError("vertex " + std::to_string(i + 1) + " is not finite");
      }
    }

    Scene scene;
    scene.vertices_ = mesh.vertices;
    scene.table_ = std::move(table);
    scene.triangles_.reserve(mesh.faces.size());
    std::vector<TrianglePoints> points;
    points.reserve(mesh.faces.size());
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
      const MeshFace& face = mesh.faces[f];
      for (uint32_t id : face.vertex_ids) {
        if (id >= mesh.vertices.size()) {
          throw InputError(Where(face, f) + "vertex index out of range");
        }
      }
      const auto material = scene.table_.Find(face.material);
      if (!material) {
        throw InputError(Where(face, f) + "unknown material '" +
                         face.material + "'");
      }
      Triangle tri{mesh.vertices[face.vertex_ids[0]],
                   mesh.vertices[face.vertex_ids[1]],
                   mesh.vertices[face.vertex_ids[2]], *material,
                   face.vertex_ids};
      if (!(tri.Area() > kMinTriangleArea)) {
        throw InputError(Where(face, f) + "degenerate triangle (area " +
                         std::to_string(tri.Area()) + " m^2)");
      }
      scene.bounds_.Grow(tri.v0);
      scene.bounds_.Grow(tri.v1);
      scene.bounds_.Grow(tri.v2);
      points.push_back({tri.v0, tri.v1, tri.v2});
      scene.triangles_.push_back(tri);
    }
    scene.bvh_ = Bvh(std::move(points));
    return scene;
  }

  std::span<const Triangle> Triangles() const { return triangles_; }
  std::span<const Vec3> Vertices() const { return vertices_; }
  const MaterialTable& Materials() const { return table_; }
  const BandLayout& Bands() const { return table_.bands; }
  const Aabb& Bounds() const { return bounds_; }
  const Bvh& Accelerator() const { return bvh_; }

  const Material& MaterialOf(const SurfaceHit& hit) const {
    return table_.materials[hit.material_id];
  }

  // Nearest hit with t > t_min. `direction` must be unit length.
  std::optional<SurfaceHit> Intersect(const Vec3& origin, const Vec3& direction,
                                      double t_min = 0.0) const {
    return MakeHit(bvh_.Intersect(origin, direction, t_min), origin, direction);
  }

  // Same contract as Intersect, without the BVH.
  std::optional<SurfaceHit> IntersectExhaustive(const Vec3& origin,
                                                const Vec3& direction,
                                                double t_min = 0.0) const {
    return MakeHit(preverb::IntersectExhaustive(bvh_.Triangles(), origin,
                                                direction, t_min),
                   origin, direction);
  }

 private:
  Scene() = default;

  static std::string Where(const MeshFace& face, size_t index) {
    std::string s = "face " + std::to_string(index);
    if (face.line > 0) s += " (line " + std::to_string(face.line) + ")";
    return s + ": ";
  }

  std::optional<SurfaceHit> MakeHit(const PrimitiveHit& prim, const Vec3& origin,
                                    const Vec3& direction) const {
    if (!prim.Valid()) return std::nullopt;
    const Triangle& tri = triangles_[prim.primitive];
    Vec3 n = tri.GeometricNormal();
    if (Dot(n, direction) > 0.0) n = -n;
    return SurfaceHit{prim.t, origin + prim.t * direction, n, tri.material_id,
                      prim.primitive};
  }

  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  MaterialTable table_;
  Aabb bounds_;
  Bvh bvh_;
};

// Closed-mesh volume (signed tetrahedron sum) and total surface area. Every
// undirected edge must be used by exactly two faces, once in each direction.
inline VolumeAndArea AnalyticVolumeAndArea(const Scene& scene) {
  std::map<std::pair<uint32_t, uint32_t>, int> directed;
  for (const Triangle& tri : scene.Triangles()) {
    for (int k = 0; k < 3; ++k) {
      ++directed[{tri.vertex_ids[k], tri.vertex_ids[(k + 1) % 3]}];
    }
  }
  std::vector<std::pair<uint32_t, uint32_t>> bad;
  for (const auto& [edge, count] : directed) {
    const auto reverse = directed.find({edge.second, edge.first});
    const int back = reverse == directed.end() ? 0 : reverse->second;
    if (count != 1 || back != 1) bad.push_back(edge);
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "mesh is not closed and consistently oriented; " << bad.size()
        << " boundary edge(s):";
    for (size_t i = 0; i < bad.size() && i < 16; ++i) {
      msg << " (" << bad[i].first + 1 << "," << bad[i].second + 1 << ")";
    }
    if (bad.size() > 16) msg << " ...";
    throw AcousticError(msg.str());
  }

  VolumeAndArea out;
  for (const Triangle& tri : scene.Triangles()) {
    out.volume += Dot(tri.v0, Cross(tri.v1, tri.v2)) / 6.0;
    out.area += tri.Area();
  }
  out.volume = std::abs(out.volume);
  if (!(out.volume > 0.0)) throw AcousticError("mesh encloses zero volume");
  return out;
}

// Parses the supported Wavefront subset: `v x y z`, `f a b c` (1-based,
// negative indices relative to the vertex count, `a/b/c` forms accepted with
// only the position index used) and `usemtl name`. Faces seen before any
// `usemtl` use the material named "default". Other statements are ignored.
inline Mesh ParseObj(std::string_view text) {
  Mesh mesh;
  std::string material = "default";
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) -> InputError {
    return InputError("obj line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z)) throw fail("expected 'v x y z'");
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<long> ids;
      std::string token;
      while (ls >> token) {
        const std::string head = token.substr(0, token.find('/'));
        size_t used = 0;
        long id = 0;
        try {
          id = std::stol(head, &used);
        } catch (const std::exception&) {
          throw fail("bad face index '" + token + "'");
        }
        if (used != head.size() || id == 0) {
          throw fail("bad face index '" + token + "'");
        }
        if (id < 0) id += static_cast<long>(mesh.vertices.size()) + 1;
        if (id < 1 || id > static_cast<long>(mesh.vertices.size())) {
          throw fail("face index " + head + " out of range");
        }
        ids.push_back(id - 1);
      }
      if (ids.size() != 3) {
        throw fail("only triangular faces are supported (got " +
                   std::to_string(ids.size()) + " vertices)");
      }
      mesh.faces.push_back({{static_cast<uint32_t>(ids[0]),
                             static_cast<uint32_t>(ids[1]),
                             static_cast<uint32_t>(ids[2])},
                            material,
                            line_no});
    } else if (tag == "usemtl") {
      if (!(ls >> material)) throw fail("usemtl without a name");
    }
  }
  return mesh;
}

// Material sidecar, JSON:
//   {"band_edges_hz": [0, 176, 775, 3408, 22050],   (optional)
//    "materials": {"name": [a0, a1, a2, a3], ...}}
inline MaterialTable ParseMaterials(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("materials: ") + e.what());
  }
  MaterialTable table;
  try {
    if (doc.contains("band_edges_hz")) {
      const auto& edges = doc.at("band_edges_hz");
      if (!edges.is_array() || edges.size() != kNumBands + 1) {
        throw InputError("materials: band_edges_hz needs 5 entries");
      }
      for (int i = 0; i <= kNumBands; ++i) {
        table.bands.edges_hz[i] = edges[i].get<double>();
      }
    }
    for (const auto& [name, coeffs] : doc.at("materials").items()) {
      if (!coeffs.is_array() || coeffs.size() != kNumBands) {
        throw InputError("materials: '" + name +
                         "' needs exactly 4 absorption coefficients");
      }
      Material m{name, {}};
      for (int b = 0; b < kNumBands; ++b) m.absorption[b] = coeffs[b].get<double>();
      table.materials.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("materials: ") + e.what());
  }
  table.bands.Validate();
  for (const Material& m : table.materials) m.Validate();
  return table;
}

inline std::string SerializeMaterials(const MaterialTable& table) {
  nlohmann::ordered_json doc;
  doc["band_edges_hz"] = table.bands.edges_hz;
  nlohmann::ordered_json mats = nlohmann::ordered_json::object();
  for (const Material& m : table.materials) mats[m.name] = m.absorption;
  doc["materials"] = mats;
  return doc.dump(2) + "\n";
}

inline Scene LoadScene(std::string_view mesh_text, std::string_view materials_text) {
  return Scene::Create(ParseObj(mesh_text), ParseMaterials(materials_text));
}

inline std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Scene LoadSceneFiles(const std::string& mesh_path,
                            const std::string& materials_path) {
  return LoadScene(ReadTextFile(mesh_path), ReadTextFile(materials_path));
}

// Writes the mesh back out in the same subset ParseObj accepts.
inline std::string WriteObj(const Scene& scene) {
  std::ostringstream out;
  out.precision(17);
  for (const Vec3& v : scene.Vertices()) {
    out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  }
  std::optional<uint32_t> current;
  for (const Triangle& tri : scene.Triangles()) {
    if (current != tri.material_id) {
      current = tri.material_id;
      out << "usemtl " << scene.Materials().materials[*current].name << '\n';
    }
    out << "f " << tri.vertex_ids[0] + 1 << ' ' << tri.vertex_ids[1] + 1 << ' '
        << tri.vertex_ids[2] + 1 << '\n';
  }
  return out.str();
}

}  // namespace preverb

#endif  // PREVERB_SCENE_H_
