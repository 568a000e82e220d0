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

#ifndef PREVERB_FIXTURES_H_
#define PREVERB_FIXTURES_H_

// Procedural test scenes: boxes, a square pyramid, a room with pillars and a
// three-room corridor. All meshes are closed with outward-facing triangles.

#include <algorithm>
#include <array>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "preverb/scene.h"

namespace preverb {

// Accumulates triangles, merging bit-identical vertex positions so the
// resulting mesh has shared edges.
class MeshBuilder {
 public:
  uint32_t Vertex(const Vec3& p) {
    const auto key = std::make_tuple(p.x, p.y, p.z);
    const auto [it, inserted] =
        index_.try_emplace(key, static_cast<uint32_t>(mesh_.vertices.size()));
    if (inserted) mesh_.vertices.push_back(p);
    return it->second;
  }

  void Triangle(const Vec3& a, const Vec3& b, const Vec3& c,
                const std::string& material) {
    mesh_.faces.push_back({{Vertex(a), Vertex(b), Vertex(c)}, material, 0});
  }

  // Counter-clockwise quad a-b-c-d, split along a-c.
  void Quad(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
            const std::string& material) {
    Triangle(a, b, c, material);
    Triangle(a, c, d, material);
  }

  const Mesh& Get() const { return mesh_; }

 private:
  Mesh mesh_;
  std::map<std::tuple<double, double, double>, uint32_t> index_;
};

inline MaterialTable UniformMaterial(double absorption,
                                     const std::string& name = "default") {
  MaterialTable table;
  table.materials.push_back({name, {absorption, absorption, absorption, absorption}});
  return table;
}

inline MaterialTable UniformMaterial(const BandValues& absorption,
                                     const std::string& name = "default") {
  MaterialTable table;
  table.materials.push_back({name, absorption});
  return table;
}

// Axis-aligned box region [min, max].
struct Box {
  Vec3 min;
  Vec3 max;

  bool Contains(const Vec3& p) const {
    return p.x > min.x && p.x < max.x && p.y > min.y && p.y < max.y &&
           p.z > min.z && p.z < max.z;
  }
  double Volume() const {
    const Vec3 e = max - min;
    return e.x * e.y * e.z;
  }
};

// Boundary of (union of `air` boxes) minus (union of `solid` boxes), meshed
// on the rectilinear grid spanned by all box faces. Normals point out of the
// air region. Boxes must not touch along a single edge only, which would make
// the surface non-manifold.
inline Mesh RectilinearAirMesh(const std::vector<Box>& air,
                               const std::vector<Box>& solid,
                               const std::string& material = "default") {
  std::array<std::vector<double>, 3> cuts;
  for (const auto* list : {&air, &solid}) {
    for (const Box& b : *list) {
      for (int a = 0; a < 3; ++a) {
        cuts[a].push_back(b.min[a]);
        cuts[a].push_back(b.max[a]);
      }
    }
  }
  for (auto& c : cuts) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  const std::array<int, 3> n{static_cast<int>(cuts[0].size()) - 1,
                             static_cast<int>(cuts[1].size()) - 1,
                             static_cast<int>(cuts[2].size()) - 1};
  std::vector<char> is_air(static_cast<size_t>(std::max(0, n[0] * n[1] * n[2])), 0);
  auto cell = [&](int i, int j, int k) -> size_t {
    return (static_cast<size_t>(k) * n[1] + j) * n[0] + i;
  };
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        const Vec3 c{0.5 * (cuts[0][i] + cuts[0][i + 1]),
                     0.5 * (cuts[1][j] + cuts[1][j + 1]),
                     0.5 * (cuts[2][k] + cuts[2][k + 1])};
        const bool in_air = std::any_of(air.begin(), air.end(),
                                        [&](const Box& b) { return b.Contains(c); });
        const bool in_solid = std::any_of(
            solid.begin(), solid.end(), [&](const Box& b) { return b.Contains(c); });
        is_air[cell(i, j, k)] = in_air && !in_solid;
      }
    }
  }
  auto air_at = [&](std::array<int, 3> idx) {
    for (int a = 0; a < 3; ++a) {
      if (idx[a] < 0 || idx[a] >= n[a]) return false;
    }
    return is_air[cell(idx[0], idx[1], idx[2])] != 0;
  };

  MeshBuilder builder;
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        const std::array<int, 3> idx{i, j, k};
        if (!air_at(idx)) continue;
        for (int axis = 0; axis < 3; ++axis) {
          for (int side : {-1, 1}) {
            std::array<int, 3> nb = idx;
            nb[axis] += side;
            if (air_at(nb)) continue;
            const int u = (axis + 1) % 3;
            const int v = (axis + 2) % 3;
            auto corner = [&](int du, int dv) {
              Vec3 p;
              p[axis] = cuts[axis][idx[axis] + (side > 0 ? 1 : 0)];
              p[u] = cuts[u][idx[u] + du];
              p[v] = cuts[v][idx[v] + dv];
              return p;
            };
            // (u, v, axis) is a right-handed frame, so this loop faces +axis.
            if (side > 0) {
              builder.Quad(corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1),
                           material);
            } else {
              builder.Quad(corner(0, 0), corner(0, 1), corner(1, 1), corner(1, 0),
                           material);
            }
          }
        }
      }
    }
  }
  return builder.Get();
}

inline Mesh BoxMesh(const Vec3& min, const Vec3& max,
                    const std::string& material = "default") {
  return RectilinearAirMesh({{min, max}}, {}, material);
}

// Square pyramid: base side `base` centered on the origin in z = 0, apex at
// (0, 0, height).
inline Mesh PyramidMesh(double base, double height,
                        const std::string& material = "default") {
  const double h = 0.5 * base;
  const Vec3 c0{-h, -h, 0}, c1{h, -h, 0}, c2{h, h, 0}, c3{-h, h, 0};
  const Vec3 apex{0, 0, height};
  MeshBuilder b;
  b.Quad(c0, c3, c2, c1, material);  // base, facing -z
  b.Triangle(c0, c1, apex, material);
  b.Triangle(c1, c2, apex, material);
  b.Triangle(c2, c3, apex, material);
  b.Triangle(c3, c0, apex, material);
  return b.Get();
}

// 12 m x 6 m x 5 m hall with eight floor-to-ceiling square pillars in two
// rows of four.
struct PillarRoomLayout {
  Vec3 size{12.0, 6.0, 5.0};
  double pillar_width = 0.79;
  std::array<double, 4> pillar_x{1.5, 4.5, 7.5, 10.5};
  std::array<double, 2> pillar_y{2.0, 4.0};

  std::vector<Box> Pillars() const {
    std::vector<Box> out;
    const double w = 0.5 * pillar_width;
    for (double y : pillar_y) {
      for (double x : pillar_x) {
        out.push_back({{x - w, y - w, 0.0}, {x + w, y + w, size.z}});
      }
    }
    return out;
  }

  Vec3 Source() const { return size * 0.5; }
};

inline Mesh PillarRoomMesh(const PillarRoomLayout& layout = {},
                           const std::string& material = "default") {
  return RectilinearAirMesh({{{0, 0, 0}, layout.size}}, layout.Pillars(), material);
}

// Three rooms of 135, 256 and 125 m^3 in a row along +x, joined by doorways
// through 0.4 m thick walls. The listener path runs along the x axis through
// both doorways.
struct CorridorLayout {
  std::array<Box, 3> rooms{{
      {{0.0, 0.0, 0.0}, {9.0, 5.0, 3.0}},     // 9 x 5 x 3 = 135
      {{9.4, -1.5, 0.0}, {17.4, 6.5, 4.0}},   // 8 x 8 x 4 = 256
      {{17.8, 0.0, 0.0}, {27.8, 5.0, 2.5}},   // 10 x 5 x 2.5 = 125
  }};
  double door_width = 0.6;
  double door_height = 1.6;
  double path_y = 2.5;
  double path_z = 1.5;
  double path_start_x = 0.5;
  double path_end_x = 27.3;

  std::array<Box, 2> Doors() const {
    std::array<Box, 2> out;
    for (int d = 0; d < 2; ++d) {
      out[d] = {{rooms[d].max.x, path_y - 0.5 * door_width, 0.0},
                {rooms[d + 1].min.x, path_y + 0.5 * door_width, door_height}};
    }
    return out;
  }

  // Evenly spaced listener positions from path_start_x to path_end_x.
  std::vector<Vec3> Path(int count) const {
    std::vector<Vec3> out;
    for (int i = 0; i < count; ++i) {
      const double s = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      out.push_back({path_start_x + s * (path_end_x - path_start_x), path_y, path_z});
    }
    return out;
  }

  // Distance along x from `p` to the nearest doorway slab.
  double DistanceToAperture(const Vec3& p) const {
    double best = 1e300;
    for (const Box& d : Doors()) {
      const double dx = std::max({d.min.x - p.x, 0.0, p.x - d.max.x});
      best = std::min(best, dx);
    }
    return best;
  }

  // Index of the room containing `p`, or -1 inside a doorway.
  int RoomOf(const Vec3& p) const {
    for (int r = 0; r < 3; ++r) {
      if (rooms[r].Contains(p)) return r;
    }
    return -1;
  }
};

inline Mesh CorridorMesh(const CorridorLayout& layout = {},
                         const std::string& material = "default") {
  std::vector<Box> air(layout.rooms.begin(), layout.rooms.end());
  for (const Box& d : layout.Doors()) air.push_back(d);
  return RectilinearAirMesh(air, {}, material);
}

// Mid-band absorption used by the corridor fixture and the bake examples.
inline BandValues CorridorAbsorption() { return {0.10, 0.15, 0.20, 0.25}; }

}  // namespace preverb

#endif  // PREVERB_FIXTURES_H_
