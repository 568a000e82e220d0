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

#ifndef PREVERB_BVH_H_
#define PREVERB_BVH_H_

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "preverb/geometry.h"

namespace preverb {

// Vertex positions of one triangle.
struct TrianglePoints {
  Vec3 v0;
  Vec3 v1;
  Vec3 v2;
};

// Barycentric tolerance for edge hits. Slightly negative so rays through a
// shared edge or vertex always see at least one of the incident triangles.
inline constexpr double kEdgeTolerance = 1e-12;

// Moller-Trumbore ray/triangle test. Returns the ray parameter of the hit if
// it lies in (t_min, t_max], nullopt otherwise. Two-sided.
inline std::optional<double> IntersectTriangle(const TrianglePoints& tri,
                                               const Vec3& origin,
                                               const Vec3& direction,
                                               double t_min, double t_max) {
  const Vec3 e1 = tri.v1 - tri.v0;
  const Vec3 e2 = tri.v2 - tri.v0;
  const Vec3 p = Cross(direction, e2);
  const double det = Dot(e1, p);
  if (det == 0.0) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 s = origin - tri.v0;
  const double u = Dot(s, p) * inv_det;
  if (u < -kEdgeTolerance || u > 1.0 + kEdgeTolerance) return std::nullopt;
  const Vec3 q = Cross(s, e1);
  const double v = Dot(direction, q) * inv_det;
  if (v < -kEdgeTolerance || u + v > 1.0 + kEdgeTolerance) return std::nullopt;
  const double t = Dot(e2, q) * inv_det;
  if (!(t > t_min && t <= t_max)) return std::nullopt;
  return t;
}

// Nearest hit along a ray. Ties in t resolve to the lower triangle index so
// that every traversal order reports the same primitive.
struct PrimitiveHit {
  double t = std::numeric_limits<double>::infinity();
  uint32_t primitive = std::numeric_limits<uint32_t>::max();

  bool Valid() const { return primitive != std::numeric_limits<uint32_t>::max(); }

  bool Improves(double candidate_t, uint32_t candidate) const {
    return candidate_t < t || (candidate_t == t && candidate < primitive);
  }
};

// Reference query: tests every triangle. Used as the oracle for Bvh.
inline PrimitiveHit IntersectExhaustive(std::span<const TrianglePoints> tris,
                                        const Vec3& origin,
                                        const Vec3& direction, double t_min) {
  PrimitiveHit best;
  for (uint32_t i = 0; i < tris.size(); ++i) {
    const auto t = IntersectTriangle(tris[i], origin, direction, t_min,
                                     std::numeric_limits<double>::infinity());
    if (t && best.Improves(*t, i)) {
      best.t = *t;
      best.primitive = i;
    }
  }
  return best;
}

// Binned-SAH bounding volume hierarchy over a fixed triangle list. Nodes are
// stored depth-first; the left child of an interior node immediately follows
// it.
class Bvh {
 public:
  Bvh() = default;

  explicit Bvh(std::vector<TrianglePoints> tris) : tris_(std::move(tris)) {
    order_.resize(tris_.size());
    for (uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
    if (tris_.empty()) return;
    std::vector<Aabb> boxes(tris_.size());
    std::vector<Vec3> centroids(tris_.size());
    for (size_t i = 0; i < tris_.size(); ++i) {
      boxes[i].Grow(tris_[i].v0);
      boxes[i].Grow(tris_[i].v1);
      boxes[i].Grow(tris_[i].v2);
      centroids[i] = boxes[i].Center();
    }
    nodes_.reserve(2 * tris_.size());
    Build(boxes, centroids, 0, static_cast<uint32_t>(tris_.size()));
  }

  const Aabb& Bounds() const { return nodes_.empty() ? empty_ : nodes_[0].box; }
  size_t NodeCount() const { return nodes_.size(); }
  std::span<const uint32_t> PrimitiveOrder() const { return order_; }
  std::span<const TrianglePoints> Triangles() const { return tris_; }

  PrimitiveHit Intersect(const Vec3& origin, const Vec3& direction,
                         double t_min) const {
    PrimitiveHit best;
    if (nodes_.empty()) return best;
    const Vec3 inv{1.0 / direction.x, 1.0 / direction.y, 1.0 / direction.z};
    std::array<uint32_t, 128> stack;
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const uint32_t node_index = stack[--top];
      const Node& node = nodes_[node_index];
      if (!HitsBox(node.box, origin, inv, t_min, best.t)) continue;
      if (node.count > 0) {
        for (uint32_t k = node.first; k < node.first + node.count; ++k) {
          const uint32_t prim = order_[k];
          const auto t =
              IntersectTriangle(tris_[prim], origin, direction, t_min, best.t);
          if (t && best.Improves(*t, prim)) {
            best.t = *t;
            best.primitive = prim;
          }
        }
        continue;
      }
      const uint32_t left = node_index + 1;
      const uint32_t right = node.first;
      // Near child goes on top of the stack.
      if (direction[node.axis] < 0.0) {
        stack[top++] = left;
        stack[top++] = right;
      } else {
        stack[top++] = right;
        stack[top++] = left;
      }
    }
    return best;
  }

 private:
  struct Node {
    Aabb box;
    uint32_t first = 0;   // leaf: first index into order_; interior: right child
    uint32_t count = 0;   // 0 for interior nodes
    int axis = 0;
  };

  static constexpr uint32_t kMaxLeafSize = 4;
  static constexpr int kBins = 12;

  static bool HitsBox(const Aabb& box, const Vec3& origin, const Vec3& inv,
                      double t_min, double t_max) {
    double lo = t_min;
    double hi = t_max;
    for (int a = 0; a < 3; ++a) {
      double t0 = (box.min[a] - origin[a]) * inv[a];
      double t1 = (box.max[a] - origin[a]) * inv[a];
      if (t0 > t1) std::swap(t0, t1);
      // NaN (0 * inf) from rays parallel to and on a slab plane: keep range.
      if (!(t0 <= t1)) continue;
      lo = std::max(lo, t0);
      hi = std::min(hi, t1 * (1.0 + 4e-16) + 1e-12);
      if (lo > hi) return false;
    }
    return true;
  }

  uint32_t Build(const std::vector<Aabb>& boxes,
                 const std::vector<Vec3>& centroids, uint32_t begin,
                 uint32_t end) {
    const uint32_t index = static_cast<uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Aabb box, centroid_box;
    for (uint32_t k = begin; k < end; ++k) {
      box.Grow(boxes[order_[k]]);
      centroid_box.Grow(centroids[order_[k]]);
    }
    nodes_[index].box = box;
    const uint32_t n = end - begin;
    const int axis = centroid_box.LongestAxis();
    const double lo = centroid_box.min[axis];
    const double extent = centroid_box.max[axis] - lo;
    if (n <= kMaxLeafSize || extent <= 0.0) {
      nodes_[index].first = begin;
      nodes_[index].count = n;
      return index;
    }

    std::array<Aabb, kBins> bin_box;
    std::array<uint32_t, kBins> bin_count{};
    auto bin_of = [&](uint32_t prim) {
      const int b = static_cast<int>(kBins * (centroids[prim][axis] - lo) / extent);
      return std::clamp(b, 0, kBins - 1);
    };
    for (uint32_t k = begin; k < end; ++k) {
      const int b = bin_of(order_[k]);
      bin_box[b].Grow(boxes[order_[k]]);
      ++bin_count[b];
    }
    double best_cost = std::numeric_limits<double>::infinity();
    int best_split = -1;
    for (int split = 1; split < kBins; ++split) {
      Aabb left, right;
      uint32_t nl = 0, nr = 0;
      for (int b = 0; b < split; ++b) {
        left.Grow(bin_box[b]);
        nl += bin_count[b];
      }
      for (int b = split; b < kBins; ++b) {
        right.Grow(bin_box[b]);
        nr += bin_count[b];
      }
      if (nl == 0 || nr == 0) continue;
      const double cost = nl * left.SurfaceArea() + nr * right.SurfaceArea();
      if (cost < best_cost) {
        best_cost = cost;
        best_split = split;
      }
    }

    uint32_t mid;
    if (best_split < 0) {
      mid = begin + n / 2;
      std::nth_element(order_.begin() + begin, order_.begin() + mid,
                       order_.begin() + end, [&](uint32_t a, uint32_t b) {
                         return centroids[a][axis] < centroids[b][axis];
                       });
    } else {
      auto it = std::stable_partition(
          order_.begin() + begin, order_.begin() + end,
          [&](uint32_t prim) { return bin_of(prim) < best_split; });
      mid = static_cast<uint32_t>(it - order_.begin());
    }

    nodes_[index].axis = axis;
    Build(boxes, centroids, begin, mid);
    const uint32_t right = Build(boxes, centroids, mid, end);
    nodes_[index].first = right;
    nodes_[index].count = 0;
    return index;
  }

  std::vector<TrianglePoints> tris_;
  std::vector<uint32_t> order_;
  std::vector<Node> nodes_;
  Aabb empty_;
};

}  // namespace preverb

#endif  // PREVERB_BVH_H_
