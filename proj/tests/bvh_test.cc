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


#include "preverb/bvh.h"

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "test_scenes.h"

namespace preverb {
namespace {

const TrianglePoints kUnitTriangle{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};

TEST(IntersectTriangleTest, HitsInteriorFromEitherSide) {
  auto t = IntersectTriangle(kUnitTriangle, {0.25, 0.25, 2.0}, {0, 0, -1}, 0.0, 1e9);
  ASSERT_TRUE(t.has_value());
  EXPECT_DOUBLE_EQ(*t, 2.0);
  t = IntersectTriangle(kUnitTriangle, {0.25, 0.25, -3.0}, {0, 0, 1}, 0.0, 1e9);
  ASSERT_TRUE(t.has_value());
  EXPECT_DOUBLE_EQ(*t, 3.0);
}

TEST(IntersectTriangleTest, MissesOutsideAndParallel) {
  EXPECT_FALSE(IntersectTriangle(kUnitTriangle, {0.8, 0.8, 1.0}, {0, 0, -1}, 0.0, 1e9));
  EXPECT_FALSE(IntersectTriangle(kUnitTriangle, {0.2, 0.2, 1.0}, {1, 0, 0}, 0.0, 1e9));
  EXPECT_FALSE(IntersectTriangle(kUnitTriangle, {0.2, 0.2, 1.0}, {0, 0, 1}, 0.0, 1e9));
}

TEST(IntersectTriangleTest, EdgesAndVerticesCount) {
  EXPECT_TRUE(IntersectTriangle(kUnitTriangle, {0.5, 0.5, 1.0}, {0, 0, -1}, 0.0, 1e9));
  EXPECT_TRUE(IntersectTriangle(kUnitTriangle, {0.0, 0.0, 1.0}, {0, 0, -1}, 0.0, 1e9));
  EXPECT_TRUE(IntersectTriangle(kUnitTriangle, {0.3, 0.0, 1.0}, {0, 0, -1}, 0.0, 1e9));
}

TEST(IntersectTriangleTest, RangeIsOpenBelowClosedAbove) {
  const Vec3 o{0.25, 0.25, 1.0};
  const Vec3 d{0, 0, -1};
  EXPECT_TRUE(IntersectTriangle(kUnitTriangle, o, d, 0.0, 1.0));
  EXPECT_FALSE(IntersectTriangle(kUnitTriangle, o, d, 1.0, 2.0));
  EXPECT_FALSE(IntersectTriangle(kUnitTriangle, o, d, 0.0, 0.999));
}

TEST(PrimitiveHitTest, TiesGoToLowerIndex) {
  PrimitiveHit hit;
  hit.t = 2.0;
  hit.primitive = 5;
  EXPECT_TRUE(hit.Improves(2.0, 3));
  EXPECT_FALSE(hit.Improves(2.0, 7));
  EXPECT_TRUE(hit.Improves(1.0, 9));
}

std::vector<TrianglePoints> PointsOf(const Scene& scene) {
  std::vector<TrianglePoints> out;
  for (const Triangle& t : scene.Triangles()) out.push_back({t.v0, t.v1, t.v2});
  return out;
}

TEST(BvhTest, EveryTriangleAppearsExactlyOnce) {
  for (const auto& [name, scene] : testing::AllTestScenes()) {
    const auto order = scene.Accelerator().PrimitiveOrder();
    ASSERT_EQ(order.size(), scene.Triangles().size()) << name;
    std::set<uint32_t> seen(order.begin(), order.end());
    EXPECT_EQ(seen.size(), order.size()) << name;
    EXPECT_EQ(*seen.rbegin(), order.size() - 1) << name;
  }
}

TEST(BvhTest, BoundsCoverAllVertices) {
  for (const auto& [name, scene] : testing::AllTestScenes()) {
    for (const Triangle& t : scene.Triangles()) {
      EXPECT_TRUE(scene.Accelerator().Bounds().Contains(t.v0)) << name;
      EXPECT_TRUE(scene.Accelerator().Bounds().Contains(t.v1)) << name;
      EXPECT_TRUE(scene.Accelerator().Bounds().Contains(t.v2)) << name;
    }
  }
}

TEST(BvhTest, EmptyBvhReportsNoHit) {
  Bvh bvh(std::vector<TrianglePoints>{});
  EXPECT_FALSE(bvh.Intersect({0, 0, 0}, {1, 0, 0}, 0.0).Valid());
}

TEST(BvhTest, SingleTriangle) {
  Bvh bvh({kUnitTriangle});
  const PrimitiveHit hit = bvh.Intersect({0.25, 0.25, 1.0}, {0, 0, -1}, 0.0);
  ASSERT_TRUE(hit.Valid());
  EXPECT_EQ(hit.primitive, 0u);
  EXPECT_DOUBLE_EQ(hit.t, 1.0);
}

// Rays from inside the bounds, from outside, and from exact vertices, along
// random and axis-aligned directions.
TEST(BvhTest, MatchesExhaustiveOnRandomRays) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& [name, scene] : testing::AllTestScenes()) {
    const auto tris = PointsOf(scene);
    const Aabb box = scene.Bounds();
    const Vec3 size = box.max - box.min;
    int mismatches = 0;
    for (int i = 0; i < 20000; ++i) {
      Vec3 o{box.min.x + (1.4 * unit(rng) - 0.2) * size.x,
             box.min.y + (1.4 * unit(rng) - 0.2) * size.y,
             box.min.z + (1.4 * unit(rng) - 0.2) * size.z};
      if (i % 10 == 0) o = scene.Vertices()[i % scene.Vertices().size()];
      Vec3 d = Normalize({gauss(rng), gauss(rng), gauss(rng)});
      if (i % 7 == 0) {
        d = {};
        d[i % 3] = i % 2 ? -1.0 : 1.0;
      }
      const double t_min = i % 2 ? 0.0 : 1e-9;
      const PrimitiveHit a = scene.Accelerator().Intersect(o, d, t_min);
      const PrimitiveHit b = IntersectExhaustive(tris, o, d, t_min);
      if (a.primitive != b.primitive || (a.Valid() && a.t != b.t)) ++mismatches;
    }
    EXPECT_EQ(mismatches, 0) << name;
  }
}

}  // namespace
}  // namespace preverb
