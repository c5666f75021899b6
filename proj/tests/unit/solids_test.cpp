#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles/oracles.hpp"
#include "srp/features.hpp"
#include "srp/fixtures.hpp"
#include "srp/scene.hpp"
#include "srp/voxelize.hpp"

namespace {

using namespace srp;

TriMesh<3> uvSphere(double radius, int segments, int rings) {
  TriMesh<3> m;
  m.vertices.push_back(Vec<3>(0, 0, radius));
  for (int i = 1; i < rings; ++i) {
    const double th = kPi * i / rings;
    for (int j = 0; j < segments; ++j) {
      const double ph = 2.0 * kPi * j / segments;
      m.vertices.push_back(radius * Vec<3>(std::sin(th) * std::cos(ph),
                                           std::sin(th) * std::sin(ph), std::cos(th)));
    }
  }
  m.vertices.push_back(Vec<3>(0, 0, -radius));
  const int south = static_cast<int>(m.vertices.size()) - 1;
  auto ring = [&](int i, int j) { return 1 + (i - 1) * segments + (j % segments); };
  for (int j = 0; j < segments; ++j) {
    m.faces.push_back({0, ring(1, j), ring(1, j + 1)});
    m.faces.push_back({south, ring(rings - 1, j + 1), ring(rings - 1, j)});
  }
  for (int i = 1; i + 1 < rings; ++i)
    for (int j = 0; j < segments; ++j) {
      m.faces.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      m.faces.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  return m;
}

template <int D>
VoxelGrid<D> randomGrid(const IVec<D>& dims, double fill, std::mt19937_64& rng) {
  GridFrame<D> f;
  f.spacing = 1.0;
  f.dims = dims;
  f.origin = Vec<D>::Zero();
  VoxelGrid<D> g(f);
  std::bernoulli_distribution occ(fill);
  for (Index lin = 0; lin < f.cellCount(); ++lin) g.values[lin] = occ(rng) ? 1.0 : 0.0;
  return g;
}

/// Canonical component shape: sorted linear indices per component, components
/// sorted by first cell (library label order is lexicographic-by-cell, not
/// scan order, so comparisons go through this set form).
template <int D>
std::set<std::vector<Index>> componentSets(const std::vector<VoxelGrid<D>>& comps) {
  std::set<std::vector<Index>> out;
  for (const auto& c : comps) {
    std::vector<Index> cells;
    for (Index lin = 0; lin < c.frame.cellCount(); ++lin)
      if (c.values[lin] != 0.0) cells.push_back(lin);
    out.insert(std::move(cells));
  }
  return out;
}

std::set<std::vector<Index>> componentSets(const std::vector<std::vector<Index>>& comps) {
  return {comps.begin(), comps.end()};
}

}  // namespace

TEST_SUITE("solids") {

TEST_CASE("axis-aligned boxes rasterize exactly") {
  const TriMesh<3> cube = fixtures::box3(Vec<3>(0, 0, 0), Vec<3>(1, 1, 1));
  const VoxelGrid<3> g = voxelize(cube, 0.25, VoxelizePolicy::Centroid);
  CHECK(g.occupiedCount() == 64);
  CHECK(g.volume() == doctest::Approx(1.0).epsilon(1e-12));

  const TriMesh<2> sq = fixtures::rect2(0, 0, 1, 1);
  const VoxelGrid<2> g2 = voxelize(sq, 0.25, VoxelizePolicy::Centroid);
  CHECK(g2.occupiedCount() == 16);
  CHECK(g2.volume() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sphere volume converges within two percent") {
  const TriMesh<3> sphere = uvSphere(1.0, 48, 24);
  validateSolidMesh(sphere);
  CHECK(signedMeasure(sphere) > 0.0);  // outward winding
  const VoxelGrid<3> g = voxelize(sphere, 0.05, VoxelizePolicy::Centroid);
  const double exact = 4.0 * kPi / 3.0;
  CHECK(std::abs(g.volume() - exact) / exact < 0.02);
}

TEST_CASE("conservative raster contains the centroid raster") {
  const TriMesh<3> sphere = uvSphere(1.0, 24, 12);
  const GridFrame<3> frame = frameCovering(sphere.bounds(), 0.1, 1);
  const VoxelGrid<3> cons = voxelizeInto(sphere, frame, VoxelizePolicy::Conservative);
  const VoxelGrid<3> cent = voxelizeInto(sphere, frame, VoxelizePolicy::Centroid);
  CHECK(((cent.values == 0.0) || (cons.values != 0.0)).all());
  CHECK(cons.occupiedCount() > cent.occupiedCount());
}

TEST_CASE("surface points land in conservative cells") {
  const TriMesh<3> sphere = uvSphere(1.0, 24, 12);
  const VoxelGrid<3> cons = voxelize(sphere, 0.1, VoxelizePolicy::Conservative);
  for (const auto& f : sphere.faces) {
    const Vec<3> c =
        (sphere.vertices[f[0]] + sphere.vertices[f[1]] + sphere.vertices[f[2]]) / 3.0;
    const IVec<3> cell = cons.frame.cellOf(c);
    REQUIRE(cons.frame.inBounds(cell));
    CHECK(cons.occupied(cell));
  }
}

TEST_CASE("two separated blocks form two components, deterministically ordered") {
  TriMesh<3> two = mergeMeshes(fixtures::box3(Vec<3>(0, 0, 0), Vec<3>(2, 2, 2)),
                               fixtures::box3(Vec<3>(5, 5, 5), Vec<3>(7, 7, 7)));
  const VoxelGrid<3> g = voxelize(two, 1.0, VoxelizePolicy::Centroid);
  for (Connectivity conn : {Connectivity::Face, Connectivity::Full}) {
    const auto comps = connected_components(g, conn);
    REQUIRE(comps.size() == 2);
    // Component 0 owns the lexicographically smallest occupied cell.
    const auto c0 = comps[0].occupiedCells();
    const auto all = g.occupiedCells();
    auto key = [](const IVec<3>& c) { return std::array<int, 3>{c[0], c[1], c[2]}; };
    std::array<int, 3> minAll = key(all.front());
    for (const auto& c : all) minAll = std::min(minAll, key(c));
    bool found = false;
    for (const auto& c : c0)
      if (key(c) == minAll) found = true;
    CHECK(found);
  }
}

TEST_CASE("empty grid has no components and no features") {
  GridFrame<2> f;
  f.spacing = 1.0;
  f.dims = IVec<2>(6, 4);
  f.origin = Vec<2>::Zero();
  const VoxelGrid<2> empty(f);
  CHECK(connected_components(empty, Connectivity::Full).empty());
  CHECK(labelComponents(empty, Connectivity::Full).count == 0);
  VoxelGrid<2> part(f);
  part.values[0] = 1.0;
  CHECK(dislocation_features(part, empty).empty());
}

TEST_CASE("random fields match breadth-first labeling") {
  std::mt19937_64 rng(7);
  for (double fill : {0.2, 0.4, 0.6}) {
    for (int rep = 0; rep < 4; ++rep) {
      const VoxelGrid<2> g2 = randomGrid<2>(IVec<2>(24, 17), fill, rng);
      const VoxelGrid<3> g3 = randomGrid<3>(IVec<3>(12, 13, 9), fill, rng);
      for (Connectivity conn : {Connectivity::Face, Connectivity::Full}) {
        const bool faceOnly = conn == Connectivity::Face;
        CHECK(componentSets(connected_components(g2, conn)) ==
              componentSets(oracle::floodLabel(g2, faceOnly)));
        CHECK(componentSets(connected_components(g3, conn)) ==
              componentSets(oracle::floodLabel(g3, faceOnly)));
      }
      // Components partition the occupied set.
      Index total = 0;
      for (const auto& c : connected_components(g3, Connectivity::Full))
        total += c.occupiedCount();
      CHECK(total == g3.occupiedCount());
    }
  }
}

TEST_CASE("single column yields one dislocation feature at the interface") {
  Box<2> box = fixtures::rect2(0, 0, 8, 2).bounds();
  box.expand(fixtures::rect2(3, 2, 4, 6).bounds());
  const GridFrame<2> frame = frameCovering(box, 1.0, 1);
  const VoxelGrid<2> P = voxelizeInto(fixtures::rect2(0, 0, 8, 2), frame, VoxelizePolicy::Centroid);
  const VoxelGrid<2> S = voxelizeInto(fixtures::rect2(3, 2, 4, 6), frame, VoxelizePolicy::Centroid);
  const auto feats = dislocation_features(P, S);
  REQUIRE(feats.size() == 1);
  CHECK(feats[0].component == 0);
  CHECK(feats[0].voxels.occupiedCount() == 1);
  REQUIRE(feats[0].queryPoints.size() == 1);
  CHECK((feats[0].queryPoints[0] - Vec<2>(3.5, 2.5)).norm() < 1e-12);
}

TEST_CASE("H-shaped support: one component, two features") {
  TriMesh<2> s = fixtures::rect2(1, 2, 2, 5);
  s = mergeMeshes(s, fixtures::rect2(5, 2, 6, 5));
  s = mergeMeshes(s, fixtures::rect2(2, 3, 5, 4));
  Box<2> box = fixtures::rect2(0, 0, 8, 2).bounds();
  box.expand(s.bounds());
  const GridFrame<2> frame = frameCovering(box, 1.0, 1);
  const VoxelGrid<2> P = voxelizeInto(fixtures::rect2(0, 0, 8, 2), frame, VoxelizePolicy::Centroid);
  const VoxelGrid<2> S = voxelizeInto(s, frame, VoxelizePolicy::Centroid);

  const auto feats = dislocation_features(P, S);
  REQUIRE(feats.size() == 2);
  CHECK(feats[0].component == 0);
  CHECK(feats[1].component == 0);
  const auto comps = supportComponents(S, feats);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].featureIds == std::vector<int>{0, 1});
}

TEST_CASE("bracket census by hand: two columns, one interface cell each") {
  const auto f = fixtures::lpart();
  SceneBuildParams<2> params;
  params.scenePolicy = VoxelizePolicy::Centroid;
  params.toolPolicy = VoxelizePolicy::Centroid;
  const Scene<2> scene = buildScene(f.part, f.support, f.tool, params);

  const auto feats = dislocation_features(scene.part, scene.support);
  const auto comps = supportComponents(scene.support, feats);
  REQUIRE(comps.size() == 2);
  REQUIRE(feats.size() == 2);
  CHECK(comps[0].voxels.occupiedCount() == 6);  // 1x6 column
  CHECK(comps[1].voxels.occupiedCount() == 6);
  CHECK((feats[0].queryPoints[0] - Vec<2>(6.5, 11.5)).norm() < 1e-12);
  CHECK((feats[1].queryPoints[0] - Vec<2>(10.5, 11.5)).norm() < 1e-12);
}

TEST_CASE("set subtraction behaves elementwise") {
  std::mt19937_64 rng(11);
  const VoxelGrid<2> a = randomGrid<2>(IVec<2>(9, 7), 0.5, rng);
  const VoxelGrid<2> b = randomGrid<2>(IVec<2>(9, 7), 0.5, rng);
  const VoxelGrid<2> d = subtract(a, b);
  const VoxelGrid<2> u = gridUnion(a, b);
  const VoxelGrid<2> i = gridIntersection(a, b);
  for (Index lin = 0; lin < a.frame.cellCount(); ++lin) {
    const bool av = a.values[lin] != 0.0, bv = b.values[lin] != 0.0;
    CHECK((d.values[lin] != 0.0) == (av && !bv));
    CHECK((u.values[lin] != 0.0) == (av || bv));
    CHECK((i.values[lin] != 0.0) == (av && bv));
  }
  CHECK(subtract(a, a).empty());
  const VoxelGrid<2> none(a.frame);
  CHECK(((subtract(a, none).values != 0.0) == (a.values != 0.0)).all());
  CHECK(d.occupiedCount() <= a.occupiedCount());
}

TEST_CASE("features partition the interface and stay inside their component") {
  const auto f = fixtures::forest();
  SceneBuildParams<2> params;
  params.scenePolicy = VoxelizePolicy::Centroid;
  params.toolPolicy = VoxelizePolicy::Centroid;
  const Scene<2> scene = buildScene(f.part, f.support, f.tool, params);
  const auto feats = dislocation_features(scene.part, scene.support);
  const auto comps = supportComponents(scene.support, feats);
  REQUIRE(comps.size() == 12);
  REQUIRE(feats.size() == 12);

  // Interface recomputed directly: occupied S cells face-adjacent to P.
  VoxelGrid<2> iface(scene.support.frame);
  const auto& fr = scene.support.frame;
  for (Index lin = 0; lin < fr.cellCount(); ++lin) {
    if (scene.support.values[lin] == 0.0) continue;
    const IVec<2> c = fr.cellAt(lin);
    for (int a = 0; a < 2; ++a)
      for (int s : {-1, 1}) {
        IVec<2> d = c;
        d[a] += s;
        if (fr.inBounds(d) && scene.part.occupied(d)) iface.values[lin] = 1.0;
      }
  }
  VoxelGrid<2> featUnion(fr);
  for (const auto& feat : feats) {
    REQUIRE(feat.component >= 0);
    REQUIRE(feat.component < static_cast<int>(comps.size()));
    // Feature cells inside the owning component.
    CHECK(((feat.voxels.values == 0.0) ||
           (comps[static_cast<std::size_t>(feat.component)].voxels.values != 0.0))
              .all());
    featUnion = gridUnion(featUnion, feat.voxels);
  }
  CHECK(((featUnion.values != 0.0) == (iface.values != 0.0)).all());

  // Representative points with spread stay on member cells and are distinct.
  const auto pts = detail::representativePoints(feats[0].voxels, 3);
  CHECK(!pts.empty());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const IVec<2> cell = fr.cellOf(pts[i]);
    CHECK(feats[0].voxels.occupied(cell));
    for (std::size_t j = i + 1; j < pts.size(); ++j) CHECK((pts[i] - pts[j]).norm() > 1e-12);
  }
}

}  // TEST_SUITE
