#include <doctest.h>

#include <random>

#include "oracles/oracles.hpp"
#include "srp/contact.hpp"
#include "srp/fixtures.hpp"
#include "srp/overlap.hpp"
#include "srp/scene.hpp"

namespace {

using namespace srp;

template <int D>
VoxelGrid<D> randomGrid(const IVec<D>& dims, const Vec<D>& origin, double h, double fill,
                        std::mt19937_64& rng) {
  GridFrame<D> f;
  f.spacing = h;
  f.dims = dims;
  f.origin = origin;
  VoxelGrid<D> g(f);
  std::bernoulli_distribution occ(fill);
  for (Index lin = 0; lin < f.cellCount(); ++lin) g.values[lin] = occ(rng) ? 1.0 : 0.0;
  return g;
}

/// Shift index of a correlation-frame cell: k = u - (dims_T - 1).
template <int D>
IVec<D> shiftOf(const GridFrame<D>& corr, const GridFrame<D>& toolFrame, Index lin) {
  return corr.cellAt(lin) - (toolFrame.dims - 1);
}

Scene<2> twoSquareScene() {
  const auto f = fixtures::two_square();
  SceneBuildParams<2> params;
  params.scenePolicy = VoxelizePolicy::Centroid;
  params.toolPolicy = VoxelizePolicy::Centroid;
  return buildScene(f.part, f.support, f.tool, params);
}

}  // namespace

TEST_SUITE("cspace") {

TEST_CASE("a point tool copies the obstacle indicator") {
  std::mt19937_64 rng(3);
  const VoxelGrid<2> N = randomGrid<2>(IVec<2>(12, 10), Vec<2>(0, 0), 0.5, 0.4, rng);
  GridFrame<2> tf;
  tf.spacing = 0.5;
  tf.dims = IVec<2>(1, 1);
  tf.origin = Vec<2>(-0.25, -0.25);
  VoxelGrid<2> T(tf);
  T.values[0] = 1.0;

  const auto field = overlapFieldGrids(N, T);
  CHECK((field.mu.frame.dims == N.frame.dims).all());
  for (Index lin = 0; lin < field.mu.frame.cellCount(); ++lin) {
    const IVec<2> k = shiftOf(field.mu.frame, tf, lin);
    CHECK(field.countAt(lin) == (N.occupied(k) ? 1 : 0));
    if (field.countAt(lin) == 1)
      CHECK(field.mu.values[lin] == doctest::Approx(0.25).epsilon(1e-9));
  }
}

TEST_CASE("self-overlap peaks at the full volume") {
  std::mt19937_64 rng(5);
  const VoxelGrid<2> N = randomGrid<2>(IVec<2>(9, 8), Vec<2>(1, 2), 1.0, 0.5, rng);
  const auto field = overlapFieldGrids(N, N);
  long long best = 0;
  for (Index lin = 0; lin < field.mu.frame.cellCount(); ++lin)
    best = std::max(best, field.countAt(lin));
  CHECK(best == N.occupiedCount());
  // The zero-shift cell sits at u = dims - 1 per axis.
  const IVec<2> zeroCell = N.frame.dims - 1;
  const Index zero = field.mu.frame.linearIndex(zeroCell);
  CHECK(field.countAt(zero) == N.occupiedCount());
  CHECK(field.mu.values[zero] == doctest::Approx(N.volume()).epsilon(1e-9));
}

TEST_CASE("fft correlation equals direct counting everywhere") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 3; ++rep) {
    const VoxelGrid<2> N2 = randomGrid<2>(IVec<2>(14, 11), Vec<2>(0, 0), 1.0, 0.45, rng);
    const VoxelGrid<2> T2 = randomGrid<2>(IVec<2>(5, 4), Vec<2>(-2.5, -1.5), 1.0, 0.6, rng);
    const auto f2 = overlapFieldGrids(N2, T2);
    for (Index lin = 0; lin < f2.mu.frame.cellCount(); ++lin)
      REQUIRE(f2.countAt(lin) == oracle::overlapShift(N2, T2, shiftOf(f2.mu.frame, T2.frame, lin)));

    const VoxelGrid<3> N3 = randomGrid<3>(IVec<3>(9, 8, 7), Vec<3>(0, 0, 0), 1.0, 0.4, rng);
    const VoxelGrid<3> T3 = randomGrid<3>(IVec<3>(4, 3, 2), Vec<3>(0.5, 0.5, 0.5), 1.0, 0.6, rng);
    const auto f3 = overlapFieldGrids(N3, T3);
    for (Index lin = 0; lin < f3.mu.frame.cellCount(); ++lin)
      REQUIRE(f3.countAt(lin) == oracle::overlapShift(N3, T3, shiftOf(f3.mu.frame, T3.frame, lin)));
  }
}

TEST_CASE("frame and budget guards") {
  std::mt19937_64 rng(1);
  const VoxelGrid<2> N = randomGrid<2>(IVec<2>(8, 8), Vec<2>(0, 0), 1.0, 0.5, rng);
  const VoxelGrid<2> Tbad = randomGrid<2>(IVec<2>(3, 3), Vec<2>(0, 0), 0.5, 0.5, rng);
  CHECK_THROWS_AS(overlapFieldGrids(N, Tbad), Error);

  FftBudget tiny;
  tiny.maxCells = 16;
  const VoxelGrid<2> T = randomGrid<2>(IVec<2>(3, 3), Vec<2>(0, 0), 1.0, 0.5, rng);
  CHECK_THROWS_AS(overlapFieldGrids(N, T, tiny), Error);
}

TEST_CASE("far translations are free, deep ones collide") {
  const Scene<2> scene = twoSquareScene();
  const VoxelGrid<2> N = scene.nearNet(scene.support);
  const auto rotations = sample_rotations<2>(8, RotationMethod::Grid2d);
  std::vector<OverlapField<2>> stack;
  for (const auto& r : rotations.rotations) stack.push_back(overlap_field(N, scene.tool, r));
  for (std::size_t s = 0; s < stack.size(); ++s) stack[s].rotationIndex = static_cast<int>(s);

  RigidTransform<2> far = RigidTransform<2>::identity();
  far.t = Vec<2>(120, 95);
  const auto fres = classify(stack, far, 2.0);
  CHECK(fres.state == Classification::Free);
  CHECK(fres.count == 0);

  RigidTransform<2> deep = RigidTransform<2>::identity();
  deep.t = Vec<2>(5.5, 5.5);  // part interior; the pin body crosses the block
  const auto cres = classify(stack, deep, 2.0);
  CHECK(cres.state == Classification::Collide);
  CHECK(cres.count >= 2);
}

TEST_CASE("rotation snapping reports the nearest slice and flags gaps") {
  const Scene<2> scene = twoSquareScene();
  const VoxelGrid<2> N = scene.nearNet(scene.support);
  const auto rotations = sample_rotations<2>(8, RotationMethod::Grid2d);
  std::vector<OverlapField<2>> stack;
  for (const auto& r : rotations.rotations) stack.push_back(overlap_field(N, scene.tool, r));

  RigidTransform<2> tau;
  tau.r = Rotation<2>::fromAngle(2.0 * kPi * 0.6 / 8.0);  // between slices 0 and 1
  tau.t = Vec<2>(120, 95);
  const auto res = classify(stack, tau, 2.0);
  CHECK(res.rotationIndex == 1);
  CHECK(res.approximate);

  tau.r = rotations.rotations[3];
  const auto exact = classify(stack, tau, 2.0);
  CHECK(exact.rotationIndex == 3);
  CHECK(!exact.approximate);
}

TEST_CASE("classification bands follow the epsilon count") {
  const long long eps = epsilonCount(2.0, 1.0, 2);
  CHECK(eps == 2);
  CHECK(classifyCount<2>(0, eps) == Classification::Free);
  CHECK(classifyCount<2>(1, eps) == Classification::Contact);
  CHECK(classifyCount<2>(2, eps) == Classification::Collide);
  CHECK(classifyCount<2>(5, eps) == Classification::Collide);
  CHECK(epsilonCount(2.0, 0.5, 2) == 8);
  CHECK(epsilonCount(2.0, 0.5, 3) == 16);
}

TEST_CASE("contact band matches brute force on every slice cell") {
  const Scene<2> scene = twoSquareScene();
  const VoxelGrid<2> N = scene.nearNet(scene.support);
  const auto rotations = sample_rotations<2>(8, RotationMethod::Grid2d);
  const double epsVolume = 2.0;
  ContactBuildOptions opt;
  opt.parallel = false;
  const auto contact = contact_space(N, scene.tool, rotations, epsVolume, opt);
  REQUIRE(contact.slices.size() == 8);
  CHECK(contact.epsCount == 2);

  Index contacts = 0;
  for (int s = 0; s < 8; ++s) {
    const auto& slice = contact.slices[static_cast<std::size_t>(s)];
    const VoxelGrid<2> tg =
        rotatedToolGrid(scene.tool, rotations.rotations[static_cast<std::size_t>(s)], 1.0);
    for (Index lin = 0; lin < slice.frame.cellCount(); ++lin) {
      const long long c = oracle::overlapShift(N, tg, shiftOf(slice.frame, tg.frame, lin));
      const bool inBand = c > 0 && c < contact.epsCount;
      REQUIRE(slice.isContact(lin) == inBand);
      if (inBand) ++contacts;
    }
  }
  CHECK(contact.totalContacts() == contacts);
  CHECK(contacts > 0);
}

TEST_CASE("epsilon of one voxel admits no contact and the band grows with epsilon") {
  const Scene<2> scene = twoSquareScene();
  const VoxelGrid<2> N = scene.nearNet(scene.support);
  const auto rotations = sample_rotations<2>(8, RotationMethod::Grid2d);
  ContactBuildOptions opt;
  opt.parallel = false;

  const auto none = contact_space(N, scene.tool, rotations, 1.0, opt);
  CHECK(none.totalContacts() == 0);

  const auto eps2 = contact_space(N, scene.tool, rotations, 2.0, opt);
  const auto eps3 = contact_space(N, scene.tool, rotations, 3.0, opt);
  CHECK(eps3.totalContacts() >= eps2.totalContacts());
  for (int s = 0; s < 8; ++s)
    for (const auto& e : eps2.slices[static_cast<std::size_t>(s)].contacts)
      CHECK(eps3.slices[static_cast<std::size_t>(s)].isContact(e.lin));
}

TEST_CASE("projected field counts grazeable orientations per translation") {
  const Scene<2> scene = twoSquareScene();
  const VoxelGrid<2> N = scene.nearNet(scene.support);
  const auto rotations = sample_rotations<2>(8, RotationMethod::Grid2d);
  ContactBuildOptions opt;
  opt.parallel = false;
  const auto contact = contact_space(N, scene.tool, rotations, 2.0, opt);
  const VoxelGrid<2> projected = projected_contact_field(contact);

  double sum = 0.0;
  for (Index lin = 0; lin < projected.frame.cellCount(); ++lin) sum += projected.values[lin];
  CHECK(sum == doctest::Approx(static_cast<double>(contact.totalContacts())).epsilon(1e-12));

  // Spot check: a contact translation from slice 0 shows up in the projection.
  const auto& s0 = contact.slices[0];
  REQUIRE(!s0.contacts.empty());
  const Vec<2> t = s0.frame.cellCenter(s0.frame.cellAt(s0.contacts.front().lin));
  const IVec<2> cell = projected.frame.cellOf(t);
  REQUIRE(projected.frame.inBounds(cell));
  CHECK(projected.at(cell) >= 1.0);
}

}  // TEST_SUITE
