#pragma once

#include <string>
#include <vector>

#include "srp/tri_mesh.hpp"

namespace srp {

/// A ready-to-run scene: meshes plus the solver parameters they were tuned
/// for. All fixture geometry is lattice-aligned at unit spacing so centroid
/// rasterization is exact and brute-force oracles agree bit-for-bit.
template <int D>
struct Fixture {
  std::string name;
  TriMesh<D> part;
  TriMesh<D> support;  // all components merged into one mesh
  TriMesh<D> tool;     // tip at the origin
  double spacing = 1.0;
  double epsVoxels = 2.0;  // ε as a voxel count
  int n1 = 8;
  Vec<D> tauRef{Vec<D>::Zero()};
};

namespace fixtures {

/// Axis-aligned rectangle as a 2D solid boundary loop (CCW).
TriMesh<2> rect2(double x0, double y0, double x1, double y1);

/// Axis-aligned box as a closed triangle mesh (outward normals).
TriMesh<3> box3(const Vec<3>& lo, const Vec<3>& hi);

/// The standard 2D probe: a 10×1 pin with its tip just inside the body at
/// the origin, so the tip cell stays occupied at every sampled rotation.
TriMesh<2> pin2();

/// The standard 3D probe: a 12-long pin with a one-cell cross section.
TriMesh<3> pin3();

/// Square part with one 3×3 support block on its east face. The smallest
/// interesting scene: one component, one feature.
Fixture<2> two_square();

/// L-shaped part with two columns hanging from the overhang: two components,
/// two features. The pin can only graze a column top sideways, so the outer
/// column shadows the inner one: two rounds (outer, then inner).
Fixture<2> lpart();

/// Square part with four face notches; each notch holds an inner and an
/// outer column, and each face carries one freestanding peg. The four pegs
/// and four outer columns are graze-able immediately (8 in round 0); the
/// inner columns are shadowed until their outer neighbor is gone (4 in
/// round 1); then AllRemoved.
Fixture<2> forest();

/// Square part with a sealed internal cavity holding a support block the
/// tool cannot reach: every fiber is empty, so the verdict is Unreachable.
Fixture<2> internal_void();

/// Part with a sealed cavity whose support CAN be grazed in isolation (the
/// fiber is nonempty) but which no path can enter: the planner must report
/// PathNotFound.
Fixture<2> utrap();

/// 3D bracket: vertical web, horizontal flange overhang, supports hanging
/// from the flange underside — two plain stubs, a square collar, and a
/// center stub the collar encloses. The collar blocks every approach to the
/// center stub, so removal takes two rounds: stubs + collar, then the
/// center stub.
Fixture<3> bracket3d();

std::vector<std::string> names2d();
std::vector<std::string> names3d();
Fixture<2> byName2d(const std::string& name);
Fixture<3> byName3d(const std::string& name);

/// Writes {name}_part / {name}_support / {name}_tool meshes plus
/// {name}.json (a ready-to-run job config) into outDir.
void emit(const std::string& name, const std::string& outDir);

}  // namespace fixtures
}  // namespace srp
