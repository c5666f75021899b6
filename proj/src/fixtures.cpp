#include "srp/fixtures.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "srp/core.hpp"
#include "srp/io/mesh_io.hpp"

namespace srp {
namespace fixtures {

TriMesh<2> rect2(double x0, double y0, double x1, double y1) {
  TriMesh<2> m;
  m.vertices = {Vec<2>(x0, y0), Vec<2>(x1, y0), Vec<2>(x1, y1), Vec<2>(x0, y1)};
  m.faces = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  return m;
}

namespace {

/// Clockwise rectangle loop: a hole in a surrounding solid.
TriMesh<2> rectHole(double x0, double y0, double x1, double y1) {
  TriMesh<2> m;
  m.vertices = {Vec<2>(x0, y0), Vec<2>(x0, y1), Vec<2>(x1, y1), Vec<2>(x1, y0)};
  m.faces = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  return m;
}

TriMesh<2> polygon2(const std::vector<Vec<2>>& loop) {
  TriMesh<2> m;
  m.vertices = loop;
  const int n = static_cast<int>(loop.size());
  for (int i = 0; i < n; ++i) m.faces.push_back({i, (i + 1) % n});
  return m;
}

}  // namespace

TriMesh<3> box3(const Vec<3>& lo, const Vec<3>& hi) {
  TriMesh<3> m;
  m.vertices = {Vec<3>(lo.x(), lo.y(), lo.z()), Vec<3>(hi.x(), lo.y(), lo.z()),
                Vec<3>(hi.x(), hi.y(), lo.z()), Vec<3>(lo.x(), hi.y(), lo.z()),
                Vec<3>(lo.x(), lo.y(), hi.z()), Vec<3>(hi.x(), lo.y(), hi.z()),
                Vec<3>(hi.x(), hi.y(), hi.z()), Vec<3>(lo.x(), hi.y(), hi.z())};
  m.faces = {{0, 2, 1}, {0, 3, 2},   // bottom (-z)
             {4, 5, 6}, {4, 6, 7},   // top (+z)
             {0, 1, 5}, {0, 5, 4},   // front (-y)
             {2, 3, 7}, {2, 7, 6},   // back (+y)
             {0, 4, 7}, {0, 7, 3},   // left (-x)
             {1, 2, 6}, {1, 6, 5}};  // right (+x)
  return m;
}

TriMesh<2> pin2() { return rect2(-0.25, -0.5, 9.75, 0.5); }

namespace {

/// L-shaped cross-section in (x,z) extruded along y: one watertight shell
/// (abutting boxes would weld into a non-manifold seam on STL round-trip).
TriMesh<3> lPrism(double y0, double y1) {
  const double q[6][2] = {{0, 0}, {4, 0}, {4, 20}, {24, 20}, {24, 24}, {0, 24}};  // (x, z)
  TriMesh<3> m;
  for (double y : {y0, y1})
    for (const auto& p : q) m.vertices.push_back(Vec<3>(p[0], y, p[1]));
  for (int i = 0; i < 4; ++i) {
    m.faces.push_back({5, i, i + 1});           // bottom cap, outward -y
    m.faces.push_back({11, 6 + i + 1, 6 + i});  // top cap, outward +y
  }
  for (int i = 0; i < 6; ++i) {
    const int j = (i + 1) % 6;
    m.faces.push_back({j, i, 6 + i});
    m.faces.push_back({j, 6 + i, 6 + j});
  }
  return m;
}

}  // namespace

TriMesh<3> pin3() { return box3(Vec<3>(-0.25, -0.25, -0.25), Vec<3>(11.75, 0.25, 0.25)); }

namespace {

/// Rectangular-annulus prism (a square collar): outer box [o0,o1]×[z0,z1]
/// minus inner window (i0,i1), one watertight genus-1 shell.
TriMesh<3> annulusPrism(const Vec<2>& o0, const Vec<2>& o1, const Vec<2>& i0, const Vec<2>& i1,
                        double z0, double z1) {
  TriMesh<3> m;
  const Vec<2> outer[4] = {o0, Vec<2>(o1.x(), o0.y()), o1, Vec<2>(o0.x(), o1.y())};
  const Vec<2> inner[4] = {i0, Vec<2>(i1.x(), i0.y()), i1, Vec<2>(i0.x(), i1.y())};
  for (double z : {z0, z1}) {
    for (const auto& p : outer) m.vertices.push_back(Vec<3>(p.x(), p.y(), z));
    for (const auto& p : inner) m.vertices.push_back(Vec<3>(p.x(), p.y(), z));
  }
  const auto O = [](int k) { return k % 4; };            // bottom outer
  const auto I = [](int k) { return 4 + k % 4; };        // bottom inner
  const auto TO = [](int k) { return 8 + k % 4; };       // top outer
  const auto TI = [](int k) { return 12 + k % 4; };      // top inner
  for (int k = 0; k < 4; ++k) {
    m.faces.push_back({O(k), O(k + 1), TO(k + 1)});      // outer wall, outward
    m.faces.push_back({O(k), TO(k + 1), TO(k)});
    m.faces.push_back({I(k + 1), I(k), TI(k)});          // inner wall, toward window
    m.faces.push_back({I(k + 1), TI(k), TI(k + 1)});
    m.faces.push_back({O(k), I(k), O(k + 1)});           // bottom annulus, -z
    m.faces.push_back({I(k), I(k + 1), O(k + 1)});
    m.faces.push_back({TO(k), TO(k + 1), TI(k)});        // top annulus, +z
    m.faces.push_back({TI(k), TO(k + 1), TI(k + 1)});
  }
  return m;
}

}  // namespace

Fixture<2> two_square() {
  Fixture<2> f;
  f.name = "two_square";
  f.part = rect2(0, 0, 10, 10);
  f.support = rect2(10, 4, 13, 7);
  f.tool = pin2();
  f.n1 = 8;
  f.tauRef = Vec<2>(-14, -14);
  return f;
}

Fixture<2> lpart() {
  Fixture<2> f;
  f.name = "lpart";
  f.part = polygon2({Vec<2>(0, 0), Vec<2>(4, 0), Vec<2>(4, 12), Vec<2>(16, 12), Vec<2>(16, 16),
                     Vec<2>(0, 16)});
  f.support = mergeMeshes(rect2(6, 6, 7, 12), rect2(10, 6, 11, 12));
  f.tool = pin2();
  f.n1 = 8;
  f.tauRef = Vec<2>(-10, -10);
  return f;
}

Fixture<2> forest() {
  Fixture<2> f;
  f.name = "forest";
  // Square with a channel notch in the middle of each face.
  f.part = polygon2({Vec<2>(20, -20), Vec<2>(20, -2),  Vec<2>(12, -2),  Vec<2>(12, 2),
                     Vec<2>(20, 2),   Vec<2>(20, 20),  Vec<2>(2, 20),   Vec<2>(2, 12),
                     Vec<2>(-2, 12),  Vec<2>(-2, 20),  Vec<2>(-20, 20), Vec<2>(-20, 2),
                     Vec<2>(-12, 2),  Vec<2>(-12, -2), Vec<2>(-20, -2), Vec<2>(-20, -20),
                     Vec<2>(-2, -20), Vec<2>(-2, -12), Vec<2>(2, -12),  Vec<2>(2, -20)});
  // Per face: an inner and an outer column inside the notch (the outer one
  // shadows the inner at ε = 2) plus one freestanding peg on the face.
  TriMesh<2> s = rect2(13, -2, 14, 0);                 // east inner
  s = mergeMeshes(s, rect2(17, -2, 18, 0));            // east outer
  s = mergeMeshes(s, rect2(20, 8, 21, 10));            // east peg
  s = mergeMeshes(s, rect2(0, 13, 2, 14));             // north inner
  s = mergeMeshes(s, rect2(0, 17, 2, 18));             // north outer
  s = mergeMeshes(s, rect2(-10, 20, -8, 21));          // north peg
  s = mergeMeshes(s, rect2(-14, 0, -13, 2));           // west inner
  s = mergeMeshes(s, rect2(-18, 0, -17, 2));           // west outer
  s = mergeMeshes(s, rect2(-21, -10, -20, -8));        // west peg
  s = mergeMeshes(s, rect2(-2, -14, 0, -13));          // south inner
  s = mergeMeshes(s, rect2(-2, -18, 0, -17));          // south outer
  s = mergeMeshes(s, rect2(8, -21, 10, -20));          // south peg
  f.support = s;
  f.tool = pin2();
  f.n1 = 8;
  f.tauRef = Vec<2>(-30, -30);
  return f;
}

Fixture<2> internal_void() {
  Fixture<2> f;
  f.name = "internal_void";
  f.part = mergeMeshes(rect2(0, 0, 20, 20), rectHole(6, 6, 14, 14));
  f.support = rect2(10, 6, 11, 9);
  f.tool = pin2();
  f.n1 = 8;
  f.tauRef = Vec<2>(-12, -12);
  return f;
}

Fixture<2> utrap() {
  Fixture<2> f;
  f.name = "utrap";
  f.part = mergeMeshes(rect2(0, 0, 36, 24), rectHole(6, 4, 30, 18));
  f.support = rect2(19, 4, 20, 8);
  f.tool = pin2();
  f.n1 = 8;
  f.tauRef = Vec<2>(-12, -12);
  return f;
}

Fixture<3> bracket3d() {
  Fixture<3> f;
  f.name = "bracket3d";
  // Vertical web (x ∈ [0,4]) carrying a horizontal flange overhang
  // (z ∈ [20,24], x ∈ [4,24]), one L-prism shell.  All supports hang from
  // the flange underside: two plain stubs, and a collar enclosing a center
  // stub whose only free approaches open up after the collar is removed.
  f.part = lPrism(0, 16);
  TriMesh<3> s = box3(Vec<3>(8, 3, 16), Vec<3>(10, 5, 20));
  s = mergeMeshes(s, box3(Vec<3>(8, 11, 16), Vec<3>(10, 13, 20)));
  s = mergeMeshes(s, annulusPrism(Vec<2>(13, 5), Vec<2>(18, 10), Vec<2>(14, 6), Vec<2>(17, 9),
                                  16, 20));
  s = mergeMeshes(s, box3(Vec<3>(15, 7, 18), Vec<3>(16, 8, 20)));
  f.support = s;
  f.tool = pin3();
  f.n1 = 64;
  f.tauRef = Vec<3>(-16, 8, 12);
  return f;
}

std::vector<std::string> names2d() {
  return {"two_square", "lpart", "forest", "internal_void", "utrap"};
}
std::vector<std::string> names3d() { return {"bracket3d"}; }

Fixture<2> byName2d(const std::string& name) {
  if (name == "two_square") return two_square();
  if (name == "lpart") return lpart();
  if (name == "forest") return forest();
  if (name == "internal_void") return internal_void();
  if (name == "utrap") return utrap();
  raise(Errc::ConfigError, "unknown 2D fixture: " + name);
}

Fixture<3> byName3d(const std::string& name) {
  if (name == "bracket3d") return bracket3d();
  raise(Errc::ConfigError, "unknown 3D fixture: " + name);
}

namespace {

template <int D>
nlohmann::ordered_json configJson(const Fixture<D>& f, const std::string& partFile,
                                  const std::string& supportFile, const std::string& toolFile) {
  nlohmann::ordered_json j;
  j["dimension"] = D;
  j["part"] = partFile;
  j["support"] = supportFile;
  j["tool"] = toolFile;
  j["spacing"] = f.spacing;
  j["epsilonVoxels"] = f.epsVoxels;
  j["rotations"] = {{"count", f.n1},
                    {"method", D == 2 ? "grid2d" : "fibonacci"},
                    {"seed", 0}};
  j["weights"] = {{"rotation", 1.0}, {"translation", 1.0}};
  j["queryPointsPerFeature"] = D == 2 ? 1 : 2;
  j["policy"] = {{"scene", "centroid"}, {"tool", D == 2 ? "centroid" : "conservative"}};
  nlohmann::ordered_json ref;
  std::vector<double> t(D);
  for (int a = 0; a < D; ++a) t[static_cast<std::size_t>(a)] = f.tauRef[a];
  ref["translation"] = t;
  j["referenceConfig"] = ref;
  j["planner"] = {{"stepSize", 0.0},     {"maxNodes", 4000}, {"timeBudgetSec", 10.0},
                  {"goalBias", 0.1},     {"memberRetries", 3}, {"retractRadius", 4},
                  {"shortcutRounds", 2}, {"seed", 1}};
  j["output"] = "out/" + f.name;
  return j;
}

}  // namespace

void emit(const std::string& name, const std::string& outDir) {
  namespace fs = std::filesystem;
  fs::create_directories(outDir);
  const auto writeCfg = [&](const nlohmann::ordered_json& j, const std::string& file) {
    std::ofstream out(file);
    if (!out) raise(Errc::IoError, "cannot write " + file);
    out << j.dump(2) << "\n";
  };

  for (const auto& n : names2d()) {
    if (name != "all" && name != n) continue;
    const Fixture<2> f = byName2d(n);
    const std::string part = n + "_part.poly", supp = n + "_support.poly",
                      tool = n + "_tool.poly";
    io::writePolygon2(outDir + "/" + part, f.part);
    io::writePolygon2(outDir + "/" + supp, f.support);
    io::writePolygon2(outDir + "/" + tool, f.tool);
    writeCfg(configJson(f, part, supp, tool), outDir + "/" + n + ".json");
  }
  for (const auto& n : names3d()) {
    if (name != "all" && name != n) continue;
    const Fixture<3> f = byName3d(n);
    const std::string part = n + "_part.stl", supp = n + "_support.stl", tool = n + "_tool.stl";
    io::writeStlBinary(outDir + "/" + part, f.part);
    io::writeStlBinary(outDir + "/" + supp, f.support);
    io::writeStlBinary(outDir + "/" + tool, f.tool);
    writeCfg(configJson(f, part, supp, tool), outDir + "/" + n + ".json");
  }
}

}  // namespace fixtures
}  // namespace srp
