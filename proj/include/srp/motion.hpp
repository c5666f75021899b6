#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "srp/contact.hpp"
#include "srp/fibration.hpp"
#include "srp/se3.hpp"
#include "srp/sequencing.hpp"
#include "srp/tri_mesh.hpp"
#include "srp/voxelize.hpp"

namespace srp {

/// Deterministic double/integer stream over the splitmix64 counter; no
/// standard-library distributions, so sequences are identical across
/// platforms for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() { return mix64(state_++); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  int uniformInt(int n) { return std::min(n - 1, static_cast<int>(uniform() * n)); }

 private:
  std::uint64_t state_;
};

namespace detail {

template <int D>
constexpr int pow3() {
  int r = 1;
  for (int i = 0; i < D; ++i) r *= 3;
  return r;
}

/// Segment/segment intersection point (2D), proper or touching.
inline bool segSegPoint(const Vec<2>& p, const Vec<2>& q, const Vec<2>& a, const Vec<2>& b,
                        Vec<2>& out) {
  const Vec<2> r = q - p, s = b - a;
  const double den = r.x() * s.y() - r.y() * s.x();
  if (std::abs(den) < 1e-15) return false;
  const Vec<2> d = a - p;
  const double t = (d.x() * s.y() - d.y() * s.x()) / den;
  const double u = (d.x() * r.y() - d.y() * r.x()) / den;
  if (t < -1e-12 || t > 1.0 + 1e-12 || u < -1e-12 || u > 1.0 + 1e-12) return false;
  out = p + t * r;
  return true;
}

/// Parity point-in-solid test; the ray direction is jittered so grazing a
/// vertex or an edge exactly is not a concern in practice.
inline bool pointInMesh(const TriMesh<3>& mesh, const Vec<3>& p) {
  const Vec<3> dir = Vec<3>(1.0, 1e-4 * kJitterA, 1e-4 * kJitterB).normalized();
  int crossings = 0;
  for (const auto& f : mesh.faces) {
    double s;
    if (rayTriangle(p, dir, mesh.vertices[static_cast<std::size_t>(f[0])],
                    mesh.vertices[static_cast<std::size_t>(f[1])],
                    mesh.vertices[static_cast<std::size_t>(f[2])], s) &&
        s > 0.0)
      ++crossings;
  }
  return crossings % 2 == 1;
}

inline bool pointInMesh(const TriMesh<2>& mesh, const Vec<2>& p) {
  const Vec<2> dir = Vec<2>(1.0, 1e-4 * kJitterA).normalized();
  int crossings = 0;
  for (const auto& f : mesh.faces) {
    const Vec<2>& a = mesh.vertices[static_cast<std::size_t>(f[0])];
    const Vec<2>& b = mesh.vertices[static_cast<std::size_t>(f[1])];
    const Vec<2> s = b - a;
    const double den = dir.x() * s.y() - dir.y() * s.x();
    if (std::abs(den) < 1e-15) continue;
    const Vec<2> d = a - p;
    const double t = (d.x() * s.y() - d.y() * s.x()) / den;
    const double u = (d.x() * dir.y() - d.y() * dir.x()) / den;
    if (t > 0.0 && u >= 0.0 && u < 1.0) ++crossings;
  }
  return crossings % 2 == 1;
}

/// Boundary intersection points between two closed surfaces (3D: triangle
/// edges against triangles both ways; 2D: all segment pairs), with
/// bounding-box culling.
inline void surfacePoints(const TriMesh<3>& A, const TriMesh<3>& B, std::vector<Vec<3>>& out) {
  auto edgeHits = [&](const TriMesh<3>& E, const TriMesh<3>& T) {
    for (const auto& fe : E.faces) {
      const Vec<3>* v[3] = {&E.vertices[static_cast<std::size_t>(fe[0])],
                            &E.vertices[static_cast<std::size_t>(fe[1])],
                            &E.vertices[static_cast<std::size_t>(fe[2])]};
      Box<3> be = Box<3>::empty();
      for (int i = 0; i < 3; ++i) be.expand(*v[i]);
      for (const auto& ft : T.faces) {
        const Vec<3>& a = T.vertices[static_cast<std::size_t>(ft[0])];
        const Vec<3>& b = T.vertices[static_cast<std::size_t>(ft[1])];
        const Vec<3>& c = T.vertices[static_cast<std::size_t>(ft[2])];
        Box<3> bt = Box<3>::empty();
        bt.expand(a);
        bt.expand(b);
        bt.expand(c);
        if (!be.intersects(bt)) continue;
        for (int i = 0; i < 3; ++i) {
          const Vec<3>& p = *v[i];
          const Vec<3> d = *v[(i + 1) % 3] - p;
          double s;
          if (rayTriangle(p, d, a, b, c, s) && s >= 0.0 && s <= 1.0) out.push_back(p + s * d);
        }
      }
    }
  };
  edgeHits(A, B);
  edgeHits(B, A);
}

inline void surfacePoints(const TriMesh<2>& A, const TriMesh<2>& B, std::vector<Vec<2>>& out) {
  for (const auto& fa : A.faces) {
    const Vec<2>& p = A.vertices[static_cast<std::size_t>(fa[0])];
    const Vec<2>& q = A.vertices[static_cast<std::size_t>(fa[1])];
    for (const auto& fb : B.faces) {
      Vec<2> x;
      if (segSegPoint(p, q, B.vertices[static_cast<std::size_t>(fb[0])],
                      B.vertices[static_cast<std::size_t>(fb[1])], x))
        out.push_back(x);
    }
  }
}

}  // namespace detail

/// Collision oracle over the precomputed per-orientation obstacle masks.
/// States snap to the nearest translation-lattice cell; off-field states are
/// free because every slice frame covers all translations where the bounding
/// boxes can overlap. The dilated masks (Chebyshev radius one) make a
/// negative answer robust to the half-cell snap *and* to segment sampling at
/// half-cell resolution, so transit waypoints validated here are collision
/// free for the exact meshes, not just the rasterized ones.
template <int D>
class VoxelChecker {
 public:
  explicit VoxelChecker(const ContactSpace<D>* space) : space_(space) {
    for (const auto& s : space->slices)
      if (s.obstacleMask.empty() && s.frame.cellCount() > 0)
        raise(Errc::ConfigError, "VoxelChecker needs obstacle masks (keepObstacleMasks)");
    dilated_.reserve(space->slices.size());
    for (const auto& s : space->slices) dilated_.push_back(dilateMask(s));
  }

  const ContactSpace<D>& space() const { return *space_; }
  double spacing() const { return space_->spacing; }
  int rotationCount() const { return space_->rotations.size(); }

  Classification classify(int rotation, const Vec<D>& t) const {
    const auto& slice = slice_(rotation);
    IVec<D> cell;
    if (!snap(slice.frame, t, cell)) return Classification::Free;
    const Index lin = slice.frame.linearIndex(cell);
    if (!slice.obstacleMask[static_cast<std::size_t>(lin)]) return Classification::Free;
    return slice.isContact(lin) ? Classification::Contact : Classification::Collide;
  }

  /// Free with a one-cell safety margin; the planner's transit predicate.
  bool transitFree(int rotation, const Vec<D>& t) const {
    const auto& slice = slice_(rotation);
    IVec<D> cell;
    if (!snap(slice.frame, t, cell)) return true;
    return !dilated_[static_cast<std::size_t>(rotation)][static_cast<std::size_t>(
        slice.frame.linearIndex(cell))];
  }

  /// Contact allowed, collision not; the approach-segment predicate.
  bool approachOk(int rotation, const Vec<D>& t) const {
    return classify(rotation, t) != Classification::Collide;
  }

  bool transitSegment(int rotation, const Vec<D>& a, const Vec<D>& b) const {
    return sampleSegment(a, b, [&](const Vec<D>& p) { return transitFree(rotation, p); });
  }
  bool approachSegment(int rotation, const Vec<D>& a, const Vec<D>& b) const {
    return sampleSegment(a, b, [&](const Vec<D>& p) { return approachOk(rotation, p); });
  }

  /// Union of all slice-frame bounds: the region worth sampling.
  Box<D> fieldBounds() const {
    Box<D> b = Box<D>::empty();
    for (const auto& s : space_->slices) {
      if (s.frame.cellCount() == 0) continue;
      b.expand(s.frame.bounds());
    }
    return b;
  }

  /// Nearest translation-lattice cell (the snapped state); false off-field.
  bool snap(const GridFrame<D>& frame, const Vec<D>& t, IVec<D>& cell) const {
    for (int a = 0; a < D; ++a) {
      cell[a] = static_cast<int>(std::llround((t[a] - frame.origin[a]) / frame.spacing - 0.5));
      if (cell[a] < 0 || cell[a] >= frame.dims[a]) return false;
    }
    return true;
  }

  const GridFrame<D>& frameOf(int rotation) const { return slice_(rotation).frame; }

 private:
  const ContactSlice<D>& slice_(int rotation) const {
    return space_->slices[static_cast<std::size_t>(rotation)];
  }

  template <typename Pred>
  bool sampleSegment(const Vec<D>& a, const Vec<D>& b, Pred ok) const {
    const double len = (b - a).norm();
    const int steps = std::max(1, static_cast<int>(std::ceil(len / (0.5 * space_->spacing))));
    for (int i = 0; i <= steps; ++i) {
      const double s = static_cast<double>(i) / steps;
      if (!ok(Vec<D>(a + s * (b - a)))) return false;
    }
    return true;
  }

  std::vector<std::uint8_t> dilateMask(const ContactSlice<D>& s) const {
    const Index n = s.frame.cellCount();
    std::vector<std::uint8_t> out(static_cast<std::size_t>(n), 0);
    for (Index lin = 0; lin < n; ++lin) {
      if (!s.obstacleMask[static_cast<std::size_t>(lin)]) continue;
      const IVec<D> c = s.frame.cellAt(lin);
      IVec<D> d;
      for (int m = 0; m < detail::pow3<D>(); ++m) {
        int rest = m;
        bool in = true;
        for (int a = 0; a < D; ++a) {
          d[a] = c[a] + rest % 3 - 1;
          rest /= 3;
          if (d[a] < 0 || d[a] >= s.frame.dims[a]) in = false;
        }
        if (in) out[static_cast<std::size_t>(s.frame.linearIndex(d))] = 1;
      }
    }
    return out;
  }

  const ContactSpace<D>* space_;
  std::vector<std::vector<std::uint8_t>> dilated_;
};

/// Exact-geometry collision oracle used to cross-check voxel results.
/// Classifies by interference measure: tool volume is sampled on a fixed
/// tool-local lattice and tested against the scene solid, so the verdict
/// reproduces the ε-interference semantics without reference to any grid.
/// Zero-measure surface touches still count as contact.
template <int D>
class MeshChecker {
 public:
  MeshChecker(TriMesh<D> scene, TriMesh<D> tool, double epsVolume, double sampleStep)
      : scene_(std::move(scene)),
        tool_(std::move(tool)),
        epsVolume_(epsVolume),
        sampleVol_(std::pow(sampleStep, D)) {
    sceneBounds_ = scene_.bounds();
    shellReps_ = shellRepresentatives(scene_);
    const Box<D> tb = tool_.bounds();
    IVec<D> n;
    Vec<D> start;
    Index total = 1;
    for (int a = 0; a < D; ++a) {
      const double span = tb.hi[a] - tb.lo[a];
      n[a] = std::max(1, static_cast<int>(std::floor(span / sampleStep)));
      start[a] = tb.lo[a] + 0.5 * (span - (n[a] - 1) * sampleStep);
      total *= n[a];
    }
    for (Index lin = 0; lin < total; ++lin) {
      Index rest = lin;
      Vec<D> p;
      for (int a = 0; a < D; ++a) {
        p[a] = start[a] + static_cast<double>(rest % n[a]) * sampleStep;
        rest /= n[a];
      }
      if (detail::pointInMesh(tool_, p)) samples_.push_back(p);
    }
  }

  Classification classify(const RigidTransform<D>& tau) const {
    TriMesh<D> moved = tool_;
    for (auto& v : moved.vertices) v = tau.apply(v);
    if (!moved.bounds().intersects(sceneBounds_)) return Classification::Free;

    Index inside = 0;
    for (const auto& p : samples_)
      if (detail::pointInMesh(scene_, tau.apply(p))) ++inside;
    const double vol = static_cast<double>(inside) * sampleVol_;
    if (vol >= epsVolume_) return Classification::Collide;
    if (inside > 0) return Classification::Contact;

    // Measure-zero interference: surface touch is contact; a containment the
    // sampling missed (sub-sample shell swallowed whole) is a collision.
    std::vector<Vec<D>> pts;
    detail::surfacePoints(moved, scene_, pts);
    if (!pts.empty()) return Classification::Contact;
    if (detail::pointInMesh(scene_, moved.vertices[0])) return Classification::Collide;
    for (int rep : shellReps_)
      if (detail::pointInMesh(moved, scene_.vertices[static_cast<std::size_t>(rep)]))
        return Classification::Collide;
    return Classification::Free;
  }

  double epsVolume() const { return epsVolume_; }

 private:
  /// One representative vertex per connected shell, so a small scene shell
  /// swallowed whole by the tool is still detected.
  static std::vector<int> shellRepresentatives(const TriMesh<D>& m) {
    std::vector<int> parent(m.vertices.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] =
            parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
      }
      return x;
    };
    for (const auto& f : m.faces)
      for (int i = 1; i < TriMesh<D>::kFaceSize; ++i) {
        const int a = find(f[0]), b = find(f[static_cast<std::size_t>(i)]);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }
    std::vector<int> reps;
    for (std::size_t i = 0; i < parent.size(); ++i)
      if (find(static_cast<int>(i)) == static_cast<int>(i)) reps.push_back(static_cast<int>(i));
    return reps;
  }

  TriMesh<D> scene_;
  TriMesh<D> tool_;
  double epsVolume_;
  double sampleVol_;
  Box<D> sceneBounds_;
  std::vector<int> shellReps_;
  std::vector<Vec<D>> samples_;
};

enum class LegVerdict { Ok, StartBlocked, GoalBlocked, NotFound };

inline const char* to_string(LegVerdict v) {
  switch (v) {
    case LegVerdict::Ok: return "Ok";
    case LegVerdict::StartBlocked: return "StartBlocked";
    case LegVerdict::GoalBlocked: return "GoalBlocked";
    case LegVerdict::NotFound: return "PathNotFound";
  }
  return "Unknown";
}

enum class WaypointKind { Transit, Approach, Fracture };

inline const char* to_string(WaypointKind k) {
  switch (k) {
    case WaypointKind::Transit: return "transit";
    case WaypointKind::Approach: return "approach";
    case WaypointKind::Fracture: return "fracture";
  }
  return "unknown";
}

template <int D>
struct PathState {
  int rotation = 0;  // index into the rotation sample
  Vec<D> translation{Vec<D>::Zero()};
  int leg = 0;
  WaypointKind kind = WaypointKind::Transit;
};

/// A full removal path for one round: reference → each fracture → reference.
/// `resolution` is the largest observed inter-waypoint step in the weighted
/// SE(d) metric; verdicts are data, not exceptions.
template <int D>
struct ToolPath {
  std::vector<PathState<D>> states;
  double resolution = 0.0;
  LegVerdict verdict = LegVerdict::Ok;
  int failedLeg = -1;
  int failedFeature = -1;
};

struct PlannerOptions {
  double stepSize = 0.0;  // translation step; 0 → 2 × lattice spacing
  int maxNodes = 4000;    // per leg, both trees combined
  double timeBudgetSec = 10.0;
  double goalBias = 0.1;
  int memberRetries = 3;   // fiber members tried in total when a leg fails
  int retractRadius = 4;   // cells searched when freeing an endpoint
  int shortcutRounds = 2;
  std::uint64_t seed = 0;
  double wRot = 1.0;
  double wTrans = 1.0;
};

namespace detail {

template <int D>
struct PlannerState {
  int rot;
  Vec<D> t;
};

template <int D>
double stateDistance(const PlannerState<D>& a, const PlannerState<D>& b,
                     const RotationSample<D>& rots, double wRot, double wTrans) {
  return riemannian_distance(RigidTransform<D>{rots.rotations[static_cast<std::size_t>(a.rot)], a.t},
                             RigidTransform<D>{rots.rotations[static_cast<std::size_t>(b.rot)], b.t},
                             wRot, wTrans);
}

/// Retracts a grazing endpoint to a nearby transit-free lattice state whose
/// straight approach segment never collides. Candidates are ordered by
/// distance then lexicographic cell index, so the choice is deterministic.
template <int D>
std::optional<Vec<D>> retractEndpoint(const VoxelChecker<D>& checker, int rotation,
                                      const Vec<D>& t, int radius) {
  if (checker.transitFree(rotation, t)) return t;
  const auto& frame = checker.frameOf(rotation);
  IVec<D> base;
  if (!checker.snap(frame, t, base)) return std::nullopt;

  struct Candidate {
    double dist;
    std::array<int, D> key;
    Vec<D> p;
  };
  std::vector<Candidate> cands;
  IVec<D> c;
  const int side = 2 * radius + 1;
  int total = 1;
  for (int a = 0; a < D; ++a) total *= side;
  for (int m = 0; m < total; ++m) {
    int rest = m;
    bool in = true;
    for (int a = 0; a < D; ++a) {
      c[a] = base[a] + rest % side - radius;
      rest /= side;
      if (c[a] < 0 || c[a] >= frame.dims[a]) in = false;
    }
    if (!in) continue;
    const Vec<D> p = frame.cellCenter(c);
    if (!checker.transitFree(rotation, p)) continue;
    Candidate cand;
    cand.dist = (p - t).norm();
    for (int a = 0; a < D; ++a) cand.key[static_cast<std::size_t>(a)] = c[a];
    cand.p = p;
    cands.push_back(cand);
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.key < b.key;
  });
  for (const auto& cand : cands)
    if (checker.approachSegment(rotation, t, cand.p)) return cand.p;
  return std::nullopt;
}

/// Bidirectional RRT-Connect over (orientation index, translation) states.
/// Translation steering is continuous; orientation changes are discrete
/// switches taken only at states valid under both slices. Returns the transit
/// waypoints including both (transit-free) endpoints.
template <int D>
std::optional<std::vector<PlannerState<D>>> planTransit(const VoxelChecker<D>& checker,
                                                        const RotationSample<D>& rots,
                                                        const PlannerState<D>& start,
                                                        const PlannerState<D>& goal,
                                                        const PlannerOptions& opt, Rng& rng) {
  const double h = checker.spacing();
  const double step = opt.stepSize > 0.0 ? opt.stepSize : 2.0 * h;

  // Fast path: straight translation plus at most one orientation switch.
  auto directConnect =
      [&](const PlannerState<D>& a,
          const PlannerState<D>& b) -> std::optional<std::vector<PlannerState<D>>> {
    if (a.rot == b.rot) {
      if (checker.transitSegment(a.rot, a.t, b.t)) return std::vector<PlannerState<D>>{a, b};
      return std::nullopt;
    }
    if (checker.transitFree(b.rot, a.t) && checker.transitSegment(b.rot, a.t, b.t))
      return std::vector<PlannerState<D>>{a, {b.rot, a.t}, b};
    if (checker.transitFree(a.rot, b.t) && checker.transitSegment(a.rot, a.t, b.t))
      return std::vector<PlannerState<D>>{a, {a.rot, b.t}, b};
    return std::nullopt;
  };
  if (auto direct = directConnect(start, goal)) return direct;

  Box<D> box = checker.fieldBounds();
  if (box.isEmpty()) box = Box<D>();
  box.expand(start.t);
  box.expand(goal.t);
  box = box.inflated(2.0 * h);

  struct Node {
    PlannerState<D> s;
    int parent;
  };
  std::vector<Node> trees[2];
  trees[0].push_back({start, -1});
  trees[1].push_back({goal, -1});

  auto nearest = [&](const std::vector<Node>& tree, const PlannerState<D>& q) {
    int best = 0;
    double bestD = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tree.size(); ++i) {
      const double d = stateDistance(tree[i].s, q, rots, opt.wRot, opt.wTrans);
      if (d < bestD - 1e-15) {
        bestD = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  };

  // Extends one node toward q: a capped translation step at the current
  // orientation, or a discrete orientation switch once translations align.
  auto steer = [&](const PlannerState<D>& from, const PlannerState<D>& q,
                   PlannerState<D>& out) -> bool {
    const Vec<D> d = q.t - from.t;
    const double len = d.norm();
    if (len > 1e-12) {
      const double adv = std::min(step, len);
      out = {from.rot, Vec<D>(from.t + d * (adv / len))};
      return checker.transitSegment(out.rot, from.t, out.t);
    }
    if (q.rot != from.rot) {
      out = {q.rot, from.t};
      return checker.transitFree(out.rot, out.t);  // valid under both slices
    }
    return false;
  };

  auto reached = [](const PlannerState<D>& a, const PlannerState<D>& b) {
    return a.rot == b.rot && (a.t - b.t).norm() < 1e-9;
  };

  const auto t0 = std::chrono::steady_clock::now();
  int active = 0;
  int joinA = -1, joinB = -1;  // node ids in trees[0]/trees[1]
  while (static_cast<int>(trees[0].size() + trees[1].size()) < opt.maxNodes) {
    if (std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
        opt.timeBudgetSec)
      break;

    PlannerState<D> q;
    if (rng.uniform() < opt.goalBias) {
      q = trees[1 - active][0].s;
    } else {
      q.rot = rng.uniformInt(rots.size());
      for (int a = 0; a < D; ++a) q.t[a] = box.lo[a] + rng.uniform() * (box.hi[a] - box.lo[a]);
    }

    // Connect-style extension of the active tree toward the sample.
    int cur = nearest(trees[active], q);
    int lastNew = -1;
    for (int it = 0; it < 64; ++it) {
      PlannerState<D> nxt;
      if (!steer(trees[active][static_cast<std::size_t>(cur)].s, q, nxt)) break;
      trees[active].push_back({nxt, cur});
      cur = static_cast<int>(trees[active].size()) - 1;
      lastNew = cur;
      if (reached(nxt, q)) break;
    }

    if (lastNew >= 0) {
      // Try to connect the other tree all the way to the new node.
      const PlannerState<D> target = trees[active][static_cast<std::size_t>(lastNew)].s;
      int ocur = nearest(trees[1 - active], target);
      for (int it = 0; it < 256; ++it) {
        PlannerState<D> nxt;
        if (!steer(trees[1 - active][static_cast<std::size_t>(ocur)].s, target, nxt)) break;
        trees[1 - active].push_back({nxt, ocur});
        ocur = static_cast<int>(trees[1 - active].size()) - 1;
        if (reached(nxt, target)) {
          joinA = active == 0 ? lastNew : ocur;
          joinB = active == 0 ? ocur : lastNew;
          break;
        }
      }
    }
    if (joinA >= 0) break;
    active = 1 - active;
  }
  if (joinA < 0) return std::nullopt;

  std::vector<PlannerState<D>> path;
  for (int i = joinA; i >= 0; i = trees[0][static_cast<std::size_t>(i)].parent)
    path.push_back(trees[0][static_cast<std::size_t>(i)].s);
  std::reverse(path.begin(), path.end());
  for (int i = trees[1][static_cast<std::size_t>(joinB)].parent; i >= 0;
       i = trees[1][static_cast<std::size_t>(i)].parent)
    path.push_back(trees[1][static_cast<std::size_t>(i)].s);

  // Deterministic shortcut: greedily replace spans between same-orientation
  // waypoints with straight transit-valid segments.
  for (int round = 0; round < opt.shortcutRounds; ++round) {
    bool changed = false;
    std::vector<PlannerState<D>> shortened;
    std::size_t i = 0;
    while (i < path.size()) {
      shortened.push_back(path[i]);
      std::size_t best = i;
      for (std::size_t j = path.size() - 1; j > i + 1; --j) {
        if (path[j].rot != path[i].rot) continue;
        if (checker.transitSegment(path[i].rot, path[i].t, path[j].t)) {
          best = j;
          break;
        }
      }
      if (best > i + 1) changed = true;
      i = std::max(best, i + 1);
    }
    path = std::move(shortened);
    if (!changed) break;
  }
  return path;
}

}  // namespace detail

/// One planned round: the (possibly member-retried) visit sequence and the
/// tool path touching every fracture configuration.
template <int D>
struct RoundPlan {
  VisitSequence<D> sequence;
  ToolPath<D> path;
  bool success = false;
};

/// Plans reference → fracture_1 → ... → fracture_n → reference. Every
/// fracture is reached by retracting its grazing configuration to a nearby
/// free state, planning a transit leg between free states, then appending the
/// contact-tolerant approach. A failed leg retries with the fiber's other
/// members (nearest first) before giving up; failure is reported in the
/// verdict, never thrown.
template <int D>
RoundPlan<D> plan_round(const VoxelChecker<D>& checker, const VisitSequence<D>& seq,
                        const std::vector<Fiber<D>>& fibers, const RotationSample<D>& rotations,
                        const RigidTransform<D>& tauRef, const PlannerOptions& opt) {
  RoundPlan<D> plan;
  plan.sequence = seq;

  // The reference state lives on the sampled orientation nearest to tauRef.
  int refRot = 0;
  {
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < rotations.size(); ++s) {
      const double gap = rotationAngle(rotations.rotations[static_cast<std::size_t>(s)], tauRef.r);
      if (gap < best - 1e-15) {
        best = gap;
        refRot = s;
      }
    }
  }
  const detail::PlannerState<D> refState{refRot, tauRef.t};

  auto fiberOf = [&](int featureId) -> const Fiber<D>* {
    for (const auto& f : fibers)
      if (f.featureId == featureId) return &f;
    return nullptr;
  };

  auto& path = plan.path;
  path.states.push_back({refRot, tauRef.t, 0, WaypointKind::Transit});
  if (!checker.transitFree(refRot, tauRef.t)) {
    path.verdict = LegVerdict::StartBlocked;
    path.failedLeg = 0;
    return plan;
  }

  detail::PlannerState<D> prevFree = refState;
  int leg = 0;
  for (std::size_t vi = 0; vi < plan.sequence.visits.size(); ++vi) {
    auto& visit = plan.sequence.visits[vi];
    const Fiber<D>* fiber = fiberOf(visit.featureId);
    if (!fiber) raise(Errc::ConfigError, "visit references unknown feature");

    // Members to try: the sequenced one first, then the rest ordered by
    // distance from the previous free state.
    std::vector<int> members{visit.member};
    {
      std::vector<std::pair<double, int>> rest;
      for (int m = 0; m < static_cast<int>(fiber->anchors.size()); ++m) {
        if (m == visit.member) continue;
        const auto& a = fiber->anchors[static_cast<std::size_t>(m)];
        const RigidTransform<D> tau{rotations.rotations[static_cast<std::size_t>(a.rotation)],
                                    a.translation};
        rest.push_back(
            {riemannian_distance(
                 RigidTransform<D>{rotations.rotations[static_cast<std::size_t>(prevFree.rot)],
                                   prevFree.t},
                 tau, opt.wRot, opt.wTrans),
             m});
      }
      std::sort(rest.begin(), rest.end());
      for (const auto& [d, m] : rest) members.push_back(m);
      const std::size_t cap = static_cast<std::size_t>(std::max(1, opt.memberRetries));
      if (members.size() > cap) members.resize(cap);
    }

    bool done = false;
    LegVerdict lastVerdict = LegVerdict::NotFound;
    for (std::size_t attempt = 0; attempt < members.size() && !done; ++attempt) {
      const int m = members[attempt];
      const auto& anchor = fiber->anchors[static_cast<std::size_t>(m)];
      const int rot = anchor.rotation;

      const auto retracted =
          detail::retractEndpoint(checker, rot, anchor.translation, opt.retractRadius);
      if (!retracted) {
        lastVerdict = LegVerdict::GoalBlocked;
        continue;
      }
      const detail::PlannerState<D> goalFree{rot, *retracted};

      Rng rng(subSeed(opt.seed, static_cast<std::uint64_t>(leg),
                      static_cast<std::uint64_t>(attempt)));
      auto transit = detail::planTransit(checker, rotations, prevFree, goalFree, opt, rng);
      if (!transit) {
        lastVerdict = LegVerdict::NotFound;
        continue;
      }

      for (std::size_t i = 1; i < transit->size(); ++i)
        path.states.push_back({(*transit)[i].rot, (*transit)[i].t, leg, WaypointKind::Transit});
      if (!path.states.empty() && path.states.back().kind == WaypointKind::Transit)
        path.states.back().kind = WaypointKind::Approach;
      path.states.push_back({rot, anchor.translation, leg, WaypointKind::Fracture});

      visit.member = m;
      visit.config =
          RigidTransform<D>{rotations.rotations[static_cast<std::size_t>(rot)], anchor.translation};

      // Depart back to the retracted free state for the next leg.
      path.states.push_back({rot, *retracted, leg + 1, WaypointKind::Approach});
      prevFree = goalFree;
      done = true;
    }
    if (!done) {
      path.verdict = lastVerdict;
      path.failedLeg = leg;
      path.failedFeature = visit.featureId;
      return plan;
    }
    ++leg;
  }

  // Return to reference.
  {
    Rng rng(subSeed(opt.seed, static_cast<std::uint64_t>(leg), 0xffu));
    auto transit = detail::planTransit(checker, rotations, prevFree, refState, opt, rng);
    if (!transit) {
      path.verdict = LegVerdict::NotFound;
      path.failedLeg = leg;
      return plan;
    }
    for (std::size_t i = 1; i < transit->size(); ++i)
      path.states.push_back({(*transit)[i].rot, (*transit)[i].t, leg, WaypointKind::Transit});
  }

  // Densify long straight segments so waypoints are at most one step apart;
  // replaying the waypoints alone then exercises the whole path.
  {
    const double step = opt.stepSize > 0.0 ? opt.stepSize : 2.0 * checker.spacing();
    std::vector<PathState<D>> dense;
    dense.push_back(path.states.front());
    for (std::size_t i = 1; i < path.states.size(); ++i) {
      const auto& a = path.states[i - 1];
      const auto& b = path.states[i];
      const double len = (b.translation - a.translation).norm();
      if (a.rotation == b.rotation && len > step) {
        const int pieces = static_cast<int>(std::ceil(len / step));
        for (int k = 1; k < pieces; ++k) {
          PathState<D> mid = b;
          mid.kind = b.kind == WaypointKind::Fracture ? WaypointKind::Approach : b.kind;
          mid.translation =
              a.translation + (b.translation - a.translation) * (static_cast<double>(k) / pieces);
          dense.push_back(mid);
        }
      }
      dense.push_back(b);
    }
    path.states = std::move(dense);
  }

  path.resolution = 0.0;
  for (std::size_t i = 1; i < path.states.size(); ++i) {
    const auto& a = path.states[i - 1];
    const auto& b = path.states[i];
    path.resolution = std::max(
        path.resolution,
        riemannian_distance(
            RigidTransform<D>{rotations.rotations[static_cast<std::size_t>(a.rotation)],
                              a.translation},
            RigidTransform<D>{rotations.rotations[static_cast<std::size_t>(b.rotation)],
                              b.translation},
            opt.wRot, opt.wTrans));
  }
  path.verdict = LegVerdict::Ok;
  plan.success = true;
  return plan;
}

}  // namespace srp
