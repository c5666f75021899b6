#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <vector>

#include "srp/core.hpp"
#include "srp/se3.hpp"

namespace srp {

/// A fiber reduced to what sequencing needs: its feature id and the concrete
/// candidate configurations.
template <int D>
struct FiberConfigs {
  int featureId = -1;
  std::vector<RigidTransform<D>> configs;
};

/// Complete undirected graph over {reference} ∪ {round fibers}. Vertex 0 is
/// the reference configuration (a singleton fiber); edge weights are min-min
/// fiber distances with the arg-min member pair cached per edge.
template <int D>
struct FiberGraph {
  std::vector<FiberConfigs<D>> fibers;  // index 0 = reference singleton
  Eigen::MatrixXd weight;

  struct EdgePair {
    int memberU = -1, memberV = -1;  // arg-min member indices on either end
  };
  std::vector<std::vector<EdgePair>> pairs;

  double wRot = 1.0, wTrans = 1.0;
  int size() const { return static_cast<int>(fibers.size()); }
};

template <int D>
FiberGraph<D> build_graph(const std::vector<FiberConfigs<D>>& fibers,
                          const RigidTransform<D>& tauRef, double wRot = 1.0,
                          double wTrans = 1.0) {
  for (const auto& f : fibers)
    if (f.configs.empty()) raise(Errc::EmptyFiber, "build_graph with empty fiber");

  FiberGraph<D> g;
  g.wRot = wRot;
  g.wTrans = wTrans;
  g.fibers.push_back({-1, {tauRef}});
  g.fibers.insert(g.fibers.end(), fibers.begin(), fibers.end());

  const int n = g.size();
  g.weight = Eigen::MatrixXd::Zero(n, n);
  g.pairs.assign(static_cast<std::size_t>(n), std::vector<typename FiberGraph<D>::EdgePair>(
                                                  static_cast<std::size_t>(n)));
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const auto r = fiber_distance(g.fibers[u].configs, g.fibers[v].configs, wRot, wTrans);
      g.weight(u, v) = g.weight(v, u) = r.distance;
      g.pairs[u][v] = {r.index1, r.index2};
      g.pairs[v][u] = {r.index2, r.index1};
    }
  return g;
}

/// One fracture visit: which feature, with which concrete configuration.
template <int D>
struct Visit {
  int featureId = -1;
  int vertex = -1;  // graph vertex
  int member = -1;  // index into the fiber's configuration list
  RigidTransform<D> config;
};

template <int D>
struct VisitSequence {
  RigidTransform<D> tauRef;
  std::vector<Visit<D>> visits;  // tour order; the cycle closes at tauRef
  double cost = 0.0;             // Σ consecutive distances of chosen configs
  double edgeCost = 0.0;         // Σ min-min edge weights along the tour
  double mstWeight = 0.0;
  bool triangleHolds = true;     // pairwise weights satisfied the triangle inequality
  bool withinTwoMst = true;      // edgeCost ≤ 2·mstWeight (meaningful when triangleHolds)
};

namespace detail {

/// Prim MST rooted at 0 with lexicographic tie-break; returns parent array.
inline std::vector<int> primParents(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<double> key(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<bool> in(static_cast<std::size_t>(n), false);
  key[0] = 0.0;
  for (int it = 0; it < n; ++it) {
    int u = -1;
    for (int v = 0; v < n; ++v)
      if (!in[v] && (u < 0 || key[v] < key[u] - 1e-300)) u = v;
    in[u] = true;
    for (int v = 0; v < n; ++v)
      if (!in[v] && w(u, v) < key[v]) {
        key[v] = w(u, v);
        parent[v] = u;
      }
  }
  return parent;
}

inline double mstWeightOf(const Eigen::MatrixXd& w, const std::vector<int>& parent) {
  double total = 0.0;
  for (int v = 1; v < static_cast<int>(parent.size()); ++v) total += w(parent[v], v);
  return total;
}

/// Preorder walk of the MST, children visited in ascending vertex id.
inline std::vector<int> preorder(const std::vector<int>& parent) {
  const int n = static_cast<int>(parent.size());
  std::vector<std::vector<int>> kids(static_cast<std::size_t>(n));
  for (int v = 1; v < n; ++v) kids[static_cast<std::size_t>(parent[v])].push_back(v);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    order.push_back(u);
    auto& ks = kids[static_cast<std::size_t>(u)];
    std::sort(ks.rbegin(), ks.rend());  // reversed so the smallest pops first
    for (int k : ks) stack.push_back(k);
  }
  return order;
}

inline bool triangleInequalityHolds(const Eigen::MatrixXd& w, double tol = 1e-9) {
  const int n = static_cast<int>(w.rows());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (a != b && b != c && a != c && w(a, c) > w(a, b) + w(b, c) + tol) return false;
  return true;
}

template <int D>
void finalizeSequence(const FiberGraph<D>& g, const std::vector<int>& tourOrder,
                      VisitSequence<D>& seq) {
  seq.tauRef = g.fibers[0].configs[0];
  seq.visits.clear();
  seq.edgeCost = 0.0;
  int prevVertex = 0;
  for (std::size_t k = 1; k < tourOrder.size(); ++k) {
    const int v = tourOrder[k];
    seq.edgeCost += g.weight(prevVertex, v);
    Visit<D> visit;
    visit.vertex = v;
    visit.featureId = g.fibers[static_cast<std::size_t>(v)].featureId;
    // Arrive on the edge's arg-min pair: the member chosen when traveling in.
    visit.member = g.pairs[static_cast<std::size_t>(prevVertex)][static_cast<std::size_t>(v)].memberV;
    visit.config = g.fibers[static_cast<std::size_t>(v)].configs[static_cast<std::size_t>(visit.member)];
    seq.visits.push_back(visit);
    prevVertex = v;
  }
  seq.edgeCost += g.weight(prevVertex, 0);

  seq.cost = 0.0;
  RigidTransform<D> prev = seq.tauRef;
  for (const auto& v : seq.visits) {
    seq.cost += riemannian_distance(prev, v.config, g.wRot, g.wTrans);
    prev = v.config;
  }
  seq.cost += riemannian_distance(prev, seq.tauRef, g.wRot, g.wTrans);
}

}  // namespace detail

/// MST-preorder tour: Hamiltonian cycle from a preorder walk of the minimum
/// spanning tree rooted at the reference. The classical 2×MST bound is
/// audited, not assumed — min-min fiber distances can violate the triangle
/// inequality.
template <int D>
VisitSequence<D> tsp_tour(const FiberGraph<D>& g) {
  const auto parent = detail::primParents(g.weight);
  const auto order = detail::preorder(parent);
  VisitSequence<D> seq;
  seq.mstWeight = detail::mstWeightOf(g.weight, parent);
  detail::finalizeSequence(g, order, seq);
  seq.triangleHolds = detail::triangleInequalityHolds(g.weight);
  seq.withinTwoMst = seq.edgeCost <= 2.0 * seq.mstWeight + 1e-9;
  return seq;
}

/// Exhaustive optimum over visit permutations (edge-weight objective); the
/// desk-scale oracle behind --exact-tsp. Limited to 10 fibers.
template <int D>
VisitSequence<D> exact_tsp(const FiberGraph<D>& g) {
  const int n = g.size();
  if (n - 1 > 10) raise(Errc::ConfigError, "exact TSP limited to 10 fibers");
  std::vector<int> perm(static_cast<std::size_t>(std::max(0, n - 1)));
  std::iota(perm.begin(), perm.end(), 1);

  std::vector<int> best = perm;
  double bestCost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    int prev = 0;
    for (int v : perm) {
      c += g.weight(prev, v);
      prev = v;
    }
    c += g.weight(prev, 0);
    if (c < bestCost - 1e-15) {
      bestCost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  const auto parent = detail::primParents(g.weight);
  VisitSequence<D> seq;
  seq.mstWeight = detail::mstWeightOf(g.weight, parent);
  std::vector<int> order{0};
  order.insert(order.end(), best.begin(), best.end());
  detail::finalizeSequence(g, order, seq);
  seq.triangleHolds = detail::triangleInequalityHolds(g.weight);
  seq.withinTwoMst = seq.edgeCost <= 2.0 * seq.mstWeight + 1e-9;
  return seq;
}

/// Greedy configuration refinement: walking the fixed tour order, each visit
/// re-selects the fiber member nearest (in the weighted metric) to the
/// previously chosen configuration; ties break to the lowest member index.
template <int D>
VisitSequence<D> greedy_configs(const VisitSequence<D>& seq, const FiberGraph<D>& g) {
  VisitSequence<D> out = seq;
  RigidTransform<D> prev = out.tauRef;
  for (auto& visit : out.visits) {
    const auto& configs = g.fibers[static_cast<std::size_t>(visit.vertex)].configs;
    int bestIdx = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int m = 0; m < static_cast<int>(configs.size()); ++m) {
      const double d = riemannian_distance(prev, configs[static_cast<std::size_t>(m)], g.wRot, g.wTrans);
      if (d < best - 1e-15) {
        best = d;
        bestIdx = m;
      }
    }
    visit.member = bestIdx;
    visit.config = configs[static_cast<std::size_t>(bestIdx)];
    prev = visit.config;
  }
  out.cost = 0.0;
  prev = out.tauRef;
  for (const auto& v : out.visits) {
    out.cost += riemannian_distance(prev, v.config, g.wRot, g.wTrans);
    prev = v.config;
  }
  out.cost += riemannian_distance(prev, out.tauRef, g.wRot, g.wTrans);
  return out;
}

}  // namespace srp
