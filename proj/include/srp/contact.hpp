#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <unordered_map>
#include <vector>

#include "srp/core.hpp"
#include "srp/overlap.hpp"
#include "srp/rotation_sampling.hpp"

namespace srp {

namespace detail {

/// Deterministic parallel map over [0, n): results land by index, so the
/// schedule never affects output.
inline void parallelFor(int n, const std::function<void(int)>& body) {
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int workers = std::max(1, std::min(n, hw > 0 ? hw : 4));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// One orientation's slice of the ε-contact space: the translation-lattice
/// frame plus the sparse set of lattice cells whose overlap count lies in
/// (0, ε). An optional dense obstacle mask (count > 0) supports fast
/// collision checks during motion planning.
template <int D>
struct ContactSlice {
  GridFrame<D> frame;
  struct Entry {
    Index lin;
    long long count;
  };
  std::vector<Entry> contacts;  // sorted by linear index
  std::unordered_map<Index, long long> contactLookup;
  std::vector<std::uint8_t> obstacleMask;  // empty unless requested

  bool isContact(Index lin) const { return contactLookup.count(lin) != 0; }
};

/// Sparse ε-contact space over a rotation sample: for every sampled
/// orientation, the translations where the tool grazes the scene with
/// overlap volume strictly between zero and ε.
template <int D>
struct ContactSpace {
  RotationSample<D> rotations;
  double spacing = 1.0;
  double epsVolume = 0.0;
  long long epsCount = 0;
  std::vector<ContactSlice<D>> slices;

  Index totalContacts() const {
    Index n = 0;
    for (const auto& s : slices) n += static_cast<Index>(s.contacts.size());
    return n;
  }
};

struct ContactBuildOptions {
  FftBudget budget;
  bool keepObstacleMasks = false;
  bool parallel = true;
};

/// Builds the ε-contact space: per orientation the tool mesh is rotated about
/// its tip, re-rasterized on the half-offset lattice, and correlated against
/// the scene indicator with a scene spectrum cached at a shared padded size.
template <int D>
ContactSpace<D> contact_space(const VoxelGrid<D>& N, const Tool<D>& tool,
                              const RotationSample<D>& rotations, double epsVolume,
                              const ContactBuildOptions& options = {}) {
  const int n1 = rotations.size();
  const double h = N.frame.spacing;

  ContactSpace<D> out;
  out.rotations = rotations;
  out.spacing = h;
  out.epsVolume = epsVolume;
  out.epsCount = epsilonCount(epsVolume, h, D);
  out.slices.resize(static_cast<std::size_t>(n1));

  // Rasterize every orientation first to learn the shared padded size.
  std::vector<VoxelGrid<D>> toolGrids(static_cast<std::size_t>(n1));
  detail::parallelFor(n1, [&](int s) { toolGrids[s] = rotatedToolGrid(tool, rotations.rotations[s], h); });

  IVec<D> padded;
  Index padCells = 1;
  for (int a = 0; a < D; ++a) {
    int maxT = 1;
    for (const auto& tg : toolGrids) maxT = std::max(maxT, tg.frame.dims[a]);
    padded[a] = static_cast<int>(fft::niceSize(N.frame.dims[a] + maxT - 1));
    padCells *= padded[a];
  }
  if (padCells > options.budget.maxCells)
    raise(Errc::GridTooLarge, "padded FFT of " + std::to_string(padCells) + " cells exceeds budget");

  const auto specN = fft::paddedSpectrum<D>(N.frame.dims, N.values.data(), padded);

  auto buildSlice = [&](int s) {
    const VoxelGrid<D>& Tr = toolGrids[s];
    auto spec = fft::paddedSpectrum<D>(Tr.frame.dims, Tr.values.data(), padded);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] = specN[i] * std::conj(spec[i]);
    fft::transform<D>(padded, spec, true);

    ContactSlice<D>& slice = out.slices[static_cast<std::size_t>(s)];
    slice.frame = detail::correlationFrame(N.frame, Tr.frame);
    const Index cells = slice.frame.cellCount();
    if (options.keepObstacleMasks) slice.obstacleMask.assign(static_cast<std::size_t>(cells), 0);
    for (Index lin = 0; lin < cells; ++lin) {
      Index rest = lin, plin = 0, stride = 1;
      for (int a = 0; a < D; ++a) {
        const Index u = rest % slice.frame.dims[a];
        rest /= slice.frame.dims[a];
        Index k = u - (Tr.frame.dims[a] - 1);
        if (k < 0) k += padded[a];
        plin += k * stride;
        stride *= padded[a];
      }
      const auto cnt = std::llround(spec[plin].real());
      if (cnt <= 0) continue;
      if (options.keepObstacleMasks) slice.obstacleMask[static_cast<std::size_t>(lin)] = 1;
      if (cnt < out.epsCount) {
        slice.contacts.push_back({lin, cnt});
        slice.contactLookup.emplace(lin, cnt);
      }
    }
  };

  if (options.parallel)
    detail::parallelFor(n1, buildSlice);
  else
    for (int s = 0; s < n1; ++s) buildSlice(s);
  return out;
}

/// Accumulates the contact space over orientations: for each translation
/// lattice point, the number of sampled orientations in ε-contact there.
/// The result frame is the lattice-aligned union of the per-orientation
/// slice frames.
template <int D>
VoxelGrid<D> projected_contact_field(const ContactSpace<D>& contact) {
  if (contact.slices.empty()) return VoxelGrid<D>();

  GridFrame<D> u;
  u.spacing = contact.spacing;
  Vec<D> lo = contact.slices[0].frame.origin;
  Vec<D> hi = lo;
  for (const auto& s : contact.slices) {
    lo = lo.cwiseMin(s.frame.origin);
    hi = hi.cwiseMax(s.frame.origin +
                     contact.spacing * s.frame.dims.template cast<double>().matrix());
  }
  u.origin = lo;
  for (int a = 0; a < D; ++a) u.dims[a] = static_cast<int>(std::llround((hi[a] - lo[a]) / u.spacing));

  VoxelGrid<D> field(u);
  for (const auto& s : contact.slices) {
    IVec<D> off;
    for (int a = 0; a < D; ++a)
      off[a] = static_cast<int>(std::llround((s.frame.origin[a] - u.origin[a]) / u.spacing));
    for (const auto& e : s.contacts) field.at(s.frame.cellAt(e.lin) + off) += 1.0;
  }
  return field;
}

}  // namespace srp
