#pragma once

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

#include "srp/core.hpp"

namespace srp::fft {

using Complex = std::complex<double>;

/// Smallest 5-smooth integer ≥ n (kissfft handles these sizes efficiently).
inline Index niceSize(Index n) {
  while (true) {
    Index m = n;
    for (int p : {2, 3, 5})
      while (m % p == 0) m /= p;
    if (m == 1) return n;
    ++n;
  }
}

/// In-place D-dimensional complex FFT as per-axis line transforms over an
/// x-fastest dense layout. Inverse applies the full 1/N scaling.
template <int D>
void transform(const IVec<D>& dims, std::vector<Complex>& data, bool inverse) {
  Eigen::FFT<double> engine;
  Index total = 1;
  for (int a = 0; a < D; ++a) total *= dims[a];

  std::vector<Complex> line, spec;
  for (int axis = 0; axis < D; ++axis) {
    const Index n = dims[axis];
    if (n == 1) continue;
    Index strideBefore = 1;
    for (int a = 0; a < axis; ++a) strideBefore *= dims[a];
    const Index strideAfter = total / (strideBefore * n);

    line.resize(static_cast<std::size_t>(n));
    spec.resize(static_cast<std::size_t>(n));
    for (Index hi = 0; hi < strideAfter; ++hi)
      for (Index lo = 0; lo < strideBefore; ++lo) {
        const Index base = hi * strideBefore * n + lo;
        for (Index k = 0; k < n; ++k) line[k] = data[base + k * strideBefore];
        if (inverse)
          engine.inv(spec, line);
        else
          engine.fwd(spec, line);
        for (Index k = 0; k < n; ++k) data[base + k * strideBefore] = spec[k];
      }
  }
}

/// Spectrum of a real array zero-padded into `padded` dims.
template <int D>
std::vector<Complex> paddedSpectrum(const IVec<D>& dims, const double* values,
                                    const IVec<D>& padded) {
  Index total = 1;
  for (int a = 0; a < D; ++a) total *= padded[a];
  std::vector<Complex> buf(static_cast<std::size_t>(total), Complex(0.0, 0.0));

  Index cells = 1;
  for (int a = 0; a < D; ++a) cells *= dims[a];
  for (Index lin = 0; lin < cells; ++lin) {
    Index rest = lin, plin = 0, stride = 1;
    for (int a = 0; a < D; ++a) {
      const Index ia = rest % dims[a];
      rest /= dims[a];
      plin += ia * stride;
      stride *= padded[a];
    }
    buf[plin] = Complex(values[lin], 0.0);
  }
  transform<D>(padded, buf, false);
  return buf;
}

}  // namespace srp::fft
