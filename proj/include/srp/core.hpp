#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace srp {

template <int D>
using Vec = Eigen::Matrix<double, D, 1>;

template <int D>
using IVec = Eigen::Array<int, D, 1>;

using Index = std::int64_t;

/// Error codes for contract violations. Pipeline verdicts (PathNotFound,
/// Unreachable, ...) are returned as data, never thrown.
enum class Errc {
  NonWatertight,
  DegenerateMesh,
  FrameMismatch,
  BadMethodForDimension,
  EmptyFiber,
  GridTooLarge,
  OutOfFieldBounds,
  NoContact,
  ConfigError,
  IoError,
};

inline const char* to_string(Errc c) {
  switch (c) {
    case Errc::NonWatertight: return "NonWatertight";
    case Errc::DegenerateMesh: return "DegenerateMesh";
    case Errc::FrameMismatch: return "FrameMismatch";
    case Errc::BadMethodForDimension: return "BadMethodForDimension";
    case Errc::EmptyFiber: return "EmptyFiber";
    case Errc::GridTooLarge: return "GridTooLarge";
    case Errc::OutOfFieldBounds: return "OutOfFieldBounds";
    case Errc::NoContact: return "NoContact";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

/// Axis-aligned box over doubles.
template <int D>
struct Box {
  Vec<D> lo{Vec<D>::Constant(0.0)};
  Vec<D> hi{Vec<D>::Constant(0.0)};

  static Box empty() {
    Box b;
    b.lo = Vec<D>::Constant(std::numeric_limits<double>::infinity());
    b.hi = Vec<D>::Constant(-std::numeric_limits<double>::infinity());
    return b;
  }
  bool isEmpty() const { return (lo.array() > hi.array()).any(); }
  void expand(const Vec<D>& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void expand(const Box& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  Vec<D> extent() const { return hi - lo; }
  double diagonal() const { return extent().norm(); }
  bool intersects(const Box& b) const {
    return (lo.array() <= b.hi.array()).all() && (b.lo.array() <= hi.array()).all();
  }
  Box inflated(double r) const {
    Box b = *this;
    b.lo.array() -= r;
    b.hi.array() += r;
    return b;
  }
};

/// splitmix64; used to derive deterministic sub-seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t subSeed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                             std::uint64_t c = 0) {
  return mix64(base ^ mix64(a ^ mix64(b ^ mix64(c))));
}

}  // namespace srp
