#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <vector>

namespace wsaw {

using Coord = std::int32_t;
using Point = std::vector<Coord>;

/// Representative of x mod r in [-r/2, r/2): the unique equivalent value in
/// [-floor(r/2), ceil(r/2)-1]. For even r the left endpoint -r/2 is included
/// and +r/2 excluded.
inline Coord torus_rep(Coord x, int r) {
  Coord v = static_cast<Coord>(x % r);
  if (v < 0) v += r;
  return v < (r + 1) / 2 ? v : v - r;
}

inline Point torus_rep(const Point& p, int r) {
  Point out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = torus_rep(p[i], r);
  return out;
}

inline std::int64_t norm_sq(const Point& p) {
  std::int64_t s = 0;
  for (Coord c : p) s += static_cast<std::int64_t>(c) * c;
  return s;
}

inline std::int64_t l1_norm(const Point& p) {
  std::int64_t s = 0;
  for (Coord c : p) s += std::abs(static_cast<std::int64_t>(c));
  return s;
}

struct PointHash {
  std::size_t operator()(const Point& p) const {
    std::uint64_t h = 1469598103934665603ull;
    for (Coord c : p) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(c));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

/// An element of the hyperoctahedral group (coordinate permutation composed
/// with sign flips): the point symmetry group of Z^d fixing the origin.
struct LatticeSymmetry {
  std::vector<int> perm;    // image axis of each axis
  std::vector<int> sign;    // +1 / -1 per target axis

  Point apply(const Point& p) const {
    Point out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      out[perm[i]] = static_cast<Coord>(sign[i] * p[i]);
    return out;
  }

  static LatticeSymmetry identity(int d) {
    LatticeSymmetry g;
    g.perm.resize(d);
    g.sign.assign(d, 1);
    for (int i = 0; i < d; ++i) g.perm[i] = i;
    return g;
  }
};

}  // namespace wsaw
