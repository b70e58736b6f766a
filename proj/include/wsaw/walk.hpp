#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "wsaw/params.hpp"
#include "wsaw/point.hpp"

namespace wsaw {

/// Direction encoding used throughout: a step byte in [0, 2d) maps to the
/// unit vector (+/-) e_{dir >> 1} with sign +1 for even codes, -1 for odd.
inline int step_axis(std::uint8_t dir) { return dir >> 1; }
inline int step_sign(std::uint8_t dir) { return (dir & 1) ? -1 : 1; }

/// A nearest-neighbour walk started at the origin, on Z^d or on the discrete
/// torus T_r^d. Immutable after construction; positions are derived from the
/// step sequence (torus positions are the representatives in [-r/2, r/2)^d).
class Walk {
 public:
  Walk(int dim, std::vector<std::uint8_t> steps, int torus_r = 0);

  /// Recovers the step sequence from a position sequence (pos[0] must be the
  /// origin). For a torus walk the step is the representative of the
  /// position difference mod r, which is a unit vector iff the input is a
  /// valid torus walk with r >= 3.
  static Walk from_positions(const std::vector<Point>& positions, int torus_r = 0);

  int dim() const { return dim_; }
  int length() const { return static_cast<int>(steps_.size()); }
  bool torus() const { return torus_r_ > 0; }
  int torus_side() const { return torus_r_; }
  const std::vector<std::uint8_t>& steps() const { return steps_; }

  /// Position after k steps in the ambient space (reduced for torus walks).
  Point position(int k) const;
  /// All n+1 positions, ambient-reduced.
  std::vector<Point> positions() const;
  /// Z^d coordinates of the lifted walk (plain step sums, no reduction).
  Point lifted_position(int k) const;

  bool operator==(const Walk& other) const {
    return dim_ == other.dim_ && torus_r_ == other.torus_r_ && steps_ == other.steps_;
  }

 private:
  int dim_;
  int torus_r_;
  std::vector<std::uint8_t> steps_;
};

/// Unwraps a torus walk to Z^d: hat-l[w](k) = hat-l[w](k-1) + (w(k)-w(k-1))_r.
/// A bijection from n-step torus walks onto n-step Z^d walks for r >= 3.
Walk lift_walk(const Walk& w);

/// Componentwise reduction mod r; the inverse of lift_walk.
Walk project_walk(const Walk& w, int r);

/// U_st: -1 if w(s) = w(t) in the ambient space (torus: equality of the
/// representatives), else 0. Requires 0 <= s < t <= n.
int pair_interaction(const Walk& w, int s, int t);

/// Number of coinciding time pairs a <= s < t <= b, counted through a
/// position-multiplicity table (O(b-a), not a pair scan).
std::int64_t contact_count(const Walk& w, int a, int b);

/// K[a,b] = prod_{a<=s<t<=b} (1 + beta U_st) = (1-beta)^contact_count(a,b).
double interaction_weight(const Walk& w, double beta, int a, int b);

/// Same quantities for a Z^d walk read through the torus metric: two times
/// coincide when the positions are equal mod r in every coordinate (the K^T
/// of the lifted-walk picture).
std::int64_t contact_count_mod(const Walk& w, int r, int a, int b);
double interaction_weight_mod(const Walk& w, double beta, int r, int a, int b);

/// (1-beta)^k with the exact special cases at beta = 0 and beta = 1. Small
/// exponents multiply out one factor at a time so the result agrees bit for
/// bit with a literal product over pairs.
inline double contact_weight_pow(double beta, std::int64_t k) {
  if (k == 0) return 1.0;
  if (beta == 1.0) return 0.0;
  if (beta == 0.0) return 1.0;
  double base = 1.0 - beta;
  if (k <= 4096) {
    double out = 1.0;
    for (std::int64_t i = 0; i < k; ++i) out *= base;
    return out;
  }
  return std::pow(base, static_cast<double>(k));
}

}  // namespace wsaw
