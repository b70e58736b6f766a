#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wsaw/enumerate.hpp"
#include "wsaw/params.hpp"
#include "wsaw/rational.hpp"
#include "wsaw/walk.hpp"

namespace wsaw {

/// A time interval [a,b], 0 <= a <= b <= n.
struct Interval {
  int a = 0;
  int b = 0;
};

/// Longest interval the lace machinery accepts (edge masks are 64-bit:
/// C(len+1,2) <= 55 edges at len = 10).
inline constexpr int max_lace_interval = 10;

/// Edge id for the pair s < t on [0, len].
inline int edge_id(int s, int t) { return t * (t - 1) / 2 + s; }

/// A lace on [0, len]: a minimally connected set of time edges spanning the
/// interval, in the standard ordering s_1 = 0 < s_2, s_{i+1} < t_i <= s_{i+2},
/// s_N < t_{N-1} < t_N = len (single edge (0, len) when N = 1).
struct Lace {
  std::vector<std::pair<int, int>> edges;
  std::uint64_t edge_mask = 0;    // bit per edge_id
  std::uint64_t compat_mask = 0;  // edges e not in the lace with L(lace+e) = lace
};

struct LaceTable {
  int len = 0;
  std::vector<Lace> laces;
  std::uint64_t all_edges_mask = 0;
};

/// Cached laces and compatibility sets for intervals of the given length.
const LaceTable& lace_table(int len);

/// All laces on [a,b] with at most n_max_edges edges. Edge pairs carry
/// absolute time labels; the bit masks stay relative to [0, b-a].
std::vector<Lace> enumerate_laces(Interval itv, int n_max_edges);

/// The lace of a connected graph (edge set) on [0, len] per the standard
/// greedy selection. Exposed for oracle-style testing.
std::vector<std::pair<int, int>> lace_of_graph(
    const std::vector<std::pair<int, int>>& graph, int len);

/// Contact edges of a walk: bit e set iff the walk coincides at the times of
/// edge e (ambient equality; walks up to max_lace_interval steps).
std::uint64_t contact_edge_mask(const Walk& w);

/// J[a,b](w): the lace-expansion interaction term,
///   sum over laces L on [a,b] of prod_{(s,t) in L} (beta U_st)
///   times prod_{(s,t) compatible with L} (1 + beta U_st),
/// with J[a,a] = 1. Validated globally by kjk_residual.
double j_value(const Walk& w, Interval itv, const ModelParams& params);
Rational j_value_exact(const Walk& w, Interval itv, const Rational& beta);

/// | K[0,n] - sum_{I owns m} K[0,I_1] J[I_1,I_2] K[I_2,n] |, summing over
/// I = [I_1,I_2] with 0 <= I_1 < m < I_2 <= n or I_1 = I_2 = m.
double kjk_residual(const Walk& w, int m, const ModelParams& params);

/// Same identity in exact rational arithmetic; returns the exact residual
/// (zero iff the identity holds exactly).
Rational kjk_residual_exact(const Walk& w, int m, const Rational& beta);

struct PiSeriesRow {
  int n = 0;
  double term = 0.0;         // n z^n sum_w |J[0,n]|
  double partial_sum = 0.0;  // cumulative
};

/// Partial sums of sum_n n z^n sum_{w in W_n} |J[0,n]| from exhaustive
/// enumeration; the summability diagnostic for the expansion.
std::vector<PiSeriesRow> pi_series_partial(const ModelParams& params, double z,
                                           int n_max,
                                           const EnumerationConfig& cfg = {});

}  // namespace wsaw
