#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "wsaw/params.hpp"
#include "wsaw/point.hpp"
#include "wsaw/walk.hpp"

namespace wsaw {

struct EnumerationConfig {
  std::uint64_t max_nodes = 400'000'000;  // DFS node budget, aborts cleanly
  int threads = 0;                        // 0 = hardware concurrency
  std::size_t flat_table_cap = std::size_t(1) << 26;  // cells before hash fallback
};

/// Exact finite-n data for one walk length: the partition function c_n (or
/// c_n^T), the weighted second moment sum_{w} |w(n)|^2 K[0,n], and the
/// weighted endpoint distribution (torus: keyed by representatives).
struct EnumerationSummary {
  int n = 0;
  double c_n = 0.0;
  double sum_sq_disp = 0.0;
  std::map<Point, double> endpoint_weights;
};

/// c_k and weighted second moments for every k <= n_max from a single sweep.
struct SequenceSummary {
  std::vector<double> c;             // index k = 0..n_max
  std::vector<double> sum_sq_disp;   // same indexing, weighted (not normalized)
};

/// Truncated two-point function sum_{n<=N} z^n sum_{w:0->x} K[0,n] per
/// endpoint, plus the susceptibility partial sum and the magnitude of the
/// last included term as a truncation report.
struct TwoPointTable {
  double z = 0.0;
  int n_max = 0;
  std::map<Point, double> values;
  double susceptibility_partial = 0.0;
  double truncation_last_term = 0.0;
};

/// Depth-first exact enumeration with incremental contact counting.
/// Torus params enumerate torus walks directly (occupancy and endpoints in
/// representative coordinates).
EnumerationSummary enumerate(const ModelParams& params,
                             const EnumerationConfig& cfg = {});

/// c_n^T computed over Z^d walks weighted by K^T (positions compared mod r),
/// the lifted-walk picture. Must agree exactly with direct torus enumeration.
EnumerationSummary enumerate_torus_via_lift(const ModelParams& params,
                                            const EnumerationConfig& cfg = {});

SequenceSummary enumerate_sequence(const ModelParams& params, int n_max,
                                   const EnumerationConfig& cfg = {});

/// (c_{k+1}/c_k) for k < n_max; c from exact enumeration.
std::vector<double> connective_ratio_sequence(const ModelParams& params, int n_max,
                                              const EnumerationConfig& cfg = {});

TwoPointTable two_point_series(const ModelParams& params, double z, int n_max,
                               const EnumerationConfig& cfg = {});

/// Visits every n-step walk on Z^d in lexicographic step order. fn receives
/// the step codes; intended for exhaustive sweeps at oracle scale.
template <class F>
void for_each_walk(int d, int n, F&& fn) {
  const int two_d = 2 * d;
  std::vector<std::uint8_t> steps(static_cast<std::size_t>(n), 0);
  if (n == 0) {
    fn(static_cast<const std::vector<std::uint8_t>&>(steps));
    return;
  }
  for (;;) {
    fn(static_cast<const std::vector<std::uint8_t>&>(steps));
    int k = n - 1;
    while (k >= 0 && steps[k] == two_d - 1) steps[k--] = 0;
    if (k < 0) break;
    ++steps[k];
  }
}

}  // namespace wsaw
