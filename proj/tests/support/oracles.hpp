#pragma once

// Independent reference implementations used only by tests. Everything here
// is deliberately naive: literal pair products, explicit graph enumeration,
// no incremental state shared with the library code under test.

#include <cstdint>
#include <map>
#include <vector>

#include "wsaw/enumerate.hpp"
#include "wsaw/point.hpp"
#include "wsaw/walk.hpp"

namespace wsaw::testing {

struct NaiveSummary {
  double c_n = 0.0;
  double sum_sq_disp = 0.0;
  std::map<Point, double> endpoint_weights;
};

// Literal product over all pairs (1 + beta U_st), no contact table.
inline double naive_weight(const std::vector<Point>& pos, double beta) {
  double w = 1.0;
  for (std::size_t t = 1; t < pos.size(); ++t)
    for (std::size_t s = 0; s < t; ++s)
      if (pos[s] == pos[t]) w *= 1.0 - beta;
  return w;
}

inline NaiveSummary naive_enumerate(const ModelParams& params) {
  NaiveSummary out;
  const int d = params.dim;
  const int n = params.length;
  for_each_walk(d, n, [&](const std::vector<std::uint8_t>& steps) {
    Walk w(d, steps, params.torus_r);
    std::vector<Point> pos = w.positions();
    const double weight = naive_weight(pos, params.beta);
    out.c_n += weight;
    out.sum_sq_disp += weight * static_cast<double>(norm_sq(pos.back()));
    if (weight != 0.0) out.endpoint_weights[pos.back()] += weight;
  });
  return out;
}

// c_n^T through the lifted picture: Z^d walks with positions compared mod r.
inline double naive_torus_partition_via_lift(int d, double beta, int r, int n) {
  double total = 0.0;
  for_each_walk(d, n, [&](const std::vector<std::uint8_t>& steps) {
    Walk w(d, steps);
    std::vector<Point> pos = w.positions();
    for (Point& p : pos) p = torus_rep(p, r);
    total += naive_weight(pos, beta);
  });
  return total;
}

// All connected graphs on [0, len] (edge subsets covering the whole open
// interval with both endpoints touched), for brute-force lace checks.
inline std::vector<std::vector<std::pair<int, int>>> connected_graphs(int len) {
  std::vector<std::pair<int, int>> edges;
  for (int t = 1; t <= len; ++t)
    for (int s = 0; s < t; ++s) edges.emplace_back(s, t);
  std::vector<std::vector<std::pair<int, int>>> out;
  const std::uint64_t subsets = std::uint64_t(1) << edges.size();
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    // union of open intervals must cover (0, len), including integer points
    std::vector<bool> covered(static_cast<std::size_t>(2 * len), false);
    bool left = false, right = false;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!(mask & (std::uint64_t(1) << e))) continue;
      auto [s, t] = edges[e];
      if (s == 0) left = true;
      if (t == len) right = true;
      for (int half = 2 * s + 1; half < 2 * t; ++half)
        covered[static_cast<std::size_t>(half)] = true;
    }
    bool ok = left && right;
    for (int half = 1; half < 2 * len && ok; ++half)
      ok = covered[static_cast<std::size_t>(half)];
    if (!ok) continue;
    std::vector<std::pair<int, int>> graph;
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (mask & (std::uint64_t(1) << e)) graph.push_back(edges[e]);
    out.push_back(std::move(graph));
  }
  return out;
}

}  // namespace wsaw::testing
