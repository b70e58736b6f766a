#include "wsaw/lace.hpp"

#include <algorithm>
#include <bit>
#include <mutex>
#include <stdexcept>

namespace wsaw {

namespace {

void check_len(int len) {
  if (len < 0) throw std::invalid_argument("negative interval");
  if (len > max_lace_interval)
    throw BudgetExceeded("interval longer than the configured lace limit");
}

// All laces on [0, len] in the standard ordering, generated edge by edge:
// s_2 in (0, t_1), s_i in [t_{i-2}, t_{i-1}) for i >= 3, t_i increasing,
// t_N = len.
void generate(int len, std::vector<Lace>& out) {
  if (len == 0) return;
  {
    Lace l;
    l.edges = {{0, len}};
    out.push_back(std::move(l));
  }
  std::vector<std::pair<int, int>> edges;
  auto rec = [&](auto&& self, int prev_prev_t, int prev_t) -> void {
    const int i = static_cast<int>(edges.size()) + 1;  // index of next edge
    const int s_lo = i == 2 ? 1 : prev_prev_t;
    for (int s = s_lo; s < prev_t; ++s) {
      for (int t = prev_t + 1; t <= len; ++t) {
        edges.emplace_back(s, t);
        if (t == len) {
          Lace l;
          l.edges = edges;
          out.push_back(std::move(l));
        } else {
          self(self, prev_t, t);
        }
        edges.pop_back();
      }
    }
  };
  for (int t1 = 1; t1 < len; ++t1) {
    edges.assign(1, {0, t1});
    rec(rec, 0, t1);
  }
}

std::uint64_t mask_of(const std::vector<std::pair<int, int>>& edges) {
  std::uint64_t m = 0;
  for (auto [s, t] : edges) m |= std::uint64_t(1) << edge_id(s, t);
  return m;
}

LaceTable build_table(int len) {
  LaceTable tab;
  tab.len = len;
  generate(len, tab.laces);
  for (int t = 1; t <= len; ++t)
    for (int s = 0; s < t; ++s)
      tab.all_edges_mask |= std::uint64_t(1) << edge_id(s, t);

  for (Lace& l : tab.laces) {
    l.edge_mask = mask_of(l.edges);
    l.compat_mask = 0;
    std::vector<std::pair<int, int>> graph;
    for (int t = 1; t <= len; ++t) {
      for (int s = 0; s < t; ++s) {
        if (l.edge_mask & (std::uint64_t(1) << edge_id(s, t))) continue;
        graph = l.edges;
        graph.emplace_back(s, t);
        if (lace_of_graph(graph, len) == l.edges)
          l.compat_mask |= std::uint64_t(1) << edge_id(s, t);
      }
    }
  }
  return tab;
}

// Scalar-generic core: beta and (1 - beta) supplied by the caller.
template <class S>
S j_from_mask(const LaceTable& tab, std::uint64_t contacts, const S& minus_beta,
              const S& one_minus_beta, const S& one) {
  S total = one - one;  // zero
  for (const Lace& l : tab.laces) {
    if ((l.edge_mask & contacts) != l.edge_mask) continue;  // a factor U = 0
    S term = one;
    for (std::size_t i = 0; i < l.edges.size(); ++i) term *= minus_beta;
    int c = std::popcount(l.compat_mask & contacts);
    for (int i = 0; i < c; ++i) term *= one_minus_beta;
    total += term;
  }
  return total;
}

// Contact mask of the walk restricted to [a,b], re-labelled relative to a.
std::uint64_t relative_contacts(const std::vector<Point>& pos, int a, int b) {
  std::uint64_t m = 0;
  for (int t = a + 1; t <= b; ++t)
    for (int s = a; s < t; ++s)
      if (pos[static_cast<std::size_t>(s)] == pos[static_cast<std::size_t>(t)])
        m |= std::uint64_t(1) << edge_id(s - a, t - a);
  return m;
}

}  // namespace

const LaceTable& lace_table(int len) {
  check_len(len);
  static std::mutex mu;
  static std::vector<LaceTable> cache;  // by length, grown on demand
  std::scoped_lock lock(mu);
  while (static_cast<int>(cache.size()) <= len)
    cache.push_back(build_table(static_cast<int>(cache.size())));
  return cache[static_cast<std::size_t>(len)];
}

std::vector<Lace> enumerate_laces(Interval itv, int n_max_edges) {
  if (itv.a > itv.b) throw std::invalid_argument("interval requires a <= b");
  const LaceTable& tab = lace_table(itv.b - itv.a);
  std::vector<Lace> out;
  for (const Lace& l : tab.laces) {
    if (static_cast<int>(l.edges.size()) > n_max_edges) continue;
    Lace shifted = l;
    for (auto& [s, t] : shifted.edges) {
      s += itv.a;
      t += itv.a;
    }
    out.push_back(std::move(shifted));
  }
  return out;
}

std::vector<std::pair<int, int>> lace_of_graph(
    const std::vector<std::pair<int, int>>& graph, int len) {
  std::vector<std::pair<int, int>> lace;
  int t1 = -1;
  for (auto [s, t] : graph)
    if (s == 0) t1 = std::max(t1, t);
  if (t1 < 0) throw std::invalid_argument("graph has no edge at the left endpoint");
  lace.emplace_back(0, t1);
  while (lace.back().second < len) {
    const int t_prev = lace.back().second;
    int t_next = -1;
    for (auto [s, t] : graph)
      if (s < t_prev) t_next = std::max(t_next, t);
    if (t_next <= t_prev)
      throw std::invalid_argument("graph is not connected on the interval");
    int s_next = t_next;
    for (auto [s, t] : graph)
      if (t == t_next) s_next = std::min(s_next, s);
    lace.emplace_back(s_next, t_next);
  }
  return lace;
}

std::uint64_t contact_edge_mask(const Walk& w) {
  check_len(w.length());
  return relative_contacts(w.positions(), 0, w.length());
}

double j_value(const Walk& w, Interval itv, const ModelParams& params) {
  if (itv.a < 0 || itv.b > w.length() || itv.a > itv.b)
    throw std::invalid_argument("interval out of range");
  const int len = itv.b - itv.a;
  if (len == 0) return 1.0;
  check_len(len);
  std::uint64_t contacts = relative_contacts(w.positions(), itv.a, itv.b);
  return j_from_mask(lace_table(len), contacts, -params.beta, 1.0 - params.beta, 1.0);
}

Rational j_value_exact(const Walk& w, Interval itv, const Rational& beta) {
  if (itv.a < 0 || itv.b > w.length() || itv.a > itv.b)
    throw std::invalid_argument("interval out of range");
  const int len = itv.b - itv.a;
  if (len == 0) return Rational(1);
  check_len(len);
  std::uint64_t contacts = relative_contacts(w.positions(), itv.a, itv.b);
  return j_from_mask(lace_table(len), contacts, -beta, Rational(1) - beta, Rational(1));
}

namespace {

// Shared KJK evaluation: scalar-generic over double/Rational.
template <class S>
S kjk_residual_generic(const Walk& w, int m, const S& beta, const S& one) {
  const int n = w.length();
  if (m < 0 || m > n) throw std::invalid_argument("marked time out of range");
  check_len(n);
  const std::vector<Point> pos = w.positions();
  const S one_minus_beta = one - beta;
  const S minus_beta = (one - one) - beta;

  // contact counts for arbitrary subintervals via one global pair scan
  std::vector<int> contacts((n + 1) * (n + 1), 0);
  auto count = [&](int a, int b) -> int& { return contacts[a * (n + 1) + b]; };
  for (int a = 0; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) {
      count(a, b) = count(a, b - 1);
      for (int s = a; s < b; ++s)
        if (pos[static_cast<std::size_t>(s)] == pos[static_cast<std::size_t>(b)])
          ++count(a, b);
    }
  auto K = [&](int a, int b) {
    S out = one;
    for (int i = 0; i < count(a, b); ++i) out *= one_minus_beta;
    return out;
  };

  S total = K(0, m) * K(m, n);  // the I_1 = I_2 = m term, J[m,m] = 1
  for (int i1 = 0; i1 < m; ++i1) {
    for (int i2 = m + 1; i2 <= n; ++i2) {
      std::uint64_t rel = relative_contacts(pos, i1, i2);
      S j = j_from_mask(lace_table(i2 - i1), rel, minus_beta, one_minus_beta, one);
      total += K(0, i1) * j * K(i2, n);
    }
  }
  return K(0, n) - total;
}

}  // namespace

double kjk_residual(const Walk& w, int m, const ModelParams& params) {
  return std::abs(kjk_residual_generic<double>(w, m, params.beta, 1.0));
}

Rational kjk_residual_exact(const Walk& w, int m, const Rational& beta) {
  return kjk_residual_generic<Rational>(w, m, beta, Rational(1)).abs();
}

std::vector<PiSeriesRow> pi_series_partial(const ModelParams& params, double z,
                                           int n_max, const EnumerationConfig& cfg) {
  params.validate();
  if (z < 0.0) throw std::invalid_argument("activity z must be >= 0");
  check_len(n_max);
  if (params.torus())
    throw std::invalid_argument("pi_series_partial is a Z^d diagnostic");

  const int d = params.dim;
  std::uint64_t walks_total = 0;
  std::uint64_t pow = 1;
  for (int n = 0; n <= n_max; ++n) {
    walks_total += pow;
    if (walks_total > cfg.max_nodes)
      throw BudgetExceeded("pi_series_partial walk budget exceeded");
    pow *= static_cast<std::uint64_t>(2 * d);
  }

  std::vector<PiSeriesRow> rows;
  double running = 0.0;
  double zpow = 1.0;
  for (int n = 0; n <= n_max; ++n) {
    double abs_j_sum = 0.0;
    if (n >= 2) {  // J[0,0] = 1 carries factor n = 0; J[0,1] = 0
      const LaceTable& tab = lace_table(n);
      std::vector<Point> pos(static_cast<std::size_t>(n) + 1, Point(d, 0));
      for_each_walk(d, n, [&](const std::vector<std::uint8_t>& steps) {
        for (int k = 0; k < n; ++k) {
          pos[static_cast<std::size_t>(k) + 1] = pos[static_cast<std::size_t>(k)];
          pos[static_cast<std::size_t>(k) + 1][step_axis(steps[k])] +=
              step_sign(steps[k]);
        }
        std::uint64_t contacts = relative_contacts(pos, 0, n);
        if (contacts == 0) return;
        double j = j_from_mask(tab, contacts, -params.beta, 1.0 - params.beta, 1.0);
        abs_j_sum += std::abs(j);
      });
    }
    PiSeriesRow row;
    row.n = n;
    row.term = static_cast<double>(n) * zpow * abs_j_sum;
    running += row.term;
    row.partial_sum = running;
    rows.push_back(row);
    zpow *= z;
  }
  return rows;
}

}  // namespace wsaw
