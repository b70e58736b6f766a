#include "wsaw/enumerate.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <thread>
#include <unordered_map>

namespace wsaw {

namespace {

std::vector<double> contact_power_table(double beta, std::size_t max_contacts) {
  std::vector<double> tab(max_contacts + 1);
  tab[0] = 1.0;
  const double base = 1.0 - beta;
  for (std::size_t k = 1; k <= max_contacts; ++k) tab[k] = tab[k - 1] * base;
  return tab;
}

std::size_t pow_checked(std::size_t base, int exp, std::size_t cap) {
  std::size_t v = 1;
  for (int i = 0; i < exp; ++i) {
    if (v > cap / base) return cap + 1;
    v *= base;
  }
  return v;
}

// ---------------------------------------------------------------------------
// DFS states: coordinate tracking + occupancy table + endpoint accumulation.
// push/pop return the contact increment (site multiplicity before insertion).
// ---------------------------------------------------------------------------

// Z^d metric, flat occupancy over the reachable box [-n, n]^d.
class FlatZdState {
 public:
  FlatZdState(int d, int n)
      : d_(d), side_(2 * n + 1), coords_(d, 0), strides_(d) {
    std::size_t cells = 1;
    for (int a = 0; a < d_; ++a) {
      strides_[a] = cells;
      cells *= static_cast<std::size_t>(side_);
    }
    counts_.assign(cells, 0);
    endpoint_.assign(cells, 0.0);
    idx_ = 0;
    for (int a = 0; a < d_; ++a) idx_ += static_cast<std::size_t>(n) * strides_[a];
    ++counts_[idx_];  // origin occupied
  }

  int push(int axis, int sign) {
    norm_sq_ += 2 * static_cast<std::int64_t>(sign) * coords_[axis] + 1;
    coords_[axis] += sign;
    idx_ = sign > 0 ? idx_ + strides_[axis] : idx_ - strides_[axis];
    return counts_[idx_]++;
  }

  void pop(int axis, int sign) {
    --counts_[idx_];
    idx_ = sign > 0 ? idx_ - strides_[axis] : idx_ + strides_[axis];
    coords_[axis] -= sign;
    norm_sq_ -= 2 * static_cast<std::int64_t>(sign) * coords_[axis] + 1;
  }

  std::int64_t norm_sq() const { return norm_sq_; }
  void add_endpoint(double w) { endpoint_[idx_] += w; }

  void collect_endpoints(std::map<Point, double>& out) const {
    Point p(d_);
    for (std::size_t i = 0; i < endpoint_.size(); ++i) {
      if (endpoint_[i] == 0.0) continue;
      std::size_t rem = i;
      for (int a = 0; a < d_; ++a) {
        p[a] = static_cast<Coord>(rem % side_) - (side_ - 1) / 2;
        rem /= side_;
      }
      out[p] += endpoint_[i];
    }
  }

 private:
  int d_, side_;
  std::vector<Coord> coords_;
  std::vector<std::size_t> strides_;
  std::vector<std::int32_t> counts_;
  std::vector<double> endpoint_;
  std::size_t idx_ = 0;
  std::int64_t norm_sq_ = 0;
};

// Torus metric with coordinates kept in representative form throughout.
class FlatTorusState {
 public:
  FlatTorusState(int d, int r)
      : d_(d), r_(r), lo_(-(r / 2)), hi_((r + 1) / 2 - 1), coords_(d, 0), strides_(d) {
    std::size_t cells = 1;
    for (int a = 0; a < d_; ++a) {
      strides_[a] = cells;
      cells *= static_cast<std::size_t>(r_);
    }
    counts_.assign(cells, 0);
    endpoint_.assign(cells, 0.0);
    idx_ = 0;
    for (int a = 0; a < d_; ++a) idx_ += static_cast<std::size_t>(-lo_) * strides_[a];
    ++counts_[idx_];
  }

  int push(int axis, int sign) {
    Coord old = coords_[axis];
    Coord nv = old + sign;
    if (nv > hi_) nv = lo_;
    if (nv < lo_) nv = hi_;
    coords_[axis] = nv;
    idx_ += static_cast<std::size_t>(static_cast<std::ptrdiff_t>(nv - old) *
                                     static_cast<std::ptrdiff_t>(strides_[axis]));
    norm_sq_ += static_cast<std::int64_t>(nv) * nv - static_cast<std::int64_t>(old) * old;
    return counts_[idx_]++;
  }

  void pop(int axis, int sign) {
    --counts_[idx_];
    Coord cur = coords_[axis];
    Coord prev = cur - sign;
    if (prev > hi_) prev = lo_;
    if (prev < lo_) prev = hi_;
    coords_[axis] = prev;
    idx_ -= static_cast<std::size_t>(static_cast<std::ptrdiff_t>(cur - prev) *
                                     static_cast<std::ptrdiff_t>(strides_[axis]));
    norm_sq_ -= static_cast<std::int64_t>(cur) * cur - static_cast<std::int64_t>(prev) * prev;
  }

  std::int64_t norm_sq() const { return norm_sq_; }
  void add_endpoint(double w) { endpoint_[idx_] += w; }

  void collect_endpoints(std::map<Point, double>& out) const {
    Point p(d_);
    for (std::size_t i = 0; i < endpoint_.size(); ++i) {
      if (endpoint_[i] == 0.0) continue;
      std::size_t rem = i;
      for (int a = 0; a < d_; ++a) {
        p[a] = static_cast<Coord>(rem % r_) + lo_;
        rem /= r_;
      }
      out[p] += endpoint_[i];
    }
  }

 private:
  int d_, r_;
  Coord lo_, hi_;
  std::vector<Coord> coords_;
  std::vector<std::size_t> strides_;
  std::vector<std::int32_t> counts_;
  std::vector<double> endpoint_;
  std::size_t idx_ = 0;
  std::int64_t norm_sq_ = 0;
};

// Lifted-walk picture: coordinates tracked on Z^d, occupancy and endpoints
// keyed by the mod-r reduction of the Z^d position (K^T over W_n). The
// reduction goes through torus_rep on every move, deliberately independent
// of FlatTorusState's wrap arithmetic so the two can cross-check each other.
class FlatTorusLiftState {
 public:
  FlatTorusLiftState(int d, int r)
      : d_(d), r_(r), lo_(-(r / 2)), zcoords_(d, 0), strides_(d) {
    std::size_t cells = 1;
    for (int a = 0; a < d_; ++a) {
      strides_[a] = cells;
      cells *= static_cast<std::size_t>(r_);
    }
    counts_.assign(cells, 0);
    endpoint_.assign(cells, 0.0);
    idx_ = rep_index();
    ++counts_[idx_];
  }

  int push(int axis, int sign) {
    zcoords_[axis] += sign;
    idx_ = rep_index();
    return counts_[idx_]++;
  }

  void pop(int axis, int sign) {
    --counts_[idx_];
    zcoords_[axis] -= sign;
    idx_ = rep_index();
  }

  std::int64_t norm_sq() const {
    std::int64_t s = 0;
    for (int a = 0; a < d_; ++a) {
      Coord rep = torus_rep(zcoords_[a], r_);
      s += static_cast<std::int64_t>(rep) * rep;
    }
    return s;
  }

  void add_endpoint(double w) { endpoint_[idx_] += w; }

  void collect_endpoints(std::map<Point, double>& out) const {
    Point p(d_);
    for (std::size_t i = 0; i < endpoint_.size(); ++i) {
      if (endpoint_[i] == 0.0) continue;
      std::size_t rem = i;
      for (int a = 0; a < d_; ++a) {
        p[a] = static_cast<Coord>(rem % r_) + lo_;
        rem /= r_;
      }
      out[p] += endpoint_[i];
    }
  }

 private:
  std::size_t rep_index() const {
    std::size_t idx = 0;
    for (int a = 0; a < d_; ++a)
      idx += static_cast<std::size_t>(torus_rep(zcoords_[a], r_) - lo_) * strides_[a];
    return idx;
  }

  int d_, r_;
  Coord lo_;
  std::vector<Coord> zcoords_;
  std::vector<std::size_t> strides_;
  std::vector<std::int32_t> counts_;
  std::vector<double> endpoint_;
  std::size_t idx_ = 0;
};

// Hash-table fallback for boxes too large to lay out flat.
class HashState {
 public:
  HashState(int d, int r /* 0 = Z^d */) : d_(d), r_(r), zcoords_(d, 0) {
    counts_.reserve(1 << 12);
    ++counts_[key()];
  }

  int push(int axis, int sign) {
    norm_sq_ -= key_norm_sq();
    zcoords_[axis] += sign;
    std::int64_t ns = key_norm_sq();
    norm_sq_ += ns;
    return counts_[key()]++;
  }

  void pop(int axis, int sign) {
    --counts_[key()];
    norm_sq_ -= key_norm_sq();
    zcoords_[axis] -= sign;
    norm_sq_ += key_norm_sq();
  }

  std::int64_t norm_sq() const { return norm_sq_; }
  void add_endpoint(double w) { endpoint_[key()] += w; }

  void collect_endpoints(std::map<Point, double>& out) const {
    for (const auto& [p, w] : endpoint_) out[p] += w;
  }

 private:
  Point key() const { return r_ > 0 ? torus_rep(zcoords_, r_) : zcoords_; }
  std::int64_t key_norm_sq() const { return wsaw::norm_sq(key()); }

  int d_, r_;
  Point zcoords_;
  std::unordered_map<Point, std::int32_t, PointHash> counts_;
  std::unordered_map<Point, double, PointHash> endpoint_;
  std::int64_t norm_sq_ = 0;
};

// ---------------------------------------------------------------------------
// Sinks: what gets accumulated at each node.
// ---------------------------------------------------------------------------

struct SummarySink {
  std::vector<double> c;    // by depth
  std::vector<double> msd;  // by depth
  bool want_endpoints = true;
  int n = 0;

  explicit SummarySink(int n_, bool endpoints)
      : c(n_ + 1, 0.0), msd(n_ + 1, 0.0), want_endpoints(endpoints), n(n_) {}

  SummarySink empty_like() const { return SummarySink(n, want_endpoints); }

  template <class State>
  void node(int depth, double w, State& st) {
    c[depth] += w;
    msd[depth] += w * static_cast<double>(st.norm_sq());
    if (want_endpoints && depth == n) st.add_endpoint(w);
  }

  void merge(const SummarySink& o) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      c[k] += o.c[k];
      msd[k] += o.msd[k];
    }
  }
};

struct TwoPointSink {
  std::vector<double> zpow;  // z^depth
  std::vector<double> c;     // by depth, for the susceptibility partial sums
  int n = 0;

  TwoPointSink(int n_, double z) : zpow(n_ + 1), c(n_ + 1, 0.0), n(n_) {
    zpow[0] = 1.0;
    for (int k = 1; k <= n_; ++k) zpow[k] = zpow[k - 1] * z;
  }

  TwoPointSink empty_like() const { return TwoPointSink(n, n >= 1 ? zpow[1] : 0.0); }

  template <class State>
  void node(int depth, double w, State& st) {
    c[depth] += w;
    st.add_endpoint(zpow[depth] * w);
  }

  void merge(const TwoPointSink& o) {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.c[k];
  }
};

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

template <class State, class Sink>
struct DfsEngine {
  State& st;
  Sink& sink;
  const std::vector<double>& powtab;
  int two_d;
  int n;
  std::uint64_t budget;
  std::int64_t contacts = 0;

  // Pushes the given steps without emitting sink nodes (prefix replay).
  void replay(const std::vector<std::uint8_t>& steps) {
    for (std::uint8_t s : steps) contacts += st.push(step_axis(s), step_sign(s));
  }

  void run(int depth) {
    sink.node(depth, powtab[static_cast<std::size_t>(contacts)], st);
    if (depth == n) return;
    for (int dir = 0; dir < two_d; ++dir) {
      if (budget == 0)
        throw BudgetExceeded("enumeration node budget exceeded; raise max_nodes or lower n");
      --budget;
      const int axis = dir >> 1;
      const int sign = (dir & 1) ? -1 : 1;
      const int added = st.push(axis, sign);
      contacts += added;
      run(depth + 1);
      st.pop(axis, sign);
      contacts -= added;
    }
  }
};

// Runs the enumeration for a given state/sink pair. For n >= 2 the walks are
// partitioned by their first two steps; workers pick prefixes off a shared
// queue and partial sinks are merged in prefix order, so the reduction is
// deterministic for a fixed thread count.
template <class MakeState, class Sink>
void run_enumeration(int d, int n, double beta, const EnumerationConfig& cfg,
                     MakeState make_state, Sink& sink,
                     std::map<Point, double>* endpoints_out) {
  const int two_d = 2 * d;
  const std::size_t max_contacts =
      static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
  const std::vector<double> powtab = contact_power_table(beta, max_contacts);

  unsigned hw = std::thread::hardware_concurrency();
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(hw ? hw : 1);

  if (threads <= 1 || n < 2) {
    auto st = make_state();
    DfsEngine<decltype(st), Sink> eng{st, sink, powtab, two_d, n, cfg.max_nodes};
    eng.run(0);
    if (endpoints_out) st.collect_endpoints(*endpoints_out);
    return;
  }

  // Prefix tree (depths 0 and 1) accounted once, on the calling thread.
  {
    auto st = make_state();
    DfsEngine<decltype(st), Sink> eng{st, sink, powtab, two_d, 1, cfg.max_nodes};
    eng.run(0);
    if (endpoints_out) st.collect_endpoints(*endpoints_out);
  }

  std::vector<std::vector<std::uint8_t>> prefixes;
  for (int s0 = 0; s0 < two_d; ++s0)
    for (int s1 = 0; s1 < two_d; ++s1)
      prefixes.push_back({static_cast<std::uint8_t>(s0), static_cast<std::uint8_t>(s1)});

  threads = std::min<int>(threads, static_cast<int>(prefixes.size()));
  const std::uint64_t slice = cfg.max_nodes / prefixes.size();

  std::vector<Sink> partial(prefixes.size(), sink.empty_like());
  std::vector<std::map<Point, double>> partial_eps(endpoints_out ? prefixes.size() : 0);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);

  auto worker = [&](int tid) {
    try {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= prefixes.size()) break;
        auto st = make_state();
        DfsEngine<decltype(st), Sink> eng{st, partial[i], powtab, two_d, n, slice};
        eng.replay(prefixes[i]);
        eng.run(2);
        if (endpoints_out) st.collect_endpoints(partial_eps[i]);
      }
    } catch (...) {
      errors[tid] = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    sink.merge(partial[i]);
    if (endpoints_out)
      for (const auto& [p, w] : partial_eps[i]) (*endpoints_out)[p] += w;
  }
}

enum class Picture { zd, torus_direct, torus_lift };

template <class Sink>
void dispatch(const ModelParams& params, int n, const EnumerationConfig& cfg,
              Picture pic, Sink& sink, std::map<Point, double>* endpoints_out) {
  const int d = params.dim;
  std::size_t cells;
  if (pic == Picture::zd)
    cells = pow_checked(static_cast<std::size_t>(2 * n + 1), d, cfg.flat_table_cap);
  else
    cells = pow_checked(static_cast<std::size_t>(params.torus_r), d, cfg.flat_table_cap);

  if (cells <= cfg.flat_table_cap) {
    switch (pic) {
      case Picture::zd:
        run_enumeration(d, n, params.beta, cfg,
                        [&] { return FlatZdState(d, n); }, sink, endpoints_out);
        return;
      case Picture::torus_direct:
        run_enumeration(d, n, params.beta, cfg,
                        [&] { return FlatTorusState(d, params.torus_r); }, sink,
                        endpoints_out);
        return;
      case Picture::torus_lift:
        run_enumeration(d, n, params.beta, cfg,
                        [&] { return FlatTorusLiftState(d, params.torus_r); }, sink,
                        endpoints_out);
        return;
    }
  }
  const int r = pic == Picture::zd ? 0 : params.torus_r;
  run_enumeration(d, n, params.beta, cfg, [&] { return HashState(d, r); }, sink,
                  endpoints_out);
}

EnumerationSummary summarize(const ModelParams& params, const EnumerationConfig& cfg,
                             Picture pic) {
  params.validate();
  const int n = params.length;
  SummarySink sink(n, true);
  EnumerationSummary out;
  out.n = n;
  dispatch(params, n, cfg, pic, sink, &out.endpoint_weights);
  out.c_n = sink.c[n];
  out.sum_sq_disp = sink.msd[n];
  return out;
}

}  // namespace

EnumerationSummary enumerate(const ModelParams& params, const EnumerationConfig& cfg) {
  return summarize(params, cfg, params.torus() ? Picture::torus_direct : Picture::zd);
}

EnumerationSummary enumerate_torus_via_lift(const ModelParams& params,
                                            const EnumerationConfig& cfg) {
  params.validate();
  if (!params.torus())
    throw std::invalid_argument("enumerate_torus_via_lift requires torus params (r >= 3)");
  return summarize(params, cfg, Picture::torus_lift);
}

SequenceSummary enumerate_sequence(const ModelParams& params, int n_max,
                                   const EnumerationConfig& cfg) {
  params.validate();
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  SummarySink sink(n_max, false);
  dispatch(params, n_max, cfg, params.torus() ? Picture::torus_direct : Picture::zd,
           sink, nullptr);
  SequenceSummary out;
  out.c = std::move(sink.c);
  out.sum_sq_disp = std::move(sink.msd);
  return out;
}

std::vector<double> connective_ratio_sequence(const ModelParams& params, int n_max,
                                              const EnumerationConfig& cfg) {
  SequenceSummary seq = enumerate_sequence(params, n_max, cfg);
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(n_max));
  for (int k = 0; k < n_max; ++k) ratios.push_back(seq.c[k + 1] / seq.c[k]);
  return ratios;
}

TwoPointTable two_point_series(const ModelParams& params, double z, int n_max,
                               const EnumerationConfig& cfg) {
  params.validate();
  if (z < 0.0) throw std::invalid_argument("activity z must be >= 0");
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  TwoPointSink sink(n_max, z);
  TwoPointTable out;
  out.z = z;
  out.n_max = n_max;
  dispatch(params, n_max, cfg, params.torus() ? Picture::torus_direct : Picture::zd,
           sink, &out.values);
  double chi = 0.0;
  for (int k = 0; k <= n_max; ++k) chi += sink.zpow[k] * sink.c[k];
  out.susceptibility_partial = chi;
  out.truncation_last_term = sink.zpow[n_max] * sink.c[n_max];
  return out;
}

}  // namespace wsaw
