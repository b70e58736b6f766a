#include "wsaw/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "wsaw/rng.hpp"

namespace wsaw {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Site multiplicity tables. add() returns the count before insertion (the
// contact increment), remove() the count after removal (so contacts can be
// unwound exactly). Keys are ambient positions: torus runs reduce mod r.
// ---------------------------------------------------------------------------

struct KeyCodec {
  int d = 1;
  int r = 0;          // 0: Z^d
  Coord offset = 0;   // shifts the value range to [0, 2^bits)
  int bits = 0;
  bool packable = false;

  KeyCodec() = default;
  KeyCodec(int d_, int r_, int max_abs_coord) : d(d_), r(r_) {
    int range = r > 0 ? r : 2 * max_abs_coord + 1;
    offset = r > 0 ? static_cast<Coord>(r / 2) : static_cast<Coord>(max_abs_coord);
    bits = 1;
    while ((1 << bits) < range + 1) ++bits;
    packable = bits * d <= 63;
  }

  std::uint64_t pack(const Coord* p) const {
    std::uint64_t key = 0;
    for (int a = 0; a < d; ++a) {
      Coord v = r > 0 ? torus_rep(p[a], r) : p[a];
      key = (key << bits) | static_cast<std::uint64_t>(v + offset);
    }
    return key;
  }

  Point reduced(const Coord* p) const {
    Point out(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) out[a] = r > 0 ? torus_rep(p[a], r) : p[a];
    return out;
  }
};

// Open-addressing table on packed keys; zero-count slots are reclaimed on
// rehash so long runs do not accumulate dead entries.
class PackedCountTable {
 public:
  explicit PackedCountTable(std::size_t expected) { rehash_to(capacity_for(expected)); }

  int add(std::uint64_t key) {
    if ((used_ + 1) * 2 > keys_.size()) compact_or_grow();
    std::size_t i = slot(key);
    if (keys_[i] == kEmpty) {
      keys_[i] = key;
      cnt_[i] = 1;
      ++used_;
      return 0;
    }
    return cnt_[i]++;
  }

  int remove(std::uint64_t key) {
    std::size_t i = slot(key);
    return --cnt_[i];
  }

  void clear() {
    std::fill(keys_.begin(), keys_.end(), kEmpty);
    std::fill(cnt_.begin(), cnt_.end(), 0);
    used_ = 0;
  }

 private:
  static constexpr std::uint64_t kEmpty = ~std::uint64_t(0);

  static std::size_t capacity_for(std::size_t expected) {
    std::size_t cap = 64;
    while (cap < expected * 2) cap <<= 1;
    return cap;
  }

  std::size_t slot(std::uint64_t key) const {
    std::uint64_t h = key * 0x9e3779b97f4a7c15ull;
    h ^= h >> 29;
    std::size_t i = static_cast<std::size_t>(h) & (keys_.size() - 1);
    while (keys_[i] != kEmpty && keys_[i] != key) i = (i + 1) & (keys_.size() - 1);
    return i;
  }

  // Most occupied slots are zero-count leftovers of rejected proposals;
  // compacting in place keeps the table at the size of the live walk.
  void compact_or_grow() {
    std::size_t live = 0;
    for (std::size_t i = 0; i < keys_.size(); ++i)
      if (keys_[i] != kEmpty && cnt_[i] > 0) ++live;
    rehash_to(live * 4 > keys_.size() ? keys_.size() * 2 : keys_.size());
  }

  void rehash_to(std::size_t cap) {
    std::vector<std::uint64_t> old_keys = std::move(keys_);
    std::vector<std::int32_t> old_cnt = std::move(cnt_);
    keys_.assign(cap, kEmpty);
    cnt_.assign(cap, 0);
    used_ = 0;
    for (std::size_t i = 0; i < old_keys.size(); ++i) {
      if (old_keys[i] == kEmpty || old_cnt[i] == 0) continue;
      std::size_t j = slot(old_keys[i]);
      keys_[j] = old_keys[i];
      cnt_[j] = old_cnt[i];
      ++used_;
    }
  }

  std::vector<std::uint64_t> keys_;
  std::vector<std::int32_t> cnt_;
  std::size_t used_ = 0;
};

class MapCountTable {
 public:
  int add(const Point& p) { return m_[p]++; }

  int remove(const Point& p) {
    auto it = m_.find(p);
    int v = --(it->second);
    if (v == 0) m_.erase(it);
    return v;
  }

  void clear() { m_.clear(); }

 private:
  std::unordered_map<Point, std::int32_t, PointHash> m_;
};

// Dispatching wrapper; the packed path covers every production-size run,
// the map path keeps arbitrary (d, n) combinations correct.
class SiteTable {
 public:
  SiteTable(const KeyCodec& codec, std::size_t expected)
      : codec_(codec), packed_(codec.packable ? expected : 0) {}

  int add(const Coord* p) {
    return codec_.packable ? packed_.add(codec_.pack(p)) : map_.add(codec_.reduced(p));
  }

  int remove(const Coord* p) {
    return codec_.packable ? packed_.remove(codec_.pack(p)) : map_.remove(codec_.reduced(p));
  }

  void clear() {
    if (codec_.packable)
      packed_.clear();
    else
      map_.clear();
  }

 private:
  KeyCodec codec_;
  PackedCountTable packed_;
  MapCountTable map_;
};

// Boustrophedon start for torus runs: visits n+1 distinct cells of T_r^d
// whenever n < r^d, so the initial weight is positive even at beta = 1.
std::vector<Coord> initial_positions(int d, int n, int r) {
  std::vector<Coord> pos(static_cast<std::size_t>(n + 1) * d, 0);
  bool snake = false;
  if (r > 0) {
    double cells = 1.0;
    for (int a = 0; a < d; ++a) cells *= r;
    snake = static_cast<double>(n) < cells;
  }
  for (int k = 1; k <= n; ++k) {
    Coord* p = pos.data() + static_cast<std::size_t>(k) * d;
    if (!snake) {
      p[0] = static_cast<Coord>(k);
      continue;
    }
    long long j = k;
    for (int a = 0; a < d; ++a) {
      long long digit = j % r;
      long long higher = j / r;
      p[a] = static_cast<Coord>((higher % 2 == 0) ? digit : r - 1 - digit);
      j = higher;
    }
  }
  return pos;
}

}  // namespace

// ---------------------------------------------------------------------------
// PERM
// ---------------------------------------------------------------------------

namespace {

struct PermTourResult {
  double log_mass = neg_inf;  // total weight reaching length n
  int max_len = 0;
  std::int64_t prunes = 0;
  std::int64_t enrichments = 0;
  std::vector<LogAccumulator> level;  // per-length weight visits
};

struct PermContext {
  int d, n, r;
  double beta;
  double log_2d;
  double log_1mb;
  double log_enrich, log_prune;
  std::vector<double> frozen_log_z;  // log Zhat_k; empty while calibrating
};

class PermTour {
 public:
  PermTour(const PermContext& ctx, std::uint64_t stream_seed)
      : ctx_(ctx),
        rng_(stream_seed),
        codec_(ctx.d, ctx.r, ctx.n),
        table_(codec_, static_cast<std::size_t>(ctx.n) + 1),
        pos_(static_cast<std::size_t>(ctx.n + 1) * ctx.d, 0),
        level_visits_(static_cast<std::size_t>(ctx.n) + 1, 0) {
    res_.level.resize(static_cast<std::size_t>(ctx.n) + 1);
  }

  PermTourResult run() {
    table_.add(pos_.data());
    grow(0, 0.0);
    return std::move(res_);
  }

 private:
  static constexpr std::int64_t kVisitCap = 64'000'000;
  // Per-level population cap: enrichment is skipped once a tour has this many
  // visits at the target length. Keeps tours bounded without biasing the
  // estimator (the decision depends only on the tour's past).
  static constexpr std::int32_t kLevelCap = 32;

  void grow(int k, double log_w) {
    if (++visits_ > kVisitCap)
      throw std::runtime_error(
          "perm: enrichment runaway, raise prune/enrich thresholds");
    ++level_visits_[static_cast<std::size_t>(k)];
    res_.level[static_cast<std::size_t>(k)].add(log_w);
    res_.max_len = std::max(res_.max_len, k);
    if (k == ctx_.n) {
      res_.log_mass = log_sum(res_.log_mass, log_w);
      return;
    }

    const int dir = static_cast<int>(rng_.below(static_cast<std::uint32_t>(2 * ctx_.d)));
    const Coord* cur = pos_.data() + static_cast<std::size_t>(k) * ctx_.d;
    Coord* nxt = pos_.data() + static_cast<std::size_t>(k + 1) * ctx_.d;
    std::memcpy(nxt, cur, sizeof(Coord) * static_cast<std::size_t>(ctx_.d));
    nxt[dir >> 1] += (dir & 1) ? -1 : 1;

    const int mult = table_.add(nxt);
    double log_w_next = log_w + ctx_.log_2d;
    if (mult > 0) {
      if (ctx_.beta == 1.0) {
        table_.remove(nxt);
        ++res_.prunes;
        return;
      }
      log_w_next += mult * ctx_.log_1mb;
    }

    if (!ctx_.frozen_log_z.empty()) {
      const double lr = log_w_next - ctx_.frozen_log_z[static_cast<std::size_t>(k + 1)];
      if (lr > ctx_.log_enrich &&
          level_visits_[static_cast<std::size_t>(k + 1)] < kLevelCap) {
        ++res_.enrichments;
        const double half = log_w_next - 0.6931471805599453;  // log 2
        grow(k + 1, half);
        grow(k + 1, half);
      } else if (lr < ctx_.log_prune) {
        ++res_.prunes;
        if (rng_.coin())
          grow(k + 1, log_w_next + 0.6931471805599453);
        // else the branch dies
      } else {
        grow(k + 1, log_w_next);
      }
    } else {
      grow(k + 1, log_w_next);
    }
    table_.remove(nxt);
  }

  static double log_sum(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
  }

  const PermContext& ctx_;
  Rng rng_;
  KeyCodec codec_;
  SiteTable table_;
  std::vector<Coord> pos_;
  std::vector<std::int32_t> level_visits_;
  std::int64_t visits_ = 0;
  PermTourResult res_;
};

}  // namespace

EstimateWithError perm_partition_estimate(const ModelParams& params,
                                          const ChainGrowthConfig& cfg) {
  params.validate();
  cfg.validate();
  const int n = params.length;
  if (n < 1) throw std::invalid_argument("perm requires n >= 1");

  PermContext ctx;
  ctx.d = params.dim;
  ctx.n = n;
  ctx.r = params.torus_r;
  ctx.beta = params.beta;
  ctx.log_2d = std::log(2.0 * params.dim);
  ctx.log_1mb = params.beta < 1.0 ? std::log1p(-params.beta) : neg_inf;
  ctx.log_enrich = std::log(cfg.enrich_threshold);
  ctx.log_prune = std::log(cfg.prune_threshold);

  std::vector<double> tour_log_mass(static_cast<std::size_t>(cfg.tours), neg_inf);
  std::vector<LogAccumulator> levels(static_cast<std::size_t>(n) + 1);
  int max_len_seen = 0;
  std::int64_t prunes = 0, enrichments = 0;

  // Calibration phase: sequential tours, thresholds updated between tours.
  const int calibration = std::min(cfg.tours, std::max(8, cfg.tours / 4));
  for (int t = 0; t < calibration; ++t) {
    if (t > 0) {
      ctx.frozen_log_z.assign(static_cast<std::size_t>(n) + 1, 0.0);
      for (int k = 0; k <= n; ++k)
        ctx.frozen_log_z[static_cast<std::size_t>(k)] =
            levels[static_cast<std::size_t>(k)].log_sum() - std::log(static_cast<double>(t));
    }
    PermTour tour(ctx, derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    PermTourResult res = tour.run();
    tour_log_mass[static_cast<std::size_t>(t)] = res.log_mass;
    for (int k = 0; k <= n; ++k)
      levels[static_cast<std::size_t>(k)].merge(res.level[static_cast<std::size_t>(k)]);
    max_len_seen = std::max(max_len_seen, res.max_len);
    prunes += res.prunes;
    enrichments += res.enrichments;
  }

  // Production phase: thresholds frozen, tours independent, merged by index.
  if (calibration < cfg.tours) {
    ctx.frozen_log_z.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 0; k <= n; ++k)
      ctx.frozen_log_z[static_cast<std::size_t>(k)] =
          levels[static_cast<std::size_t>(k)].log_sum() -
          std::log(static_cast<double>(calibration));

    unsigned hw = std::thread::hardware_concurrency();
    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(hw ? hw : 1);
    threads = std::min<int>(threads, cfg.tours - calibration);

    std::vector<PermTourResult> slot(static_cast<std::size_t>(cfg.tours - calibration));
    std::atomic<int> next{calibration};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    auto worker = [&](int tid) {
      try {
        for (;;) {
          int t = next.fetch_add(1);
          if (t >= cfg.tours) break;
          PermTour tour(ctx, derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(t)));
          slot[static_cast<std::size_t>(t - calibration)] = tour.run();
        }
      } catch (...) {
        errors[static_cast<std::size_t>(tid)] = std::current_exception();
      }
    };
    if (threads <= 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
      for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);

    for (int t = calibration; t < cfg.tours; ++t) {
      const PermTourResult& res = slot[static_cast<std::size_t>(t - calibration)];
      tour_log_mass[static_cast<std::size_t>(t)] = res.log_mass;
      max_len_seen = std::max(max_len_seen, res.max_len);
      prunes += res.prunes;
      enrichments += res.enrichments;
    }
  }

  LogAccumulator total;
  for (double lm : tour_log_mass) total.add(lm);
  if (total.empty()) {
    std::ostringstream os;
    os << "perm: no tour reached length " << n << " (tours=" << cfg.tours
       << ", max length reached=" << max_len_seen << ", prunes=" << prunes
       << ", enrichments=" << enrichments << "); thresholds look degenerate";
    throw std::runtime_error(os.str());
  }

  const double log_mean = total.log_sum() - std::log(static_cast<double>(cfg.tours));
  std::vector<double> rel(tour_log_mass.size(), 0.0);
  for (std::size_t i = 0; i < rel.size(); ++i)
    rel[i] = tour_log_mass[i] == neg_inf ? 0.0 : std::exp(tour_log_mass[i] - log_mean);
  EstimateWithError bm = batch_means(rel);

  EstimateWithError out;
  out.log_mean = log_mean;
  out.mean = std::exp(log_mean);
  out.std_error = bm.std_error * out.mean;  // relative error scaled back
  out.n_effective = bm.n_effective;
  return out;
}

// ---------------------------------------------------------------------------
// Metropolis
// ---------------------------------------------------------------------------

struct MetropolisSampler::Impl {
  int d, n, r;
  double beta;
  double log_1mb;
  double pivot_fraction;
  bool local_moves;
  Rng rng;
  KeyCodec codec;
  SiteTable table;
  std::vector<Coord> pos;      // (n+1) x d lifted coordinates
  std::vector<Coord> scratch;  // proposed suffix for pivots
  std::vector<int> perm;
  std::vector<int> sign;
  std::int64_t contacts = 0;
  std::int64_t proposed = 0, accepted = 0;

  Impl(const ModelParams& params, const MetropolisConfig& cfg)
      : d(params.dim),
        n(params.length),
        r(params.torus_r),
        beta(params.beta),
        log_1mb(params.beta < 1.0 ? std::log1p(-params.beta) : neg_inf),
        pivot_fraction(cfg.local_moves ? cfg.pivot_fraction : 1.0),
        local_moves(cfg.local_moves),
        rng(derive_stream_seed(cfg.seed, 0)),
        codec(params.dim, params.torus_r, params.length),
        table(codec, static_cast<std::size_t>(params.length) + 1),
        pos(initial_positions(params.dim, params.length, params.torus_r)),
        scratch(static_cast<std::size_t>(params.length + 1) * params.dim, 0),
        perm(params.dim),
        sign(params.dim) {
    for (int k = 0; k <= n; ++k) contacts += table.add(site(k));
    if (beta == 1.0 && contacts > 0)
      throw std::invalid_argument(
          "no contact-free initial state available (beta = 1 with n >= r^d)");
  }

  Coord* site(int k) { return pos.data() + static_cast<std::size_t>(k) * d; }
  const Coord* site(int k) const { return pos.data() + static_cast<std::size_t>(k) * d; }

  bool accept_delta(std::int64_t delta) {
    if (delta <= 0) return true;
    if (beta == 0.0) return true;
    if (beta == 1.0) return false;
    return std::log(rng.uniform01()) < static_cast<double>(delta) * log_1mb;
  }

  void random_symmetry() {
    for (int a = 0; a < d; ++a) perm[a] = a;
    for (int a = d - 1; a > 0; --a)
      std::swap(perm[a], perm[rng.below(static_cast<std::uint32_t>(a + 1))]);
    for (int a = 0; a < d; ++a) sign[a] = rng.coin() ? 1 : -1;
  }

  bool pivot_move() {
    const int p = static_cast<int>(rng.below(static_cast<std::uint32_t>(n)));
    random_symmetry();
    const Coord* anchor = site(p);
    for (int k = p + 1; k <= n; ++k) {
      const Coord* old = site(k);
      Coord* q = scratch.data() + static_cast<std::size_t>(k) * d;
      for (int a = 0; a < d; ++a)
        q[perm[a]] = anchor[perm[a]] + static_cast<Coord>(sign[a] * (old[a] - anchor[a]));
    }

    const std::int64_t before = contacts;
    for (int k = p + 1; k <= n; ++k) contacts -= table.remove(site(k));
    for (int k = p + 1; k <= n; ++k)
      contacts += table.add(scratch.data() + static_cast<std::size_t>(k) * d);

    if (accept_delta(contacts - before)) {
      for (int k = p + 1; k <= n; ++k)
        std::memcpy(site(k), scratch.data() + static_cast<std::size_t>(k) * d,
                    sizeof(Coord) * static_cast<std::size_t>(d));
      return true;
    }
    for (int k = p + 1; k <= n; ++k)
      contacts -= table.remove(scratch.data() + static_cast<std::size_t>(k) * d);
    for (int k = p + 1; k <= n; ++k) contacts += table.add(site(k));
    return false;
  }

  // Candidate middle points adjacent to both neighbours; the set depends
  // only on the two endpoints, so the proposal is symmetric.
  bool local_move() {
    const int i = 1 + static_cast<int>(rng.below(static_cast<std::uint32_t>(n)));
    Coord* cand = scratch.data();
    if (i == n) {
      std::memcpy(cand, site(n - 1), sizeof(Coord) * static_cast<std::size_t>(d));
      const int dir = static_cast<int>(rng.below(static_cast<std::uint32_t>(2 * d)));
      cand[dir >> 1] += (dir & 1) ? -1 : 1;
      return replace_site(n, cand);
    }

    const Coord* u = site(i - 1);
    const Coord* v = site(i + 1);
    int delta_axis[2];
    Coord delta_sign[2];
    int moved = 0;
    for (int a = 0; a < d && moved <= 2; ++a) {
      Coord diff = v[a] - u[a];
      if (diff == 0) continue;
      if (diff == 2 || diff == -2) {  // straight pair: midpoint is forced
        return true;                  // proposal equals the current state
      }
      delta_axis[moved] = a;
      delta_sign[moved] = diff;
      ++moved;
    }
    std::memcpy(cand, u, sizeof(Coord) * static_cast<std::size_t>(d));
    if (moved == 0) {
      // immediate reversal: any neighbour of u works
      const int dir = static_cast<int>(rng.below(static_cast<std::uint32_t>(2 * d)));
      cand[dir >> 1] += (dir & 1) ? -1 : 1;
    } else {
      // corner: two common neighbours
      const int pick = static_cast<int>(rng.below(2));
      cand[delta_axis[pick]] += delta_sign[pick];
    }
    return replace_site(i, cand);
  }

  bool replace_site(int i, const Coord* cand) {
    if (std::memcmp(cand, site(i), sizeof(Coord) * static_cast<std::size_t>(d)) == 0)
      return true;  // no-op proposal
    const std::int64_t before = contacts;
    contacts -= table.remove(site(i));
    contacts += table.add(cand);
    if (accept_delta(contacts - before)) {
      std::memcpy(site(i), cand, sizeof(Coord) * static_cast<std::size_t>(d));
      return true;
    }
    contacts -= table.remove(cand);
    contacts += table.add(site(i));
    return false;
  }

  bool step() {
    ++proposed;
    bool ok;
    if (!local_moves || rng.uniform01() < pivot_fraction)
      ok = pivot_move();
    else
      ok = local_move();
    if (ok) ++accepted;
    return ok;
  }
};

MetropolisSampler::MetropolisSampler(const ModelParams& params,
                                     const MetropolisConfig& cfg) {
  params.validate();
  cfg.validate();
  if (params.length < 1) throw std::invalid_argument("metropolis requires n >= 1");
  impl_ = std::make_unique<Impl>(params, cfg);
}

MetropolisSampler::~MetropolisSampler() = default;
MetropolisSampler::MetropolisSampler(MetropolisSampler&&) noexcept = default;
MetropolisSampler& MetropolisSampler::operator=(MetropolisSampler&&) noexcept = default;

bool MetropolisSampler::step() { return impl_->step(); }

void MetropolisSampler::sweep() {
  for (int i = 0; i < impl_->n; ++i) impl_->step();
}

void MetropolisSampler::set_state(const Walk& w) {
  if (w.length() != impl_->n || w.dim() != impl_->d || w.torus_side() != impl_->r)
    throw std::invalid_argument("set_state: walk does not match the sampler's params");
  Point p(static_cast<std::size_t>(impl_->d), 0);
  for (int k = 0; k <= impl_->n; ++k) {
    if (k > 0) {
      std::uint8_t s = w.steps()[static_cast<std::size_t>(k - 1)];
      p[static_cast<std::size_t>(step_axis(s))] += step_sign(s);
    }
    for (int a = 0; a < impl_->d; ++a)
      impl_->site(k)[a] = p[static_cast<std::size_t>(a)];
  }
  impl_->table.clear();
  impl_->contacts = 0;
  for (int k = 0; k <= impl_->n; ++k) impl_->contacts += impl_->table.add(impl_->site(k));
  if (impl_->beta == 1.0 && impl_->contacts > 0)
    throw std::invalid_argument("set_state: zero-weight state at beta = 1");
}

int MetropolisSampler::length() const { return impl_->n; }
std::int64_t MetropolisSampler::contacts() const { return impl_->contacts; }

double MetropolisSampler::end_norm_sq() const {
  const Coord* e = impl_->site(impl_->n);
  double s = 0.0;
  for (int a = 0; a < impl_->d; ++a) s += static_cast<double>(e[a]) * e[a];
  return s;
}

double MetropolisSampler::increment_norm_sq(int a, int b) const {
  if (a < 0 || b > impl_->n || a > b) throw std::invalid_argument("bad increment times");
  const Coord* pa = impl_->site(a);
  const Coord* pb = impl_->site(b);
  double s = 0.0;
  for (int i = 0; i < impl_->d; ++i) {
    double diff = static_cast<double>(pb[i]) - pa[i];
    s += diff * diff;
  }
  return s;
}

double MetropolisSampler::sup_norm() const {
  double best = 0.0;
  for (int k = 1; k <= impl_->n; ++k) {
    const Coord* p = impl_->site(k);
    double s = 0.0;
    for (int a = 0; a < impl_->d; ++a) {
      Coord v = impl_->r > 0 ? torus_rep(p[a], impl_->r) : p[a];
      s += static_cast<double>(v) * v;
    }
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

Walk MetropolisSampler::snapshot() const {
  std::vector<std::uint8_t> steps;
  steps.reserve(static_cast<std::size_t>(impl_->n));
  for (int k = 1; k <= impl_->n; ++k) {
    const Coord* a = impl_->site(k - 1);
    const Coord* b = impl_->site(k);
    for (int i = 0; i < impl_->d; ++i) {
      Coord diff = b[i] - a[i];
      if (diff == 0) continue;
      steps.push_back(static_cast<std::uint8_t>(2 * i + (diff < 0 ? 1 : 0)));
      break;
    }
  }
  return Walk(impl_->d, std::move(steps), impl_->r);
}

double MetropolisSampler::acceptance_rate() const {
  return impl_->proposed ? static_cast<double>(impl_->accepted) / impl_->proposed : 0.0;
}

// ---------------------------------------------------------------------------

namespace {

struct ObservableSpec {
  std::string name;
  int kind;  // 0: end_norm_sq, 1: contacts, 2: incr_sq
  int a = 0, b = 0;
};

ObservableSpec parse_observable(const std::string& name, int n) {
  ObservableSpec spec;
  spec.name = name;
  if (name == "end_norm_sq") {
    spec.kind = 0;
  } else if (name == "contacts") {
    spec.kind = 1;
  } else if (name.rfind("incr_sq:", 0) == 0) {
    spec.kind = 2;
    std::size_t colon = name.find(':', 8);
    if (colon == std::string::npos)
      throw std::invalid_argument("observable format: incr_sq:a:b");
    spec.a = std::stoi(name.substr(8, colon - 8));
    spec.b = std::stoi(name.substr(colon + 1));
    if (spec.a < 0 || spec.b > n || spec.a >= spec.b)
      throw std::invalid_argument("incr_sq times need 0 <= a < b <= n");
  } else {
    throw std::invalid_argument("unknown observable: " + name);
  }
  return spec;
}

double eval_observable(const ObservableSpec& spec, const MetropolisSampler& s) {
  switch (spec.kind) {
    case 0: return s.end_norm_sq();
    case 1: return static_cast<double>(s.contacts());
    default: return s.increment_norm_sq(spec.a, spec.b);
  }
}

}  // namespace

std::map<std::string, EstimateWithError> metropolis_sample(
    const ModelParams& params, const MetropolisConfig& cfg,
    const std::vector<std::string>& observables) {
  params.validate();
  cfg.validate();
  std::vector<ObservableSpec> specs;
  specs.reserve(observables.size());
  for (const auto& name : observables) specs.push_back(parse_observable(name, params.length));

  const std::int64_t measured = cfg.sweeps - cfg.thermalization;
  std::vector<std::vector<EstimateWithError>> per_chain(
      static_cast<std::size_t>(cfg.chains));

  unsigned hw = std::thread::hardware_concurrency();
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(hw ? hw : 1);
  threads = std::min<int>(threads, cfg.chains);

  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(threads, 1)));
  auto worker = [&](int tid) {
    try {
      for (;;) {
        int c = next.fetch_add(1);
        if (c >= cfg.chains) break;
        MetropolisConfig chain_cfg = cfg;
        chain_cfg.seed = derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(c) + 1);
        MetropolisSampler sampler(params, chain_cfg);
        for (std::int64_t s = 0; s < cfg.thermalization; ++s) sampler.sweep();
        std::vector<std::vector<double>> series(
            specs.size(), std::vector<double>(static_cast<std::size_t>(measured)));
        for (std::int64_t s = 0; s < measured; ++s) {
          sampler.sweep();
          for (std::size_t o = 0; o < specs.size(); ++o)
            series[o][static_cast<std::size_t>(s)] = eval_observable(specs[o], sampler);
        }
        std::vector<EstimateWithError> ests;
        ests.reserve(specs.size());
        for (std::size_t o = 0; o < specs.size(); ++o) ests.push_back(batch_means(series[o]));
        per_chain[static_cast<std::size_t>(c)] = std::move(ests);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(tid)] = std::current_exception();
    }
  };

  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::map<std::string, EstimateWithError> out;
  for (std::size_t o = 0; o < specs.size(); ++o) {
    EstimateWithError merged;
    double se_sq = 0.0;
    merged.n_effective = 0.0;
    for (int c = 0; c < cfg.chains; ++c) {
      const EstimateWithError& e = per_chain[static_cast<std::size_t>(c)][o];
      merged.mean += e.mean;
      se_sq += e.std_error * e.std_error;
      merged.n_effective += e.n_effective;
    }
    merged.mean /= static_cast<double>(cfg.chains);
    merged.std_error = std::sqrt(se_sq) / static_cast<double>(cfg.chains);
    merged.n_effective = std::max(1.0, merged.n_effective);
    merged.log_mean = merged.mean > 0 ? std::log(merged.mean) : neg_inf;
    out[specs[o].name] = merged;
  }
  return out;
}

std::vector<Walk> sample_paths(const ModelParams& params, const MetropolisConfig& cfg,
                               int count) {
  params.validate();
  cfg.validate();
  if (count < 0) throw std::invalid_argument("count must be >= 0");
  std::vector<Walk> out;
  if (count == 0) return out;
  out.reserve(static_cast<std::size_t>(count));

  MetropolisSampler sampler(params, cfg);
  std::vector<double> calib;
  calib.reserve(static_cast<std::size_t>(cfg.thermalization));
  for (std::int64_t s = 0; s < cfg.thermalization; ++s) {
    sampler.sweep();
    if (s >= cfg.thermalization / 4) calib.push_back(sampler.end_norm_sq());
  }
  int stride = 1;
  if (calib.size() >= 16) {
    EstimateWithError bm = batch_means(calib);
    double tau2 = static_cast<double>(calib.size()) / bm.n_effective;  // ~2 tau_int
    stride = static_cast<int>(std::clamp(std::ceil(tau2), 1.0, 128.0));
  }
  for (int i = 0; i < count; ++i) {
    for (int s = 0; s < stride; ++s) sampler.sweep();
    out.push_back(sampler.snapshot());
  }
  return out;
}

}  // namespace wsaw
