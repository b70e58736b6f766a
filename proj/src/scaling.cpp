#include "wsaw/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wsaw/rng.hpp"

namespace wsaw {

namespace {

// Representative of a real displacement in [-1/2, 1/2).
double rep1(double v) { return v - std::floor(v + 0.5); }

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> rep_diff(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = rep1(a[i] - b[i]);
  return out;
}

}  // namespace

std::vector<double> RescaledPath::eval(double t) const {
  if (times.empty()) throw std::invalid_argument("empty path");
  if (t <= times.front()) return points.front();
  if (t >= horizon) return points.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
  if (k + 1 >= times.size()) return points.back();
  const double lambda = (t - times[k]) / (times[k + 1] - times[k]);
  std::vector<double> out(static_cast<std::size_t>(dim));
  if (!torus_ambient) {
    for (int a = 0; a < dim; ++a)
      out[static_cast<std::size_t>(a)] =
          points[k][static_cast<std::size_t>(a)] +
          lambda * (points[k + 1][static_cast<std::size_t>(a)] -
                    points[k][static_cast<std::size_t>(a)]);
    return out;
  }
  for (int a = 0; a < dim; ++a) {
    double base = points[k][static_cast<std::size_t>(a)];
    double seg = rep1(points[k + 1][static_cast<std::size_t>(a)] - base);
    out[static_cast<std::size_t>(a)] = rep1(base + lambda * seg);
  }
  return out;
}

RescaledPath rescale(const Walk& w, int r_scale) {
  if (r_scale < 1) throw std::invalid_argument("rescale needs r >= 1");
  const int n = w.length();
  const int d = w.dim();
  const double r = static_cast<double>(r_scale);
  RescaledPath path;
  path.dim = d;
  path.torus_ambient = w.torus();
  path.times.resize(static_cast<std::size_t>(n) + 1);
  path.points.resize(static_cast<std::size_t>(n) + 1);

  Point p(static_cast<std::size_t>(d), 0);
  for (int k = 0; k <= n; ++k) {
    if (k > 0) {
      std::uint8_t s = w.steps()[static_cast<std::size_t>(k - 1)];
      p[static_cast<std::size_t>(step_axis(s))] += step_sign(s);
    }
    path.times[static_cast<std::size_t>(k)] = static_cast<double>(k) / (r * r);
    std::vector<double> q(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
      Coord c = w.torus() ? torus_rep(p[static_cast<std::size_t>(a)], w.torus_side())
                          : p[static_cast<std::size_t>(a)];
      double v = static_cast<double>(c) / r;
      q[static_cast<std::size_t>(a)] = w.torus() ? rep1(v) : v;
    }
    path.points[static_cast<std::size_t>(k)] = std::move(q);
  }
  path.horizon = path.times.back();
  return path;
}

RescaledPath lift_path(const RescaledPath& x) {
  if (!x.torus_ambient) throw std::invalid_argument("lift_path expects a torus path");
  if (x.points.empty() || norm(x.points.front()) != 0.0)
    throw std::invalid_argument("lift_path expects a path from the origin");

  RescaledPath y;
  y.dim = x.dim;
  y.torus_ambient = false;
  y.horizon = x.horizon;
  y.times = x.times;
  y.points.resize(x.points.size());
  y.points[0].assign(static_cast<std::size_t>(x.dim), 0.0);

  std::vector<double> anchor_x = x.points[0];
  std::vector<double> anchor_y = y.points[0];
  for (std::size_t j = 1; j < x.points.size(); ++j) {
    std::vector<double> seg = rep_diff(x.points[j], x.points[j - 1]);
    if (norm(seg) >= 0.375)
      throw std::invalid_argument(
          "lift_path: a segment moves too far around the torus to lift unambiguously");
    std::vector<double> delta = rep_diff(x.points[j], anchor_x);
    std::vector<double> q(static_cast<std::size_t>(x.dim));
    for (std::size_t a = 0; a < q.size(); ++a) q[a] = anchor_y[a] + delta[a];
    y.points[j] = q;
    if (norm(delta) >= 0.125) {
      anchor_x = x.points[j];
      anchor_y = q;
    }
  }
  return y;
}

RescaledPath project_path(const RescaledPath& y) {
  if (y.torus_ambient) throw std::invalid_argument("project_path expects an R^d path");
  if (y.points.empty() || norm(y.points.front()) != 0.0)
    throw std::invalid_argument("project_path expects a path from the origin");

  RescaledPath x;
  x.dim = y.dim;
  x.torus_ambient = true;
  x.horizon = y.horizon;
  x.times.push_back(y.times.front());
  x.points.push_back(std::vector<double>(static_cast<std::size_t>(y.dim), 0.0));

  for (std::size_t j = 1; j < y.points.size(); ++j) {
    std::vector<double> seg(static_cast<std::size_t>(y.dim));
    for (std::size_t a = 0; a < seg.size(); ++a)
      seg[a] = y.points[j][a] - y.points[j - 1][a];
    const int pieces = std::max(1, static_cast<int>(std::ceil(norm(seg) / 0.25)));
    for (int piece = 1; piece <= pieces; ++piece) {
      const double lambda = static_cast<double>(piece) / pieces;
      std::vector<double> q(static_cast<std::size_t>(y.dim));
      for (std::size_t a = 0; a < q.size(); ++a)
        q[a] = rep1(y.points[j - 1][a] + lambda * seg[a]);
      x.times.push_back(y.times[j - 1] + lambda * (y.times[j] - y.times[j - 1]));
      x.points.push_back(std::move(q));
    }
  }
  return x;
}

double gaussian_fdd_reference(int dim, const std::vector<double>& times,
                              const std::vector<std::vector<double>>& freqs) {
  if (times.size() != freqs.size())
    throw std::invalid_argument("one frequency tuple per increment");
  double s = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    double u2 = 0.0;
    for (double c : freqs[j]) u2 += c * c;
    s += u2 * (times[j] - prev);
    prev = times[j];
  }
  return std::exp(-s / (2.0 * dim));
}

FddResult fdd_statistic(const std::vector<Walk>& paths, const IncrementSpec& spec,
                        double d_hat) {
  if (!(d_hat > 0.0)) throw std::invalid_argument("D_hat must be positive");
  if (spec.times.empty()) throw std::invalid_argument("need at least one increment time");
  double prev = 0.0;
  for (double t : spec.times) {
    if (t <= prev) throw std::invalid_argument("increment times must increase from 0");
    prev = t;
  }
  const std::size_t blocks = spec.times.size();
  for (const auto& tuple : spec.freq_grid)
    if (tuple.size() != blocks)
      throw std::invalid_argument("each frequency tuple needs one vector per block");

  std::vector<int> marks(blocks + 1, 0);
  for (std::size_t j = 0; j < blocks; ++j)
    marks[j + 1] = static_cast<int>(std::floor(spec.times[j] * spec.k_scale));

  const double scale = 1.0 / std::sqrt(d_hat * spec.k_scale);
  std::vector<std::complex<double>> acc(spec.freq_grid.size(), {0.0, 0.0});
  std::vector<double> incr(blocks * static_cast<std::size_t>(paths.empty() ? 1 : paths[0].dim()));

  for (const Walk& w : paths) {
    const int d = w.dim();
    if (marks[blocks] > w.length())
      throw std::invalid_argument("t_N * k exceeds the walk length");
    // positions at the marked times, one pass over the steps
    std::vector<double> at(static_cast<std::size_t>(blocks + 1) * d, 0.0);
    {
      Point p(static_cast<std::size_t>(d), 0);
      int next_mark = 0;
      for (int k = 0; k <= w.length(); ++k) {
        if (k > 0) {
          std::uint8_t s = w.steps()[static_cast<std::size_t>(k - 1)];
          p[static_cast<std::size_t>(step_axis(s))] += step_sign(s);
        }
        while (next_mark <= static_cast<int>(blocks) && marks[next_mark] == k) {
          for (int a = 0; a < d; ++a)
            at[static_cast<std::size_t>(next_mark) * d + a] =
                static_cast<double>(p[static_cast<std::size_t>(a)]);
          ++next_mark;
        }
        if (next_mark > static_cast<int>(blocks)) break;
      }
    }
    for (std::size_t j = 0; j < blocks; ++j)
      for (int a = 0; a < d; ++a)
        incr[j * d + a] = at[(j + 1) * d + a] - at[j * d + a];

    for (std::size_t g = 0; g < spec.freq_grid.size(); ++g) {
      double phase = 0.0;
      for (std::size_t j = 0; j < blocks; ++j) {
        const auto& u = spec.freq_grid[g][j];
        for (int a = 0; a < d; ++a) phase += u[static_cast<std::size_t>(a)] * incr[j * d + a];
      }
      phase *= scale;
      acc[g] += std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }

  FddResult out;
  out.points.resize(spec.freq_grid.size());
  const double inv = paths.empty() ? 0.0 : 1.0 / static_cast<double>(paths.size());
  for (std::size_t g = 0; g < spec.freq_grid.size(); ++g) {
    FddPoint& pt = out.points[g];
    pt.empirical = acc[g] * inv;
    pt.reference = paths.empty()
                       ? 0.0
                       : gaussian_fdd_reference(paths[0].dim(), spec.times, spec.freq_grid[g]);
    pt.abs_deviation = std::abs(pt.empirical - std::complex<double>(pt.reference, 0.0));
    out.deviation = std::max(out.deviation, pt.abs_deviation);
  }
  return out;
}

std::vector<std::vector<std::vector<double>>> standard_frequency_grid(int dim, int blocks) {
  if (dim < 1 || blocks < 1) throw std::invalid_argument("dim and blocks must be >= 1");
  std::vector<std::vector<double>> base;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(dim));
  for (double mag : {0.5, 1.0, 2.0}) {
    std::vector<double> axis(static_cast<std::size_t>(dim), 0.0);
    axis[0] = mag;
    base.push_back(axis);
    std::vector<double> diag(static_cast<std::size_t>(dim), mag * inv_sqrt_d);
    base.push_back(diag);
  }
  std::vector<std::vector<std::vector<double>>> grid;
  std::vector<std::size_t> pick(static_cast<std::size_t>(blocks), 0);
  for (;;) {
    std::vector<std::vector<double>> tuple;
    tuple.reserve(static_cast<std::size_t>(blocks));
    for (std::size_t j = 0; j < pick.size(); ++j) tuple.push_back(base[pick[j]]);
    grid.push_back(std::move(tuple));
    int j = blocks - 1;
    while (j >= 0 && pick[static_cast<std::size_t>(j)] == base.size() - 1)
      pick[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
    ++pick[static_cast<std::size_t>(j)];
  }
  return grid;
}

DiffusionFit diffusion_fit(const std::map<int, double>& msd_by_n, int n_min, int n_max) {
  if (n_min > n_max) throw std::invalid_argument("empty fit window");
  double num = 0.0, den = 0.0;
  int used = 0;
  for (const auto& [n, msd] : msd_by_n) {
    if (n < n_min || n > n_max || n == 0) continue;
    num += msd * static_cast<double>(n);
    den += static_cast<double>(n) * n;
    ++used;
  }
  if (used < 2) throw std::invalid_argument("diffusion fit needs at least two points");
  DiffusionFit fit;
  fit.d_hat = num / den;
  if (!(fit.d_hat > 0.0))
    throw std::invalid_argument("diffusion fit slope is not positive; data is not diffusive");
  fit.n_min = n_min;
  fit.n_max = n_max;
  for (const auto& [n, msd] : msd_by_n) {
    if (n < n_min || n > n_max || n == 0) continue;
    fit.residual = std::max(fit.residual,
                            std::abs(msd / (fit.d_hat * static_cast<double>(n)) - 1.0));
  }
  return fit;
}

double tightness_bound(const std::vector<Walk>& paths, int r_scale,
                       const std::vector<std::pair<double, double>>& grid) {
  if (paths.empty()) throw std::invalid_argument("tightness_bound needs paths");
  double a_hat = 0.0;
  for (const auto& [s, t] : grid) {
    if (s == t) continue;  // the interpolation already controls this case
    double acc = 0.0;
    for (const Walk& w : paths) {
      RescaledPath y = rescale(w, r_scale);
      std::vector<double> ps = y.eval(s);
      std::vector<double> pt = y.eval(t);
      double d2 = 0.0;
      for (std::size_t a = 0; a < ps.size(); ++a) d2 += (pt[a] - ps[a]) * (pt[a] - ps[a]);
      acc += d2;
    }
    acc /= static_cast<double>(paths.size());
    a_hat = std::max(a_hat, acc / std::abs(t - s));
  }
  return a_hat;
}

std::vector<DiluteRow> dilute_ratio_exact(int dim, double beta, int r, int n_min,
                                          int n_max, const EnumerationConfig& cfg) {
  if (n_min < 0 || n_min > n_max) throw std::invalid_argument("bad length window");
  ModelParams zd{dim, beta, 0, n_max};
  ModelParams torus{dim, beta, r, n_max};
  SequenceSummary cz = enumerate_sequence(zd, n_max, cfg);
  SequenceSummary ct = enumerate_sequence(torus, n_max, cfg);
  double volume = torus.volume();
  std::vector<DiluteRow> rows;
  for (int n = n_min; n <= n_max; ++n) {
    DiluteRow row;
    row.n = n;
    row.r = r;
    row.ratio = ct.c[static_cast<std::size_t>(n)] / cz.c[static_cast<std::size_t>(n)];
    row.bound_shape =
        n == 0 ? 0.0
               : beta * (std::pow(static_cast<double>(n), -(dim - 4) / 2.0) +
                         static_cast<double>(n) * n / volume);
    rows.push_back(row);
  }
  return rows;
}

std::vector<DiluteRow> dilute_ratio_perm(int dim, double beta, int r,
                                         const std::vector<int>& lengths,
                                         const ChainGrowthConfig& cfg) {
  std::vector<DiluteRow> rows;
  double volume = 1.0;
  for (int a = 0; a < dim; ++a) volume *= r;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const int n = lengths[i];
    ChainGrowthConfig zd_cfg = cfg;
    zd_cfg.seed = derive_stream_seed(cfg.seed, 2 * i);
    ChainGrowthConfig t_cfg = cfg;
    t_cfg.seed = derive_stream_seed(cfg.seed, 2 * i + 1);
    EstimateWithError cz = perm_partition_estimate(ModelParams{dim, beta, 0, n}, zd_cfg);
    EstimateWithError ct = perm_partition_estimate(ModelParams{dim, beta, r, n}, t_cfg);
    DiluteRow row;
    row.n = n;
    row.r = r;
    row.ratio = std::exp(ct.log_mean - cz.log_mean);
    const double rel_z = cz.std_error / cz.mean;
    const double rel_t = ct.std_error / ct.mean;
    row.ratio_std_error = row.ratio * std::sqrt(rel_z * rel_z + rel_t * rel_t);
    row.bound_shape = beta * (std::pow(static_cast<double>(n), -(dim - 4) / 2.0) +
                              static_cast<double>(n) * n / volume);
    rows.push_back(row);
  }
  return rows;
}

DegenerateRow degenerate_tail_probability(const ModelParams& params,
                                          const MetropolisConfig& cfg, double epsilon,
                                          int samples) {
  params.validate();
  if (!params.torus())
    throw std::invalid_argument("degenerate-regime check runs on the torus");
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");

  std::vector<Walk> walks = sample_paths(params, cfg, samples);
  const double threshold = epsilon * params.torus_r;
  int hits = 0;
  for (const Walk& w : walks) {
    double sup = 0.0;
    Point p(static_cast<std::size_t>(params.dim), 0);
    for (int k = 1; k <= w.length(); ++k) {
      std::uint8_t s = w.steps()[static_cast<std::size_t>(k - 1)];
      p[static_cast<std::size_t>(step_axis(s))] += step_sign(s);
      double nsq = 0.0;
      for (int a = 0; a < params.dim; ++a) {
        Coord rep = torus_rep(p[static_cast<std::size_t>(a)], params.torus_r);
        nsq += static_cast<double>(rep) * rep;
      }
      sup = std::max(sup, nsq);
    }
    if (std::sqrt(sup) > threshold) ++hits;
  }
  DegenerateRow row;
  row.n = params.length;
  row.r = params.torus_r;
  row.epsilon = epsilon;
  row.samples = samples;
  row.p_hat = static_cast<double>(hits) / samples;
  row.std_error = std::sqrt(row.p_hat * (1.0 - row.p_hat) / samples);
  return row;
}

}  // namespace wsaw
