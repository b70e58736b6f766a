#pragma once

#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "wsaw/enumerate.hpp"
#include "wsaw/montecarlo.hpp"
#include "wsaw/params.hpp"
#include "wsaw/walk.hpp"

namespace wsaw {

/// A continuous piecewise-linear path in R^d or on the unit torus T^d,
/// starting at the origin and constant after the last knot. Torus points are
/// representatives in [-1/2, 1/2)^d and segments interpolate along the short
/// geodesic (every stored segment is shorter than a half-period).
struct RescaledPath {
  int dim = 1;
  bool torus_ambient = false;
  double horizon = 0.0;  // last knot time; evaluation is constant beyond
  std::vector<double> times;
  std::vector<std::vector<double>> points;

  std::vector<double> eval(double t) const;
};

/// x^(n)/y^(n): knots at k/r^2 with values w(k)/r (torus walks map to torus
/// representatives in [-1/2,1/2)^d), linear in between, constant after n/r^2.
RescaledPath rescale(const Walk& w, int r_scale);

/// The unique continuous R^d path y with y(0) = 0 and x = y mod 1,
/// reconstructed with an anchored stopping rule: anchors advance whenever
/// the representative displacement since the last anchor reaches 1/8 (any
/// threshold below a half-period yields the same lift).
RescaledPath lift_path(const RescaledPath& x);

/// Pointwise mod-1 reduction, with knot refinement so that every stored
/// segment is short enough for lift_path to invert exactly.
RescaledPath project_path(const RescaledPath& y);

/// One characteristic-function probe: increment times 0 < t_1 < ... < t_N
/// (t_0 = 0 implicit), a grid of frequency tuples (each N x d), and the
/// scale k playing r^2.
struct IncrementSpec {
  std::vector<double> times;
  std::vector<std::vector<std::vector<double>>> freq_grid;
  double k_scale = 1.0;
};

/// exp(-(1/2d) sum_j |u_j|^2 (t_j - t_{j-1})): the Gaussian limit value.
double gaussian_fdd_reference(int dim, const std::vector<double>& times,
                              const std::vector<std::vector<double>>& freqs);

struct FddPoint {
  std::complex<double> empirical;
  double reference = 0.0;
  double abs_deviation = 0.0;
};

struct FddResult {
  std::vector<FddPoint> points;  // one per frequency tuple
  double deviation = 0.0;        // max modulus difference over the grid
};

/// Empirical mean of exp(i sum_j u_j . (w(t_j k) - w(t_{j-1} k)) / sqrt(D k))
/// over the sample, against the Gaussian reference.
FddResult fdd_statistic(const std::vector<Walk>& paths, const IncrementSpec& spec,
                        double d_hat);

/// Axis and main-diagonal directions with |u| in {1/2, 1, 2}, combined over
/// N time blocks (Cartesian product).
std::vector<std::vector<std::vector<double>>> standard_frequency_grid(int dim, int blocks);

struct DiffusionFit {
  double d_hat = 0.0;
  int n_min = 0, n_max = 0;
  double residual = 0.0;  // max relative deviation from d_hat * n
};

/// Least-squares slope through the origin of E|w(n)|^2 against n.
DiffusionFit diffusion_fit(const std::map<int, double>& msd_by_n, int n_min, int n_max);

/// A_hat = max over grid pairs of E|Y_t - Y_s|^2 / |t - s| with Y the
/// r-rescaled path; equal times are skipped.
double tightness_bound(const std::vector<Walk>& paths, int r_scale,
                       const std::vector<std::pair<double, double>>& grid);

struct DiluteRow {
  int n = 0;
  int r = 0;
  double ratio = 0.0;        // c_n^T / c_n
  double ratio_std_error = 0.0;  // 0 for exact rows
  double bound_shape = 0.0;  // beta (n^{-(d-4)/2} + n^2/V)
};

/// Exact dilute-regime table from enumeration on both sides.
std::vector<DiluteRow> dilute_ratio_exact(int dim, double beta, int r, int n_min,
                                          int n_max, const EnumerationConfig& cfg = {});

/// PERM-based dilute table for lengths beyond the enumeration budget.
std::vector<DiluteRow> dilute_ratio_perm(int dim, double beta, int r,
                                         const std::vector<int>& lengths,
                                         const ChainGrowthConfig& cfg);

struct DegenerateRow {
  int n = 0;
  int r = 0;
  double epsilon = 0.0;
  double p_hat = 0.0;      // empirical P(sup_k |w(k)|/r > eps)
  double std_error = 0.0;  // binomial
  int samples = 0;
};

/// Tail of the rescaled sup-norm under the torus measure, from Metropolis
/// samples.
DegenerateRow degenerate_tail_probability(const ModelParams& params,
                                          const MetropolisConfig& cfg, double epsilon,
                                          int samples);

}  // namespace wsaw
