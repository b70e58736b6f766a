#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wsaw/params.hpp"
#include "wsaw/point.hpp"
#include "wsaw/stats.hpp"
#include "wsaw/walk.hpp"

namespace wsaw {

/// PERM (pruned-enriched chain growth) configuration. Tours are independent
/// given (seed, tour index); thresholds are ratios of the running weight to
/// the current partition estimate at the same length.
struct ChainGrowthConfig {
  int tours = 1000;
  double enrich_threshold = 2.0;
  double prune_threshold = 0.25;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const {
    if (tours < 1) throw std::invalid_argument("tours must be >= 1");
    if (!(prune_threshold > 0.0 && prune_threshold < enrich_threshold))
      throw std::invalid_argument("need 0 < prune_threshold < enrich_threshold");
  }
};

struct MetropolisConfig {
  std::int64_t sweeps = 20000;          // total, including thermalization
  std::int64_t thermalization = 2000;
  double pivot_fraction = 0.2;
  bool local_moves = true;
  std::uint64_t seed = 1;
  int chains = 1;
  int threads = 0;

  void validate() const {
    if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
    if (thermalization < 0 || thermalization >= sweeps)
      throw std::invalid_argument("need 0 <= thermalization < sweeps");
    if (!(pivot_fraction >= 0.0 && pivot_fraction <= 1.0))
      throw std::invalid_argument("pivot_fraction must lie in [0,1]");
    if (pivot_fraction == 0.0 && !local_moves)
      throw std::invalid_argument("move set is empty: enable local moves or pivots");
    if (chains < 1) throw std::invalid_argument("chains must be >= 1");
  }
};

/// Unbiased chain-growth estimate of c_n (or c_n^T for torus params). The
/// log-domain fields stay finite even when c_n overflows a double.
EstimateWithError perm_partition_estimate(const ModelParams& params,
                                          const ChainGrowthConfig& cfg);

/// Fixed-length Metropolis sampler for P_{beta,n} (or its torus analogue):
/// local kink/endpoint updates plus pivot moves (random lattice symmetry
/// applied to the suffix), accepted with min(1, (1-beta)^(delta contacts)).
class MetropolisSampler {
 public:
  MetropolisSampler(const ModelParams& params, const MetropolisConfig& cfg);
  ~MetropolisSampler();
  MetropolisSampler(MetropolisSampler&&) noexcept;
  MetropolisSampler& operator=(MetropolisSampler&&) noexcept;

  /// One proposal; returns whether it was accepted.
  bool step();
  /// n proposals.
  void sweep();

  /// Replaces the current configuration (same length and ambient space).
  void set_state(const Walk& w);

  int length() const;
  std::int64_t contacts() const;
  double end_norm_sq() const;
  /// Squared norm of w(b) - w(a) in lifted (Z^d) coordinates.
  double increment_norm_sq(int a, int b) const;
  /// Largest |w(k)| over k, in ambient coordinates (torus: representatives).
  double sup_norm() const;
  Walk snapshot() const;
  double acceptance_rate() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs cfg.chains independent chains and reports batch-means estimates per
/// observable. Observables: "end_norm_sq", "contacts", "incr_sq:a:b".
std::map<std::string, EstimateWithError> metropolis_sample(
    const ModelParams& params, const MetropolisConfig& cfg,
    const std::vector<std::string>& observables);

/// Decorrelated snapshots under P_{beta,n}: spacing is calibrated from the
/// integrated autocorrelation of |w(n)|^2 measured during thermalization.
std::vector<Walk> sample_paths(const ModelParams& params, const MetropolisConfig& cfg,
                               int count);

}  // namespace wsaw
