#include <doctest.h>

#include <cmath>

#include "wsaw/enumerate.hpp"
#include "wsaw/montecarlo.hpp"
#include "wsaw/rng.hpp"

using namespace wsaw;

TEST_CASE("config validation") {
  ChainGrowthConfig bad;
  bad.prune_threshold = 3.0;  // >= enrich
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.prune_threshold = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  MetropolisConfig m;
  m.thermalization = m.sweeps;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = MetropolisConfig{};
  m.pivot_fraction = 0.0;
  m.local_moves = false;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  CHECK_THROWS_AS(metropolis_sample(ModelParams{2, 0.1, 0, 8}, MetropolisConfig{},
                                    {"no_such_observable"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(metropolis_sample(ModelParams{2, 0.1, 0, 8}, MetropolisConfig{},
                                    {"incr_sq:5:3"}),
                  std::invalid_argument);
}

TEST_CASE("perm is exact at beta = 0") {
  ModelParams p{3, 0.0, 0, 7};
  ChainGrowthConfig cfg;
  cfg.tours = 64;
  cfg.seed = 17;
  EstimateWithError e = perm_partition_estimate(p, cfg);
  CHECK(e.mean == doctest::Approx(279936.0).epsilon(1e-12));  // 6^7
  CHECK(e.std_error <= 1e-6);
}

TEST_CASE("perm covers the exact partition function (pooled over 50 runs)") {
  for (double beta : {0.05, 0.1}) {
    for (int n : {4, 6, 8}) {
      ModelParams p{5, beta, 0, n};
      const double exact = enumerate(p).c_n;
      const int runs = 50;
      double mean = 0.0, se_sq = 0.0;
      for (int run = 0; run < runs; ++run) {
        ChainGrowthConfig cfg;
        cfg.tours = 150;
        cfg.seed = derive_stream_seed(911, static_cast<std::uint64_t>(run));
        EstimateWithError e = perm_partition_estimate(p, cfg);
        mean += e.mean;
        se_sq += e.std_error * e.std_error;
      }
      mean /= runs;
      const double pooled_se = std::sqrt(se_sq) / runs;
      INFO("beta=", beta, " n=", n, " mean=", mean, " exact=", exact,
           " pooled_se=", pooled_se);
      CHECK(std::abs(mean - exact) <= 3.0 * pooled_se);
    }
  }
}

TEST_CASE("perm determinism and seed independence") {
  ModelParams p{5, 0.1, 0, 8};
  ChainGrowthConfig cfg;
  cfg.tours = 400;
  cfg.seed = 7;
  EstimateWithError a = perm_partition_estimate(p, cfg);
  EstimateWithError b = perm_partition_estimate(p, cfg);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  cfg.seed = 8;
  EstimateWithError c = perm_partition_estimate(p, cfg);
  CHECK(std::abs(a.mean - c.mean) <=
        3.0 * std::sqrt(a.std_error * a.std_error + c.std_error * c.std_error));
}

TEST_CASE("perm thread count does not change the estimate") {
  ModelParams p{3, 0.2, 0, 10};
  ChainGrowthConfig cfg;
  cfg.tours = 200;
  cfg.seed = 21;
  cfg.threads = 1;
  EstimateWithError a = perm_partition_estimate(p, cfg);
  cfg.threads = 4;
  EstimateWithError b = perm_partition_estimate(p, cfg);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("perm reports a diagnostic when every tour dies") {
  // kinetic growth of a 1d strict SAW almost surely traps itself long before
  // 60 steps; with 3 tours the estimate has no surviving mass
  ModelParams p{1, 1.0, 0, 60};
  ChainGrowthConfig cfg;
  cfg.tours = 3;
  cfg.seed = 5;
  CHECK_THROWS_WITH_AS(perm_partition_estimate(p, cfg),
                       doctest::Contains("no tour reached"), std::runtime_error);
}

TEST_CASE("perm log-domain path stays finite at n = 10^4") {
  ModelParams p{5, 0.5, 0, 10000};
  ChainGrowthConfig cfg;
  cfg.tours = 8;
  cfg.seed = 3;
  EstimateWithError e = perm_partition_estimate(p, cfg);
  CHECK(std::isfinite(e.log_mean));
  CHECK(e.log_mean > 0.0);
}

TEST_CASE("metropolis matches exact enumeration at n = 8") {
  ModelParams p{5, 0.1, 0, 8};
  EnumerationSummary ex = enumerate(p);
  const double exact = ex.sum_sq_disp / ex.c_n;
  MetropolisConfig cfg;
  cfg.sweeps = 60000;
  cfg.thermalization = 5000;
  cfg.seed = 11;
  EstimateWithError e = metropolis_sample(p, cfg, {"end_norm_sq"}).at("end_norm_sq");
  INFO("est=", e.mean, " exact=", exact, " se=", e.std_error);
  CHECK(std::abs(e.mean - exact) <= 3.0 * e.std_error);
}

TEST_CASE("metropolis free-walk sanity at n = 100") {
  ModelParams p{5, 0.0, 0, 100};
  MetropolisConfig cfg;
  cfg.sweeps = 12000;
  cfg.thermalization = 2000;
  cfg.seed = 4;
  EstimateWithError e = metropolis_sample(p, cfg, {"end_norm_sq"}).at("end_norm_sq");
  CHECK(std::abs(e.mean / 100.0 - 1.0) <= 3.0 * e.std_error / 100.0);
}

TEST_CASE("metropolis detailed balance on a two-state restriction") {
  // x: straight 2-step walk (no contacts); y: immediate reversal (one
  // contact, weight 1 - beta). Both connected by the endpoint move.
  const double beta = 0.4;
  ModelParams p{2, beta, 0, 2};
  Walk x(2, {0, 0});
  Walk y(2, {0, 1});
  MetropolisConfig cfg;
  cfg.pivot_fraction = 0.0;  // local moves only, keeps the kernel simple

  auto transition_rate = [&](const Walk& from, const Walk& to, std::uint64_t seed) {
    const int trials = 40000;
    int hits = 0;
    for (int i = 0; i < trials; ++i) {
      MetropolisConfig c = cfg;
      c.seed = derive_stream_seed(seed, static_cast<std::uint64_t>(i));
      MetropolisSampler s(p, c);
      s.set_state(from);
      s.step();
      if (s.snapshot() == to) ++hits;
    }
    return std::pair<double, double>{
        static_cast<double>(hits) / trials,
        std::sqrt(static_cast<double>(hits) * (trials - hits)) / trials /
            std::sqrt(static_cast<double>(trials))};
  };

  auto [pxy, se_xy] = transition_rate(x, y, 101);
  auto [pyx, se_yx] = transition_rate(y, x, 202);
  const double pi_x = 1.0, pi_y = 1.0 - beta;
  const double lhs = pi_x * pxy, rhs = pi_y * pyx;
  const double se = std::sqrt(pi_x * pi_x * se_xy * se_xy + pi_y * pi_y * se_yx * se_yx);
  INFO("pi(x)P(x->y)=", lhs, " pi(y)P(y->x)=", rhs, " se=", se);
  CHECK(std::abs(lhs - rhs) <= 3.0 * se);
  CHECK(lhs > 0.0);
}

TEST_CASE("metropolis seeded determinism and two-seed agreement") {
  ModelParams p{5, 0.1, 0, 30};
  MetropolisConfig cfg;
  cfg.sweeps = 6000;
  cfg.thermalization = 1000;
  cfg.seed = 31;
  auto a = metropolis_sample(p, cfg, {"end_norm_sq", "contacts"});
  auto b = metropolis_sample(p, cfg, {"end_norm_sq", "contacts"});
  CHECK(a.at("end_norm_sq").mean == b.at("end_norm_sq").mean);
  CHECK(a.at("contacts").std_error == b.at("contacts").std_error);

  cfg.seed = 32;
  auto c = metropolis_sample(p, cfg, {"end_norm_sq"});
  const double se = std::sqrt(std::pow(a.at("end_norm_sq").std_error, 2) +
                              std::pow(c.at("end_norm_sq").std_error, 2));
  CHECK(std::abs(a.at("end_norm_sq").mean - c.at("end_norm_sq").mean) <= 3.0 * se);
}

TEST_CASE("metropolis chain merge is independent of the thread pool") {
  ModelParams p{3, 0.2, 0, 16};
  MetropolisConfig cfg;
  cfg.sweeps = 2000;
  cfg.thermalization = 400;
  cfg.seed = 77;
  cfg.chains = 3;
  cfg.threads = 1;
  auto a = metropolis_sample(p, cfg, {"end_norm_sq"});
  cfg.threads = 3;
  auto b = metropolis_sample(p, cfg, {"end_norm_sq"});
  CHECK(a.at("end_norm_sq").mean == b.at("end_norm_sq").mean);
  CHECK(a.at("end_norm_sq").std_error == b.at("end_norm_sq").std_error);
}

TEST_CASE("sample_paths basics") {
  ModelParams p{2, 0.3, 0, 12};
  MetropolisConfig cfg;
  cfg.sweeps = 2000;
  cfg.thermalization = 300;
  cfg.seed = 8;
  CHECK(sample_paths(p, cfg, 0).empty());
  std::vector<Walk> walks = sample_paths(p, cfg, 25);
  REQUIRE(walks.size() == 25);
  for (const Walk& w : walks) {
    CHECK(w.length() == 12);
    CHECK(w.dim() == 2);
    CHECK(norm_sq(w.position(0)) == 0);
  }
}

TEST_CASE("torus chains wrap once n is well past r") {
  ModelParams p{5, 0.1, 4, 200};
  MetropolisConfig cfg;
  cfg.sweeps = 400;
  cfg.thermalization = 100;
  cfg.seed = 12;
  std::vector<Walk> walks = sample_paths(p, cfg, 30);
  int wrapped = 0;
  for (const Walk& w : walks) {
    // a wrap shows up as two times equal mod r but distinct after lifting
    Walk lifted = lift_walk(w);
    if (contact_count_mod(lifted, 4, 0, w.length()) >
        contact_count(lifted, 0, w.length()))
      ++wrapped;
  }
  CHECK(wrapped == 30);  // at n = 200, r = 4 every equilibrated walk wraps
}

TEST_CASE("metropolis contacts bookkeeping stays exact over a long run") {
  ModelParams p{2, 0.6, 3, 40};
  MetropolisConfig cfg;
  cfg.seed = 55;
  MetropolisSampler s(p, cfg);
  for (int i = 0; i < 2000; ++i) s.step();
  Walk w = s.snapshot();
  CHECK(s.contacts() == contact_count(w, 0, 40));
}
