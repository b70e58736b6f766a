#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "support/oracles.hpp"
#include "wsaw/lace.hpp"
#include "wsaw/rng.hpp"

using namespace wsaw;

namespace {

Walk random_walk(int d, int n, Rng& rng) {
  std::vector<std::uint8_t> steps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    steps[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(rng.below(static_cast<std::uint32_t>(2 * d)));
  return Walk(d, std::move(steps));
}

// Connected-graph form of J: sum over connected graphs whose edges all hit
// contacts of (-beta)^(edge count). The defining expansion, summed literally.
double j_connected_graphs(const Walk& w, int len, double beta) {
  std::vector<Point> pos = w.positions();
  double total = 0.0;
  for (const auto& graph : testing::connected_graphs(len)) {
    double term = 1.0;
    for (auto [s, t] : graph) {
      if (pos[static_cast<std::size_t>(s)] == pos[static_cast<std::size_t>(t)])
        term *= -beta;
      else {
        term = 0.0;
        break;
      }
    }
    total += term;
  }
  return total;
}

}  // namespace

TEST_CASE("lace enumeration on the smallest intervals") {
  std::vector<Lace> l1 = enumerate_laces({0, 1}, 10);
  REQUIRE(l1.size() == 1);
  CHECK(l1[0].edges == std::vector<std::pair<int, int>>{{0, 1}});

  std::vector<Lace> l2 = enumerate_laces({0, 2}, 10);
  REQUIRE(l2.size() == 1);  // {(0,1),(1,2)} is not connected across time 1
  CHECK(l2[0].edges == std::vector<std::pair<int, int>>{{0, 2}});

  std::vector<Lace> l3 = enumerate_laces({2, 5}, 10);
  CHECK(l3.size() == 2);
  for (const Lace& l : l3) {
    CHECK(l.edges.front().first == 2);
    CHECK(l.edges.back().second == 5);
  }

  CHECK(enumerate_laces({0, 3}, 1).size() == 1);  // edge-count filter
  CHECK_THROWS_AS(enumerate_laces({0, max_lace_interval + 1}, 3), BudgetExceeded);
}

TEST_CASE("laces are exactly the images of connected graphs") {
  for (int len = 1; len <= 5; ++len) {
    std::set<std::vector<std::pair<int, int>>> images;
    for (const auto& graph : testing::connected_graphs(len))
      images.insert(lace_of_graph(graph, len));
    const LaceTable& tab = lace_table(len);
    CHECK(tab.laces.size() == images.size());
    for (const Lace& l : tab.laces) CHECK(images.count(l.edges) == 1);

    // standard lace ordering holds for every generated lace
    for (const Lace& l : tab.laces) {
      const auto& e = l.edges;
      CHECK(e.front().first == 0);
      CHECK(e.back().second == len);
      for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        CHECK(e[i + 1].first < e[i].second);   // consecutive edges overlap
        CHECK(e[i].second < e[i + 1].second);  // t's increase
        if (i + 2 < e.size()) CHECK(e[i].second <= e[i + 2].first);
      }
    }
  }
}

TEST_CASE("lace counts follow the known small-interval sequence") {
  const std::size_t expected[] = {0, 1, 1, 2, 5, 13, 34, 89};
  for (int len = 0; len <= 7; ++len) CHECK(lace_table(len).laces.size() == expected[len]);
}

TEST_CASE("j_value equals the literal connected-graph sum") {
  Rng rng(2024);
  for (int len = 2; len <= 5; ++len) {
    for (int it = 0; it < 40; ++it) {
      Walk w = random_walk(2, len, rng);
      double lace_form = j_value(w, {0, len}, ModelParams{2, 0.3, 0, len});
      double graph_form = j_connected_graphs(w, len, 0.3);
      CHECK(lace_form == doctest::Approx(graph_form).epsilon(1e-12));
    }
  }
}

TEST_CASE("J boundary values") {
  Rng rng(5);
  for (int it = 0; it < 20; ++it) {
    Walk w = random_walk(2, 6, rng);
    ModelParams p{2, 0.5, 0, 6};
    for (int m = 0; m <= 6; ++m) CHECK(j_value(w, {m, m}, p) == 1.0);
    for (int a = 0; a < 6; ++a) CHECK(j_value(w, {a, a + 1}, p) == 0.0);
    // beta = 0 kills every lace term
    ModelParams p0{2, 0.0, 0, 6};
    for (int a = 0; a < 5; ++a) CHECK(j_value(w, {a, a + 2}, p0) == 0.0);
  }
  Walk w(2, {0, 1});  // immediate reversal
  CHECK(j_value(w, {0, 2}, ModelParams{2, 0.3, 0, 2}) ==
        doctest::Approx(-0.3).epsilon(1e-15));
  CHECK_THROWS_AS(j_value(w, {0, 3}, ModelParams{2, 0.3, 0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(j_value(w, {2, 1}, ModelParams{2, 0.3, 0, 2}), std::invalid_argument);
}

TEST_CASE("KJK identity on the returning two-step walk, by hand") {
  Walk w(2, {0, 1});
  ModelParams p{2, 0.3, 0, 2};
  // K[0,2] = 1 - beta; the m = 1 expansion gives K[0,1] K[1,2] + J[0,2]
  CHECK(interaction_weight(w, 0.3, 0, 2) == doctest::Approx(0.7).epsilon(1e-15));
  for (int m = 0; m <= 2; ++m) CHECK(kjk_residual(w, m, p) <= 1e-12);
}

TEST_CASE("KJK identity on a 4-step loop") {
  Walk loop = Walk::from_positions({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}});
  ModelParams p{2, 0.4, 0, 4};
  CHECK(j_value(loop, {0, 4}, p) != 0.0);
  for (int m = 0; m <= 4; ++m) CHECK(kjk_residual(loop, m, p) <= 1e-12);
}

TEST_CASE("KJK identity, exhaustive at unit-test scale") {
  for (double beta : {0.1, 0.5, 1.0}) {
    ModelParams p{2, beta, 0, 0};
    for (int n = 0; n <= 5; ++n) {
      p.length = n;
      for_each_walk(2, n, [&](const std::vector<std::uint8_t>& steps) {
        Walk w(2, steps);
        for (int m = 0; m <= n; ++m) CHECK(kjk_residual(w, m, p) <= 1e-10);
      });
    }
  }
}

TEST_CASE("KJK identity in exact rational arithmetic") {
  const Rational betas[] = {Rational(1, 10), Rational(1, 2), Rational(1)};
  for (const Rational& beta : betas) {
    for (int n = 0; n <= 4; ++n) {
      for_each_walk(2, n, [&](const std::vector<std::uint8_t>& steps) {
        Walk w(2, steps);
        for (int m = 0; m <= n; ++m) CHECK(kjk_residual_exact(w, m, beta).is_zero());
      });
    }
  }
}

TEST_CASE("J depends only on the walk segment") {
  Rng rng(99);
  for (int it = 0; it < 50; ++it) {
    Walk w = random_walk(3, 9, rng);
    int a = static_cast<int>(rng.below(4));
    int b = a + 2 + static_cast<int>(rng.below(4));
    ModelParams p{3, 0.35, 0, 9};
    // rebuild the subwalk from scratch, translated to the origin
    std::vector<std::uint8_t> sub(w.steps().begin() + a, w.steps().begin() + b);
    Walk segment(3, sub);
    ModelParams q{3, 0.35, 0, b - a};
    CHECK(j_value(w, {a, b}, p) == j_value(segment, {0, b - a}, q));
  }
}

TEST_CASE("summing the KJK identity factorizes c_n over split walks") {
  // c_n = sum_{I owns m} c_{I1} * (sum_{w in W_|I|} J[0,|I|]) * c_{n-I2}
  const int d = 2, n = 5, m = 2;
  const double beta = 0.3;
  SequenceSummary seq = enumerate_sequence(ModelParams{d, beta, 0, n}, n);
  auto j_hat = [&](int len) {
    if (len == 0) return 1.0;
    double total = 0.0;
    ModelParams p{d, beta, 0, len};
    for_each_walk(d, len, [&](const std::vector<std::uint8_t>& steps) {
      total += j_value(Walk(d, steps), {0, len}, p);
    });
    return total;
  };
  double rhs = seq.c[m] * seq.c[n - m];  // I1 = I2 = m
  for (int i1 = 0; i1 < m; ++i1)
    for (int i2 = m + 1; i2 <= n; ++i2)
      rhs += seq.c[i1] * j_hat(i2 - i1) * seq.c[n - i2];
  CHECK(rhs == doctest::Approx(seq.c[n]).epsilon(1e-9));
}

TEST_CASE("pi series partial sums") {
  // the n = 0 and n = 1 terms vanish, and beta = 0 kills everything
  std::vector<PiSeriesRow> rows0 = pi_series_partial(ModelParams{2, 0.0, 0, 4}, 0.1, 4);
  for (const PiSeriesRow& row : rows0) CHECK(row.term == 0.0);

  std::vector<PiSeriesRow> rows = pi_series_partial(ModelParams{2, 0.25, 0, 4}, 0.07, 4);
  CHECK(rows[0].term == 0.0);
  CHECK(rows[1].term == 0.0);
  // independent recomputation straight from j_value
  for (int n = 2; n <= 4; ++n) {
    double abs_sum = 0.0;
    ModelParams p{2, 0.25, 0, n};
    for_each_walk(2, n, [&](const std::vector<std::uint8_t>& steps) {
      abs_sum += std::abs(j_value(Walk(2, steps), {0, n}, p));
    });
    double expect = n * std::pow(0.07, n) * abs_sum;
    CHECK(rows[static_cast<std::size_t>(n)].term ==
          doctest::Approx(expect).epsilon(1e-12));
    CHECK(rows[static_cast<std::size_t>(n)].partial_sum ==
          doctest::Approx(rows[static_cast<std::size_t>(n - 1)].partial_sum +
                          rows[static_cast<std::size_t>(n)].term)
              .epsilon(1e-12));
  }

  EnumerationConfig tiny;
  tiny.max_nodes = 3;
  CHECK_THROWS_AS(pi_series_partial(ModelParams{2, 0.25, 0, 4}, 0.07, 4, tiny),
                  BudgetExceeded);
}
