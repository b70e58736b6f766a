#include <doctest.h>

#include <set>

#include "support/oracles.hpp"
#include "wsaw/enumerate.hpp"
#include "wsaw/walk.hpp"

using namespace wsaw;

namespace {

Walk walk_2d(std::initializer_list<std::pair<int, int>> pts, int r = 0) {
  std::vector<Point> pos;
  for (auto [x, y] : pts) pos.push_back({static_cast<Coord>(x), static_cast<Coord>(y)});
  return Walk::from_positions(pos, r);
}

}  // namespace

TEST_CASE("torus representative convention [-r/2, r/2)") {
  CHECK(torus_rep(0, 3) == 0);
  CHECK(torus_rep(1, 3) == 1);
  CHECK(torus_rep(2, 3) == -1);
  CHECK(torus_rep(3, 3) == 0);
  CHECK(torus_rep(-1, 3) == -1);
  CHECK(torus_rep(-2, 3) == 1);
  // even r: -r/2 included, +r/2 excluded
  CHECK(torus_rep(2, 4) == -2);
  CHECK(torus_rep(-2, 4) == -2);
  CHECK(torus_rep(3, 4) == -1);
  CHECK(torus_rep(7, 5) == 2);
  CHECK(torus_rep(-3, 5) == 2);
  for (int r : {3, 4, 5, 6, 9}) {
    for (int x = -30; x <= 30; ++x) {
      Coord v = torus_rep(x, r);
      CHECK(v >= -(r / 2));
      CHECK(v <= (r + 1) / 2 - 1);
      CHECK((v - x) % r == 0);
    }
  }
}

TEST_CASE("walk construction and invariants") {
  CHECK_THROWS_AS(Walk(2, {0}, 2), std::invalid_argument);  // r < 3
  CHECK_THROWS_AS(Walk(2, {7}), std::invalid_argument);     // step code out of range
  CHECK_THROWS_AS(Walk::from_positions({{1, 0}, {1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Walk::from_positions({{0, 0}, {1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Walk::from_positions({{0, 0}, {0, 0}}), std::invalid_argument);

  Walk w = walk_2d({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(w.length() == 3);
  CHECK(w.position(0) == Point{0, 0});
  CHECK(w.position(3) == Point{0, 1});
  CHECK(w.positions().size() == 4);
}

TEST_CASE("pair_interaction") {
  Walk w = walk_2d({{0, 0}, {1, 0}, {0, 0}});
  CHECK(pair_interaction(w, 0, 2) == -1);
  CHECK(pair_interaction(w, 0, 1) == 0);
  CHECK_THROWS_AS(pair_interaction(w, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(pair_interaction(w, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(pair_interaction(w, 0, 3), std::invalid_argument);

  // three +1 steps on the r=3 circle return to the origin
  Walk t(1, {0, 0, 0}, 3);
  CHECK(pair_interaction(t, 0, 3) == -1);
  CHECK(pair_interaction(t, 0, 1) == 0);
}

TEST_CASE("contact counts and interaction weights") {
  Walk straight(2, {0, 0, 0, 0});
  CHECK(contact_count(straight, 0, 4) == 0);
  CHECK(interaction_weight(straight, 0.7, 0, 4) == 1.0);

  Walk back = walk_2d({{0, 0}, {1, 0}, {0, 0}});
  CHECK(contact_count(back, 0, 2) == 1);
  CHECK(interaction_weight(back, 0.3, 0, 2) == doctest::Approx(0.7).epsilon(1e-15));

  Walk zigzag = walk_2d({{0, 0}, {1, 0}, {0, 0}, {1, 0}, {0, 0}});
  CHECK(contact_count(zigzag, 0, 4) == 4);
  CHECK(interaction_weight(zigzag, 0.5, 0, 4) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(interaction_weight(zigzag, 0.5, 0, 4) ==
        doctest::Approx(testing::naive_weight(zigzag.positions(), 0.5)).epsilon(1e-15));
  CHECK(contact_count(zigzag, 1, 3) == 1);
}

TEST_CASE("incremental weight equals the literal pair product (exhaustive)") {
  for (double beta : {0.0, 0.3, 1.0}) {
    for (int n = 0; n <= 6; ++n) {
      for_each_walk(2, n, [&](const std::vector<std::uint8_t>& steps) {
        Walk w(2, steps);
        double incremental = interaction_weight(w, beta, 0, n);
        double literal = testing::naive_weight(w.positions(), beta);
        CHECK(incremental == doctest::Approx(literal).epsilon(1e-12));
      });
    }
  }
}

TEST_CASE("beta endpoints: free walk and strict self-avoidance") {
  for_each_walk(2, 5, [&](const std::vector<std::uint8_t>& steps) {
    Walk w(2, steps);
    CHECK(interaction_weight(w, 0.0, 0, 5) == 1.0);
    double saw = interaction_weight(w, 1.0, 0, 5);
    CHECK(saw == (contact_count(w, 0, 5) == 0 ? 1.0 : 0.0));
  });
}

TEST_CASE("torus contacts dominate Z^d contacts (K^T <= K)") {
  const int r = 3;
  for (int n = 0; n <= 6; ++n) {
    for_each_walk(2, n, [&](const std::vector<std::uint8_t>& steps) {
      Walk w(2, steps);
      CHECK(contact_count_mod(w, r, 0, n) >= contact_count(w, 0, n));
      CHECK(interaction_weight_mod(w, 0.4, r, 0, n) <=
            interaction_weight(w, 0.4, 0, n) + 1e-15);
    });
  }
}

TEST_CASE("lift examples") {
  // r=3, d=1, torus positions 0,1,-1,0 unwrap to 0,1,2,3
  Walk t = Walk::from_positions({{0}, {1}, {-1}, {0}}, 3);
  Walk lifted = lift_walk(t);
  CHECK(lifted.position(3) == Point{3});
  CHECK(lifted.position(2) == Point{2});

  // walks that never reach the boundary keep their representatives
  Walk small = walk_2d({{0, 0}, {1, 0}, {1, 1}}, 7);
  Walk ls = lift_walk(small);
  for (int k = 0; k <= 2; ++k) CHECK(ls.position(k) == small.position(k));

  CHECK_THROWS_AS(lift_walk(ls), std::invalid_argument);        // not a torus walk
  CHECK_THROWS_AS(project_walk(small, 5), std::invalid_argument);  // already torus
  CHECK_THROWS_AS(project_walk(ls, 2), std::invalid_argument);  // r < 3
}

TEST_CASE("lift is a bijection onto W_n (exhaustive, r=3)") {
  for (int d : {1, 2}) {
    for (int n = 1; n <= (d == 1 ? 6 : 6); ++n) {
      std::set<std::vector<std::uint8_t>> images;
      std::uint64_t count = 0;
      for_each_walk(d, n, [&](const std::vector<std::uint8_t>& steps) {
        Walk tw(d, steps, 3);
        // reconstruct the torus walk from its representative positions alone,
        // then lift: positions determine the walk when r >= 3
        Walk rebuilt = Walk::from_positions(tw.positions(), 3);
        CHECK(rebuilt == tw);
        Walk zd = lift_walk(tw);
        // defining relation of the lift, checked against the representatives
        std::vector<Point> tp = tw.positions();
        for (int k = 1; k <= n; ++k) {
          Point prev = zd.position(k - 1);
          for (int a = 0; a < d; ++a) {
            Coord step_rep = torus_rep(tp[k][a] - tp[k - 1][a], 3);
            CHECK(zd.position(k)[a] == prev[a] + step_rep);
          }
        }
        CHECK(project_walk(zd, 3) == tw);
        images.insert(zd.steps());
        ++count;
      });
      std::uint64_t expected = 1;
      for (int i = 0; i < n; ++i) expected *= static_cast<std::uint64_t>(2 * d);
      CHECK(images.size() == expected);  // injective and onto
      CHECK(count == expected);
    }
  }
}

TEST_CASE("project then lift round trip on Z^d walks") {
  for (int n = 0; n <= 6; ++n) {
    for_each_walk(2, n, [&](const std::vector<std::uint8_t>& steps) {
      Walk w(2, steps);
      CHECK(lift_walk(project_walk(w, 3)) == w);
    });
  }
}
