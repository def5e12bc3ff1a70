#include "fbc/electric.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "helpers.hpp"

using namespace fbc;
using testutil::cyc_from;
using testutil::word_from;

namespace {

// Exhaustive BFS oracle over the whole ball, moves generated independently of
// the library (letters plus every peripheral element up to the bound).
std::map<std::vector<Letter>, long> bfs_ball_oracle(int rank,
                                                    const std::vector<std::vector<ReducedWord>>& pel,
                                                    int radius) {
  std::map<std::vector<Letter>, long> dist;
  std::deque<std::vector<Letter>> q;
  dist[{}] = 0;
  q.push_back({});
  while (!q.empty()) {
    auto g = q.front();
    q.pop_front();
    long dg = dist[g];
    ReducedWord gw{std::vector<Letter>(g)};
    std::vector<ReducedWord> moves;
    for (int key = 0; key < 2 * rank; ++key) {
      Letter x = static_cast<Letter>((key / 2 + 1) * (key % 2 == 0 ? 1 : -1));
      moves.push_back(ReducedWord({x}));
    }
    for (const auto& comp : pel)
      for (const auto& p : comp) moves.push_back(p);
    for (const auto& m : moves) {
      auto h = concat(gw, m);
      if (static_cast<int>(h.size()) > radius) continue;
      if (dist.emplace(h.letters(), dg + 1).second) q.push_back(h.letters());
    }
  }
  return dist;
}

ElectricSpace e1_space(int radius = 12, int enum_bound = 24) {
  SubgroupSystem peripherals;
  peripherals.add_component(fold({word_from({3})}));
  peripherals.malnormal_checked = is_malnormal(peripherals).malnormal;
  return ElectricSpace(3, std::move(peripherals), radius, enum_bound);
}

}  // namespace

TEST_CASE("electric length basics with a cyclic peripheral") {
  auto space = e1_space();
  CHECK(space.has_letter_support_fast_path());
  CHECK(space.length(ReducedWord()).length == 0);

  // c^5 is one cone transit
  CHECK(space.length(word_from({3, 3, 3, 3, 3})).length == 1);

  // a c^9 b: letter, cone, letter
  std::vector<Letter> w{1};
  for (int i = 0; i < 9; ++i) w.push_back(3);
  w.push_back(2);
  auto el = space.length(ReducedWord(w));
  CHECK(el.length == 3);
  CHECK(el.exact);
}

TEST_CASE("electric length never exceeds word length; equality without peripherals") {
  auto space = e1_space();
  ElectricSpace empty(3, SubgroupSystem{}, 12, 12);
  std::mt19937_64 rng(555);
  for (int t = 0; t < 200; ++t) {
    auto w = testutil::random_reduced_word(rng, 3, 1 + static_cast<int>(rng() % 10));
    REQUIRE(space.length(w).length <= static_cast<long>(w.size()));
    REQUIRE(empty.length(w).length == static_cast<long>(w.size()));
  }
}

TEST_CASE("peripheral elements have electric length exactly 1") {
  auto space = e1_space();
  for (int k = 1; k <= 8; ++k) {
    std::vector<Letter> w(k, Letter(3));
    CHECK(space.length(ReducedWord(w)).length == 1);
    std::vector<Letter> wi(k, Letter(-3));
    CHECK(space.length(ReducedWord(wi)).length == 1);
  }
}

TEST_CASE("triangle inequality on random pairs") {
  auto space = e1_space(20, 24);
  std::mt19937_64 rng(616);
  for (int t = 0; t < 200; ++t) {
    auto u = testutil::random_reduced_word(rng, 3, 1 + static_cast<int>(rng() % 8));
    auto v = testutil::random_reduced_word(rng, 3, 1 + static_cast<int>(rng() % 8));
    auto uv = concat(u, v);
    REQUIRE(space.length(uv).length <= space.length(u).length + space.length(v).length);
  }
}

TEST_CASE("fast path agrees with exhaustive BFS on the radius-6 ball") {
  auto space = e1_space(6, 12);
  auto oracle = bfs_ball_oracle(3, space.peripheral_elements(), 6);
  int checked = 0;
  for (const auto& [letters, d] : oracle) {
    ReducedWord w{std::vector<Letter>(letters)};
    REQUIRE(space.length(w).length == d);
    ++checked;
  }
  CHECK(checked > 500);
}

TEST_CASE("ball dijkstra agrees with BFS for a non-letter peripheral") {
  // <a b a'> : cancellation through the conjugating letter matters
  SubgroupSystem peripherals;
  peripherals.add_component(fold({word_from({1, 2, -1})}));
  ElectricSpace space(2, std::move(peripherals), 5, 10);
  CHECK_FALSE(space.has_letter_support_fast_path());

  auto oracle = bfs_ball_oracle(2, space.peripheral_elements(), 5);
  for (const auto& [letters, d] : oracle) {
    ReducedWord w{std::vector<Letter>(letters)};
    auto el = space.length(w);
    REQUIRE(el.length == d);
    REQUIRE(el.exact);
  }

  // b^4 via a' . (a b^4 a') . a costs 3, against 4 plain letters
  CHECK(space.length(word_from({2, 2, 2, 2})).length == 3);

  CHECK_THROWS_AS(space.length(word_from({1, 2, 1, 2, 1, 2})), out_of_ball);
}

TEST_CASE("electric conjugacy length") {
  auto space = e1_space();
  CHECK(space.conjugacy_length(cyc_from({3, 3, 3, 3, 3})).length == 1);

  // [b a b'] is the class of [a]
  auto c = cyclic_reduce(word_from({2, 1, -2})).first;
  CHECK(space.conjugacy_length(c).length == 1);

  std::vector<Letter> w{1};
  for (int i = 0; i < 9; ++i) w.push_back(3);
  w.push_back(2);
  CHECK(space.conjugacy_length(CyclicWord::from_cyclically_reduced(w)).length == 3);

  // conjugacy invariance within bounds
  std::mt19937_64 rng(717);
  for (int t = 0; t < 100; ++t) {
    auto base = testutil::random_reduced_word(rng, 3, 1 + static_cast<int>(rng() % 6));
    auto u = testutil::random_reduced_word(rng, 3, 2);
    auto c1 = cyclic_reduce(base).first;
    auto c2 = cyclic_reduce(concat(concat(u, base), u.inverted())).first;
    REQUIRE(space.conjugacy_length(c1).length == space.conjugacy_length(c2).length);
  }
}

TEST_CASE("conjugacy length is nonincreasing in the conjugator bound") {
  SubgroupSystem peripherals;
  peripherals.add_component(fold({word_from({1, 2, -1})}));
  ElectricSpace space(2, std::move(peripherals), 6, 12);
  std::mt19937_64 rng(818);
  for (int t = 0; t < 40; ++t) {
    auto w = testutil::random_reduced_word(rng, 2, 1 + static_cast<int>(rng() % 4));
    auto c = cyclic_reduce(w).first;
    if (c.empty() || static_cast<int>(c.size()) > 4) continue;
    long l0 = space.conjugacy_length(c, 0).length;
    long l1 = space.conjugacy_length(c, 1).length;
    long l2 = space.conjugacy_length(c, 2).length;
    REQUIRE(l1 <= l0);
    REQUIRE(l2 <= l1);
  }
}

TEST_CASE("comparability constant over an E1 corpus") {
  auto e1 = testutil::e1_map();
  auto nas = nonattracting_system(e1, 2, 20, 6);
  auto space = e1_space();

  std::vector<CyclicWord> corpus{cyc_from({1})};
  auto rep = comparability_constant(space, nas, e1, corpus);
  CHECK(rep.constant == Catch::Approx(1.0));

  std::vector<Letter> w{1};
  for (int i = 0; i < 9; ++i) w.push_back(3);
  w.push_back(2);
  corpus.push_back(CyclicWord::from_cyclically_reduced(w));
  auto rep2 = comparability_constant(space, nas, e1, corpus);
  // relative 2 vs electric 3 contributes max(2/3, 3/2) = 1.5
  CHECK(rep2.constant == Catch::Approx(1.5));

  CHECK_THROWS_AS(comparability_constant(space, nas, e1, {}), precondition_error);
  CHECK_THROWS_AS(comparability_constant(space, nas, e1, {cyc_from({3})}),
                  precondition_error);
}
