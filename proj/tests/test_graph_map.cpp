#include "fbc/graph_map.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "helpers.hpp"

using namespace fbc;
using testutil::word_from;

namespace {

// Crossing-count oracle: walk the image and tally, independent of the
// library's position map.
IntMatrix oracle_transition(const GraphSelfMap& f, int height) {
  auto es = f.stratum_edges(height);
  IntMatrix m(es.size(), std::vector<std::int64_t>(es.size(), 0));
  for (std::size_t j = 0; j < es.size(); ++j) {
    for (Dir d : f.edge_image(es[j])) {
      for (std::size_t i = 0; i < es.size(); ++i)
        if (edge_of(d) == es[i]) ++m[i][j];
    }
  }
  return m;
}

}  // namespace

TEST_CASE("tighten removes backtracking and is idempotent") {
  MarkedGraph g = make_rose(2);
  Dir a = forward_dir(0), b = forward_dir(1);
  // a a' b -> b
  CHECK(g.tighten({a, reverse_dir(a), b}) == EdgePath{b});
  // already tight
  EdgePath p{a, b, a};
  CHECK(g.tighten(p) == p);
  // a b b' a' -> empty
  CHECK(g.tighten({a, b, reverse_dir(b), reverse_dir(a)}).empty());
  CHECK(g.tighten(g.tighten({a, reverse_dir(a), b, a, reverse_dir(a)})) ==
        g.tighten({a, reverse_dir(a), b, a, reverse_dir(a)}));
}

TEST_CASE("map_path concatenates images and tightens") {
  auto fib = testutil::fibonacci_map();
  Dir a = forward_dir(0), b = forward_dir(1);
  CHECK(fib.map_path({a}) == EdgePath{a, b});
  // b a -> a a b
  CHECK(fib.map_path({b, a}) == EdgePath{a, a, b});
  auto id = GraphSelfMap::on_rose(2, {word_from({1}), word_from({2})});
  EdgePath p{a, b, reverse_dir(a)};
  CHECK(id.map_path(p) == p);
}

TEST_CASE("map_path commutes with tighten and iteration") {
  std::mt19937_64 rng(5150);
  auto fib = testutil::fibonacci_map();
  auto sq = GraphSelfMap::on_rose(2, {word_from({1, 2, 1}), word_from({1, 2})});
  for (int t = 0; t < 100; ++t) {
    auto w = testutil::random_reduced_word(rng, 2, 8);
    EdgePath p = fib.graph().realize_word(w);
    REQUIRE(fib.map_path(fib.map_path(p)) == sq.map_path(p));
  }
}

TEST_CASE("transition matrices match the crossing-count oracle") {
  auto fib = testutil::fibonacci_map();
  CHECK(fib.transition_matrix(1) == IntMatrix{{1, 1}, {1, 0}});

  auto e1 = testutil::e1_map();
  CHECK(e1.transition_matrix(1) == IntMatrix{{1}});
  CHECK(e1.transition_matrix(2) == IntMatrix{{1, 1}, {1, 0}});

  auto plastic = testutil::plastic_map();
  CHECK(plastic.transition_matrix(1) == IntMatrix{{0, 0, 1}, {1, 0, 1}, {0, 1, 0}});

  std::mt19937_64 rng(808);
  for (int t = 0; t < 100; ++t) {
    int rank = 2 + static_cast<int>(rng() % 3);
    std::vector<ReducedWord> images;
    for (int i = 0; i < rank; ++i)
      images.push_back(testutil::random_reduced_word(rng, rank, 1 + static_cast<int>(rng() % 6)));
    GraphSelfMap f = GraphSelfMap::on_rose(rank, images);
    REQUIRE(f.transition_matrix(1) == oracle_transition(f, 1));
  }
}

TEST_CASE("classify_strata certifies EG/NEG kinds") {
  auto e1 = testutil::e1_map();
  auto strata = e1.classify_strata();
  REQUIRE(strata.size() == 2);
  CHECK(strata[0].kind == StratumKind::NEG);
  CHECK(strata[0].pf->lower == 1);
  CHECK(strata[1].kind == StratumKind::EG);
  CHECK(std::abs(strata[1].pf->midpoint() - 1.6180339887) <= 1e-9);

  auto plastic = testutil::plastic_map();
  auto ps = plastic.classify_strata();
  REQUIRE(ps.size() == 1);
  CHECK(ps[0].kind == StratumKind::EG);
  CHECK(std::abs(ps[0].pf->midpoint() - 1.3247179572) <= 1e-9);

  // zero stratum: an edge whose image avoids its own stratum
  MarkedGraph g = make_rose(2);
  std::map<std::string, EdgePath> im;
  im["a"] = {forward_dir(0)};
  im["b"] = {forward_dir(0)};
  GraphSelfMap z(std::move(g), std::move(im), {{"a"}, {"a", "b"}});
  auto zs = z.classify_strata();
  REQUIRE(zs.size() == 2);
  CHECK(zs[1].kind == StratumKind::Zero);
}

TEST_CASE("illegal turns are the turns whose Tf orbit degenerates") {
  auto fib = testutil::fibonacci_map();
  Dir a = forward_dir(0), b = forward_dir(1);
  Dir A = reverse_dir(a), B = reverse_dir(b);

  // Orbit oracle alongside: Tf(a)=a, Tf(b)=a, Tf(A)=B, Tf(B)=A.
  CHECK(fib.first_direction(a) == a);
  CHECK(fib.first_direction(b) == a);
  CHECK(fib.first_direction(A) == B);
  CHECK(fib.first_direction(B) == A);

  auto illegal = fib.illegal_turns();
  CHECK(illegal.count(Turn(a, b)) == 1);   // degenerates in one step
  CHECK(illegal.count(Turn(A, b)) == 0);   // cycles without degenerating
  CHECK(illegal.count(Turn(A, B)) == 0);
  CHECK(illegal.size() == 1);

  auto id = GraphSelfMap::on_rose(2, {word_from({1}), word_from({2})});
  CHECK(id.illegal_turns().empty());
}

TEST_CASE("turns with equal first image letter are illegal immediately") {
  auto fib = testutil::fibonacci_map();
  Dir a = forward_dir(0), b = forward_dir(1);
  CHECK(fib.first_direction(a) == fib.first_direction(b));
  CHECK_FALSE(fib.is_turn_legal(Turn(a, b)));
}

TEST_CASE("r-legality checks height and illegal turns") {
  auto e1 = testutil::e1_map();
  Dir a = forward_dir(0), b = forward_dir(1), c = forward_dir(2);
  CHECK(e1.is_r_legal({a}, 2));
  CHECK_FALSE(e1.is_r_legal({c}, 2));  // height 1 < 2
  // path a b crosses the illegal turn {a', b}? Turn taken is {a', b}: legal.
  CHECK(e1.is_r_legal({a, b}, 2));
  // path a' b takes the turn {a, b}, which is illegal at height 2
  CHECK_FALSE(e1.is_r_legal({reverse_dir(a), b}, 2));
}

TEST_CASE("bcc bound is the sum of image lengths") {
  CHECK(testutil::fibonacci_map().bcc_bound() == 3);
  CHECK(testutil::plastic_map().bcc_bound() == 4);
  auto id = GraphSelfMap::on_rose(3, {word_from({1}), word_from({2}), word_from({3})});
  CHECK(id.bcc_bound() == 3);
}

TEST_CASE("critical constant is 2 BCC / (lambda - 1)") {
  auto e1 = testutil::e1_map();
  // BCC(E1) = 4 (images ab, a, c); lambda golden
  double cc = static_cast<double>(e1.critical_constant(2));
  CHECK(cc == Catch::Approx(2.0 * 4 / (1.6180339887 - 1)).epsilon(1e-6));

  auto fib = testutil::fibonacci_map();
  double ccf = static_cast<double>(fib.critical_constant(1));
  CHECK(ccf == Catch::Approx(9.708).epsilon(1e-3));

  CHECK_THROWS_AS(e1.critical_constant(1), domain_error);  // NEG stratum
}

TEST_CASE("filtration invariance is enforced") {
  MarkedGraph g = make_rose(2);
  std::map<std::string, EdgePath> im;
  im["a"] = {forward_dir(0), forward_dir(1)};  // image leaves G_1
  im["b"] = {forward_dir(1)};
  CHECK_THROWS_AS(GraphSelfMap(std::move(g), std::move(im), {{"a"}, {"a", "b"}}),
                  input_error);
}

TEST_CASE("malformed paths are rejected") {
  MarkedGraph g;
  g.add_vertex("u");
  g.add_vertex("v");
  g.add_vertex("w");
  g.add_edge("e", 0, 1);
  g.add_edge("f", 1, 2);
  g.add_edge("g", 2, 0);
  g.set_default_marking();
  CHECK_THROWS_AS(g.tighten({forward_dir(0), forward_dir(2)}), malformed_path);
  CHECK(g.tighten({forward_dir(0), forward_dir(1)}).size() == 2);
}
