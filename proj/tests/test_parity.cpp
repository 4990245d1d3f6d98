#include "ordalia/parity.hpp"

#include <random>
#include <stdexcept>

#include "doctest.h"
#include "game_oracle.hpp"

using namespace ordalia;
using ordalia_test::even_region_fixpoint;
using ordalia_test::verify_solution;

TEST_CASE("single-vertex loops") {
  ParityGame g;
  g.add_vertex(false, 0);
  g.add_edge(0, 0);
  auto sol = solve_parity_game(g);
  CHECK(sol.winner[0] == 0);
  CHECK(sol.strategy[0] == 0);

  ParityGame h;
  h.add_vertex(false, 1);
  h.add_edge(0, 0);
  CHECK(solve_parity_game(h).winner[0] == 1);
}

TEST_CASE("ensure_total closes sinks against their owner") {
  ParityGame g;
  g.add_vertex(false, 4);  // Even-owned sink
  g.add_vertex(true, 4);   // Odd-owned sink
  g.ensure_total();
  auto sol = solve_parity_game(g);
  CHECK(sol.winner[0] == 1);
  CHECK(sol.winner[1] == 0);
}

TEST_CASE("random games agree with the fixpoint oracle and verify") {
  std::mt19937 rng(1717);
  for (int round = 0; round < 400; ++round) {
    ParityGame g;
    int n = 1 + (int)(rng() % 8);
    for (int v = 0; v < n; ++v) g.add_vertex(rng() % 2 == 0, (int)(rng() % 5));
    for (int v = 0; v < n; ++v) {
      int deg = 1 + (int)(rng() % 3);
      for (int e = 0; e < deg; ++e) g.add_edge(v, (int)(rng() % n));
    }
    auto sol = solve_parity_game(g);
    auto even = even_region_fixpoint(g);
    for (int v = 0; v < n; ++v) {
      INFO("round ", round, " vertex ", v);
      CHECK(sol.winner[v] == (even[v] ? 0 : 1));
    }
    std::string err = verify_solution(g, sol);
    INFO("round ", round, ": ", err);
    CHECK(err.empty());
  }
}

namespace {

// Every branch sees the given letter infinitely often: the state entered
// after reading it has rank 2, the other rank 1.
ParityTreeAutomaton infinitely_often(const std::vector<std::string>& alphabet, int letter) {
  ParityTreeAutomaton a(alphabet, 2);  // 0: saw it, 1: saw something else
  a.set_rank(0, 2);
  a.set_rank(1, 1);
  a.add_root(0);
  a.add_root(1);
  for (int q = 0; q < 2; ++q)
    for (int l = 0; l < (int)alphabet.size(); ++l) {
      int child = l == letter ? 0 : 1;
      a.add_transition(q, l, child, child);
    }
  return a;
}

ParityTreeAutomaton universal(const std::vector<std::string>& alphabet) {
  ParityTreeAutomaton a(alphabet, 1);
  a.add_root(0);
  for (int l = 0; l < (int)alphabet.size(); ++l) a.add_transition(0, l, 0, 0);
  return a;
}

// Only the given letter, everywhere.
ParityTreeAutomaton constant(const std::vector<std::string>& alphabet, int letter) {
  ParityTreeAutomaton a(alphabet, 1);
  a.add_root(0);
  a.add_transition(0, letter, 0, 0);
  return a;
}

// Every branch is eventually all `letter`.
ParityTreeAutomaton eventually_constant(const std::vector<std::string>& alphabet, int letter) {
  ParityTreeAutomaton a(alphabet, 2);  // 0: free, 1: committed
  a.set_rank(0, 1);
  a.set_rank(1, 0);
  a.add_root(0);
  a.add_root(1);
  for (int l = 0; l < (int)alphabet.size(); ++l) {
    a.add_transition(0, l, 0, 0);
    if (l == letter) {
      a.add_transition(0, l, 1, 1);
      a.add_transition(1, l, 1, 1);
    }
  }
  return a;
}

RegularTree random_tree(std::mt19937& rng, const std::vector<std::string>& alphabet) {
  RegularTree t;
  t.alphabet = alphabet;
  int n = 1 + (int)(rng() % 3);
  for (int i = 0; i < n; ++i)
    t.add_node((int)(rng() % alphabet.size()), (int)(rng() % n), (int)(rng() % n));
  t.root = 0;
  return t;
}

}  // namespace

TEST_CASE("pta emptiness basics") {
  std::vector<std::string> ab = {"a", "b"};

  ParityTreeAutomaton no_roots(ab, 1);
  no_roots.add_transition(0, 0, 0, 0);
  CHECK(pta_is_empty(no_roots));
  CHECK(!pta_witness(no_roots).has_value());

  ParityTreeAutomaton stuck(ab, 1);
  stuck.add_root(0);  // no transitions at all
  CHECK(pta_is_empty(stuck));

  ParityTreeAutomaton uni = universal({"a"});
  CHECK(!pta_is_empty(uni));
  auto w = pta_witness(uni);
  REQUIRE(w.has_value());
  CHECK(w->size() == 1);
  CHECK(pta_accepts(uni, *w));
}

TEST_CASE("witnesses re-accepted by their automata") {
  std::vector<std::string> ab = {"a", "b"};
  std::vector<ParityTreeAutomaton> autos = {
      universal(ab),
      infinitely_often(ab, 0),
      eventually_constant(ab, 1),
      intersect(infinitely_often(ab, 0), infinitely_often(ab, 1)),
  };
  for (const auto& a : autos) {
    auto w = pta_witness(a);
    REQUIRE(w.has_value());
    CHECK(pta_accepts(a, *w));
  }
}

TEST_CASE("membership on handmade trees") {
  std::vector<std::string> ab = {"a", "b"};
  ParityTreeAutomaton infa = infinitely_often(ab, 0);

  RegularTree all_a;
  all_a.alphabet = ab;
  all_a.add_node(0, 0, 0);
  CHECK(pta_accepts(infa, all_a));

  RegularTree all_b;
  all_b.alphabet = ab;
  all_b.add_node(1, 0, 0);
  CHECK(!pta_accepts(infa, all_b));

  RegularTree alternating;
  alternating.alphabet = ab;
  alternating.add_node(0, 1, 1);
  alternating.add_node(1, 0, 0);
  CHECK(pta_accepts(infa, alternating));
  CHECK(pta_accepts(infinitely_often(ab, 1), alternating));
}

TEST_CASE("intersection") {
  std::vector<std::string> ab = {"a", "b"};

  SUBCASE("with universal and with empty") {
    std::mt19937 rng(5);
    ParityTreeAutomaton a = infinitely_often(ab, 0);
    ParityTreeAutomaton both = intersect(a, universal(ab));
    for (int i = 0; i < 20; ++i) {
      RegularTree t = random_tree(rng, ab);
      CHECK(pta_accepts(both, t) == pta_accepts(a, t));
    }
    ParityTreeAutomaton none(ab, 1);  // no roots
    none.add_transition(0, 0, 0, 0);
    CHECK(pta_is_empty(intersect(a, none)));
  }

  SUBCASE("two letter-position constraints") {
    // Root letter is a; the root's left child letter is b.
    ParityTreeAutomaton root_a(ab, 2);
    root_a.add_root(0);
    root_a.add_transition(0, 0, 1, 1);
    for (int l = 0; l < 2; ++l) root_a.add_transition(1, l, 1, 1);

    ParityTreeAutomaton left_b(ab, 3);
    left_b.add_root(0);
    for (int l = 0; l < 2; ++l) {
      left_b.add_transition(0, l, 1, 2);  // left child must read b
      left_b.add_transition(2, l, 2, 2);
    }
    left_b.add_transition(1, 1, 2, 2);

    ParityTreeAutomaton both = intersect(root_a, left_b);
    std::mt19937 rng(6);
    int agree_true = 0;
    for (int i = 0; i < 20; ++i) {
      RegularTree t = random_tree(rng, ab);
      bool want = pta_accepts(root_a, t) && pta_accepts(left_b, t);
      CHECK(pta_accepts(both, t) == want);
      agree_true += want;
    }
    CHECK(agree_true > 0);  // the sample exercises both outcomes
    CHECK(agree_true < 20);
  }

  SUBCASE("both sides with genuine parity conditions") {
    ParityTreeAutomaton infa = infinitely_often(ab, 0);
    ParityTreeAutomaton infb = infinitely_often(ab, 1);
    ParityTreeAutomaton both = intersect(infa, infb);
    CHECK(!pta_is_empty(both));
    auto w = pta_witness(both);
    REQUIRE(w.has_value());
    CHECK(pta_accepts(infa, *w));
    CHECK(pta_accepts(infb, *w));

    RegularTree alternating;
    alternating.alphabet = ab;
    alternating.add_node(0, 1, 1);
    alternating.add_node(1, 0, 0);
    CHECK(pta_accepts(both, alternating));
    RegularTree all_a;
    all_a.alphabet = ab;
    all_a.add_node(0, 0, 0);
    CHECK(!pta_accepts(both, all_a));

    // Infinitely many a's on every branch, but eventually only b: empty.
    CHECK(pta_is_empty(intersect(infa, eventually_constant(ab, 1))));
    // ... while eventually-constant-b alone intersected with constant-b isn't.
    CHECK(!pta_is_empty(intersect(eventually_constant(ab, 1), constant(ab, 1))));
  }

  SUBCASE("alphabet mismatch") {
    CHECK_THROWS_AS(intersect(universal(ab), universal({"a"})), std::invalid_argument);
  }
}

TEST_CASE("random pta sanity: empty iff no witness, witness always accepted") {
  std::mt19937 rng(321);
  std::vector<std::string> ab = {"a", "b"};
  int nonempty_seen = 0, empty_seen = 0;
  for (int round = 0; round < 200; ++round) {
    int n = 1 + (int)(rng() % 3);
    ParityTreeAutomaton a(ab, n);
    for (int q = 0; q < n; ++q) a.set_rank(q, (int)(rng() % 3));
    a.add_root((int)(rng() % n));
    int ntrans = (int)(rng() % (2 * n + 1));
    for (int i = 0; i < ntrans; ++i)
      a.add_transition((int)(rng() % n), (int)(rng() % 2), (int)(rng() % n), (int)(rng() % n));
    auto w = pta_witness(a);
    CHECK(pta_is_empty(a) == !w.has_value());
    if (w) {
      ++nonempty_seen;
      CHECK(pta_accepts(a, *w));
    } else {
      ++empty_seen;
    }
  }
  CHECK(nonempty_seen > 20);
  CHECK(empty_seen > 20);
}
