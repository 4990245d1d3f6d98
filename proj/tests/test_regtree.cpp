#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "ordalia/regtree.hpp"

using namespace ordalia;

namespace {

RegularDataTree one_state_tree(std::string letter, ExtValue v) {
  RegularDataTree t;
  t.alphabet = {std::move(letter)};
  t.registers = {"r"};
  t.state_names = {"s0"};
  t.root = 0;
  t.label = {0};
  t.regs = {{v}};
  t.left = {0};
  t.right = {0};
  t.astate = {0};
  return t;
}

Dfa dfa_of(const std::string& regex, const std::vector<std::string>& alphabet) {
  return determinize(parse_regex(regex, alphabet));
}

}  // namespace

TEST_CASE("validate flags structural defects") {
  RegularDataTree t = one_state_tree("a", ExtValue::of_int(0));
  CHECK(!t.validate());
  RegularDataTree bad = t;
  bad.left = {3};
  CHECK(bad.validate());
  bad = t;
  bad.regs = {{}};
  CHECK(bad.validate());
  bad = t;
  bad.root = 2;
  CHECK(bad.validate());
  bad = t;
  bad.label = {1};
  CHECK(bad.validate());
}

TEST_CASE("unfold_prefix shapes") {
  RegularDataTree t = one_state_tree("a", ExtValue::of_int(0));
  CHECK(unfold_prefix(t, 0) == std::vector<int>{0});
  CHECK(unfold_prefix(t, 2) == std::vector<int>(7, 0));

  // Alternating two-state tree.
  RegularDataTree alt = t;
  alt.state_names = {"s0", "s1"};
  alt.label = {0, 0};
  alt.regs = {{ExtValue::of_int(0)}, {ExtValue::of_int(1)}};
  alt.left = {1, 0};
  alt.right = {1, 0};
  alt.astate = {0, 0};
  CHECK(unfold_prefix(alt, 1) == std::vector<int>{0, 1, 1});
  CHECK(unfold_prefix(alt, 2) == std::vector<int>{0, 1, 1, 0, 0, 0, 0});
}

TEST_CASE("regular_extrema over language descendants") {
  // s0(a, 100) -> s1(b, 3) -> s2(b, 5) -> s3(b, 1) self-looping.
  RegularDataTree t;
  t.alphabet = {"a", "b"};
  t.registers = {"r"};
  t.state_names = {"s0", "s1", "s2", "s3"};
  t.root = 0;
  t.label = {0, 1, 1, 1};
  t.regs = {{ExtValue::of_int(100)},
            {ExtValue::of_int(3)},
            {ExtValue::of_int(5)},
            {ExtValue::of_int(1)}};
  t.left = {1, 2, 3, 3};
  t.right = {1, 2, 3, 3};
  t.astate = {0, 0, 0, 0};

  Dfa all_b = dfa_of("(a+b)*b", t.alphabet);
  // From s0: s1 is reached by word "a" (not in L); s2 by "ab", s3 by "abb...".
  auto [sup0, inf0] = regular_extrema(t, 0, 0, all_b);
  CHECK(sup0 == ExtValue::of_int(5));
  CHECK(inf0 == ExtValue::of_int(1));
  // From s1 the node itself (empty word) still does not count.
  auto [sup1, inf1] = regular_extrema(t, 1, 0, all_b);
  CHECK(sup1 == ExtValue::of_int(5));
  CHECK(inf1 == ExtValue::of_int(1));

  // Sigma* includes the node itself.
  Dfa all = dfa_of("(a+b)*", t.alphabet);
  auto [supa, infa] = regular_extrema(t, 0, 0, all);
  CHECK(supa == ExtValue::of_int(100));
  CHECK(infa == ExtValue::of_int(1));

  // The path word includes the start's label and excludes the target's:
  // L = {"a"} selects both children of an a-node whatever their labels.
  Dfa just_a = dfa_of("a", t.alphabet);
  auto [supja, infja] = regular_extrema(t, 0, 0, just_a);
  CHECK(supja == ExtValue::of_int(3));
  CHECK(infja == ExtValue::of_int(3));
  auto [supjb, infjb] = regular_extrema(t, 1, 0, just_a);
  CHECK(supjb.is_neg_inf());
  CHECK(infjb.is_pos_inf());

  // Unreachable language.
  Dfa none = dfa_of("empty", t.alphabet);
  auto [supn, infn] = regular_extrema(t, 0, 0, none);
  CHECK(supn.is_neg_inf());
  CHECK(infn.is_pos_inf());
}

TEST_CASE("regular_extrema matches a depth-12 unfolding") {
  std::mt19937 rng(20260814);
  std::vector<std::string> alphabet = {"a", "b"};
  const std::vector<std::string> pool = {"(a+b)*b", "b",     "a(a+b)*",
                                         "()",      "empty", "(a+b)(a+b)",
                                         "(ab)*",   "b*+ab"};
  for (int round = 0; round < 200; ++round) {
    int n = 1 + static_cast<int>(rng() % 3);
    RegularDataTree t;
    t.alphabet = alphabet;
    t.registers = {"r"};
    t.root = 0;
    for (int s = 0; s < n; ++s) {
      t.state_names.push_back("s" + std::to_string(s));
      t.label.push_back(static_cast<int>(rng() % 2));
      t.regs.push_back({ExtValue::of_int(static_cast<int>(rng() % 5))});
      t.left.push_back(static_cast<int>(rng() % n));
      t.right.push_back(static_cast<int>(rng() % n));
      t.astate.push_back(0);
    }
    Dfa dfa = dfa_of(pool[rng() % pool.size()], alphabet);

    int depth = 12;
    std::vector<int> pre = unfold_prefix(t, depth);
    // DFA state on arrival at each slot, stepping over the parent's label.
    std::vector<int> arrive(pre.size());
    arrive[0] = dfa.initial();
    bool any = false;
    ExtValue lo, hi;
    for (size_t i = 0; i < pre.size(); ++i) {
      if (i > 0) {
        size_t parent = (i - 1) / 2;
        arrive[i] = dfa.step(arrive[parent],
                             dfa.letter_index(alphabet[t.label[pre[parent]]]));
      }
      if (dfa.accepting(arrive[i])) {
        ExtValue v = t.regs[pre[i]][0];
        if (!any) {
          lo = hi = v;
          any = true;
        } else {
          lo = min_value(lo, v);
          hi = max_value(hi, v);
        }
      }
    }
    auto [sup, inf] = regular_extrema(t, t.root, 0, dfa);
    if (!any) {
      CHECK(sup.is_neg_inf());
      CHECK(inf.is_pos_inf());
    } else {
      CHECK(sup == hi);
      CHECK(inf == lo);
    }
  }
}

TEST_CASE("check_run on a plain register automaton") {
  TreeRegisterAutomaton a;
  a.alphabet = {"a"};
  a.states = {"q0"};
  a.registers = {"r"};
  a.roots = {0};
  a.rank = {0};
  TTerm self = TTerm::mk_reg(NodePos::Self, 0);
  a.delta = tf_and({tf_eq(self, TTerm::mk_reg(NodePos::Left, 0)),
                    tf_eq(self, TTerm::mk_reg(NodePos::Right, 0)),
                    tf_eq(self, TTerm::mk_const(ExtValue::of_int(0)))});

  RegularDataTree run = one_state_tree("a", ExtValue::of_int(0));
  CHECK(!check_run(a, run));

  RegularDataTree off = one_state_tree("a", ExtValue::of_int(1));
  auto err = check_run(a, off);
  REQUIRE(err);
  CHECK(err->find("transition formula") != std::string::npos);

  RegularDataTree unannotated = run;
  unannotated.astate = {-1};
  err = check_run(a, unannotated);
  REQUIRE(err);
  CHECK(err->find("annotation") != std::string::npos);

  TreeRegisterAutomaton rootless = a;
  rootless.roots = {};
  err = check_run(rootless, run);
  REQUIRE(err);
  CHECK(err->find("root") != std::string::npos);

  TreeRegisterAutomaton odd = a;
  odd.rank = {1};
  err = check_run(odd, run);
  REQUIRE(err);
  CHECK(err->find("odd rank") != std::string::npos);

  // Rank 1 is harmless when no cycle stays on it: alternate rank 1 / rank 2.
  TreeRegisterAutomaton alt = a;
  alt.states = {"q0", "q1"};
  alt.rank = {1, 2};
  alt.roots = {0};
  alt.delta = tf_and(
      {tf_eq(self, TTerm::mk_const(ExtValue::of_int(0))),
       tf_or({tf_and({tf_state(NodePos::Self, 0), tf_state(NodePos::Left, 1),
                      tf_state(NodePos::Right, 1)}),
              tf_and({tf_state(NodePos::Self, 1), tf_state(NodePos::Left, 0),
                      tf_state(NodePos::Right, 0)})})});
  RegularDataTree altrun = run;
  altrun.state_names = {"s0", "s1"};
  altrun.label = {0, 0};
  altrun.regs = {{ExtValue::of_int(0)}, {ExtValue::of_int(0)}};
  altrun.left = {1, 0};
  altrun.right = {1, 0};
  altrun.astate = {0, 1};
  CHECK(!check_run(alt, altrun));
}

TEST_CASE("check_run evaluates extremum terms") {
  Trasi a;
  a.alphabet = {"a"};
  a.states = {"q0"};
  a.registers = {"r", "s"};
  a.inputs = {0};
  a.languages = {parse_regex("a*", a.alphabet), parse_regex("a*", a.alphabet)};
  a.roots = {0};
  a.rank = {0};
  TTerm r = TTerm::mk_reg(NodePos::Self, 0);
  TTerm s = TTerm::mk_reg(NodePos::Self, 1);
  a.delta = tf_and({tf_eq(r, TTerm::mk_const(ExtValue::of_int(0))),
                    tf_eq(s, TTerm::mk_sup(NodePos::Self, 0))});

  RegularDataTree run = one_state_tree("a", ExtValue::of_int(0));
  run.registers = {"r", "s"};
  run.regs = {{ExtValue::of_int(0), ExtValue::of_int(0)}};
  CHECK(!check_run(a, run));

  RegularDataTree off = run;
  off.regs = {{ExtValue::of_int(0), ExtValue::of_int(1)}};
  auto err = check_run(a, off);
  REQUIRE(err);
  CHECK(err->find("transition formula") != std::string::npos);

  // sup over an unreachable language is -inf.
  Trasi empty_lang = a;
  empty_lang.languages[0] = parse_regex("empty", a.alphabet);
  empty_lang.delta = tf_and(
      {tf_eq(r, TTerm::mk_const(ExtValue::of_int(0))),
       tf_eq(TTerm::mk_sup(NodePos::Self, 0), TTerm::mk_const(ExtValue::neg_inf())),
       tf_eq(TTerm::mk_inf(NodePos::Self, 0), TTerm::mk_const(ExtValue::pos_inf()))});
  CHECK(!check_run(empty_lang, run));

  // Extrema of child positions look below the child only.
  Trasi child = a;
  child.languages = {parse_regex("a", a.alphabet), parse_regex("a", a.alphabet)};
  child.delta =
      tf_eq(TTerm::mk_sup(NodePos::Left, 0), TTerm::mk_reg(NodePos::Self, 0));
  CHECK(!check_run(child, run));
}

TEST_CASE("check_run catches mismatched shapes") {
  TreeRegisterAutomaton a;
  a.alphabet = {"a"};
  a.states = {"q0"};
  a.registers = {"r"};
  a.roots = {0};
  a.rank = {0};
  a.delta = tf_true();
  RegularDataTree t = one_state_tree("b", ExtValue::of_int(0));
  auto err = check_run(a, t);
  REQUIRE(err);
  CHECK(err->find("alphabet") != std::string::npos);
}
