#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "ordalia/regtree.hpp"
#include "ordalia/trasi.hpp"

using namespace ordalia;

namespace {

TTerm rg(NodePos p, int r) { return TTerm::mk_reg(p, r); }
TTerm sup(int r) { return TTerm::mk_sup(NodePos::Self, r); }
TTerm inf(int r) { return TTerm::mk_inf(NodePos::Self, r); }

TF iff(TF a, TF b) { return tf_and({tf_implies(a, b), tf_implies(b, a)}); }

// Strictly increasing register along every branch; no extremum terms, so the
// compilation passes it through unchanged.
Trasi example_increasing() {
  Trasi a;
  a.alphabet = {"a"};
  a.states = {"qT", "qF"};
  a.registers = {"r"};
  a.inputs = {0};
  a.languages = {parse_regex("a*", a.alphabet)};
  a.roots = {0};
  a.rank = {0, 1};
  TF cond_l = tf_and({tf_state(NodePos::Self, 0),
                      tf_lt(rg(NodePos::Self, 0), rg(NodePos::Left, 0))});
  TF cond_r = tf_and({tf_state(NodePos::Self, 0),
                      tf_lt(rg(NodePos::Self, 0), rg(NodePos::Right, 0))});
  a.delta = tf_and({iff(tf_state(NodePos::Left, 0), cond_l),
                    iff(tf_state(NodePos::Right, 0), cond_r)});
  return a;
}

// Every a-labeled node attains the supremum of its values reached along
// Sigma*b, i.e. of the children of b-nodes below it.
Trasi example_supremum() {
  Trasi a;
  a.alphabet = {"a", "b", "c"};
  a.states = {"qT", "qF"};
  a.registers = {"r"};
  a.inputs = {0};
  a.languages = {parse_regex("(a+b+c)*b", a.alphabet)};
  a.roots = {0};
  a.rank = {0, 1};
  TF ok = tf_or({tf_not(tf_label(NodePos::Self, 0)),
                 tf_eq(rg(NodePos::Self, 0), sup(0))});
  TF cond = tf_and({tf_state(NodePos::Self, 0), ok});
  a.delta = tf_and({iff(tf_state(NodePos::Left, 0), cond),
                    iff(tf_state(NodePos::Right, 0), cond)});
  return a;
}

// One unconstrained state over one letter; the formula is the test's choice.
Trasi one_state(std::vector<std::string> alphabet, std::vector<Nfa> langs,
                std::vector<std::string> regs, TF delta) {
  Trasi a;
  a.alphabet = std::move(alphabet);
  a.states = {"q"};
  a.registers = std::move(regs);
  a.languages = std::move(langs);
  a.roots = {0};
  a.rank = {0};
  a.delta = std::move(delta);
  return a;
}

bool has_cross_atom(const TF& f) {
  if (f->kind == TFormula::Kind::Cmp) {
    bool l = f->lhs.pos == NodePos::Left || f->rhs.pos == NodePos::Left;
    bool r = f->lhs.pos == NodePos::Right || f->rhs.pos == NodePos::Right;
    return l && r;
  }
  for (const auto& k : f->kids)
    if (has_cross_atom(k)) return true;
  return false;
}

int reg_index(const std::vector<std::string>& regs, const std::string& name) {
  auto it = std::find(regs.begin(), regs.end(), name);
  REQUIRE(it != regs.end());
  return (int)(it - regs.begin());
}

bool accepts_word(const Dfa& d, const std::string& word) {
  std::vector<int> w;
  for (char c : word) {
    int l = d.letter_index(std::string(1, c));
    REQUIRE(l >= 0);
    w.push_back(l);
  }
  return d.accepts(w);
}

std::vector<std::string> split_symbol(const std::string& s) {
  std::vector<std::string> parts;
  size_t at = 0;
  while (true) {
    size_t bar = s.find('|', at);
    if (bar == std::string::npos) {
      parts.push_back(s.substr(at));
      return parts;
    }
    parts.push_back(s.substr(at, bar - at));
    at = bar + 1;
  }
}

}  // namespace

TEST_CASE("normalize splits child-child comparisons") {
  std::vector<std::string> sigma = {"a"};
  Trasi a = one_state(sigma, {parse_regex("a*", sigma)}, {"r"},
                      tf_lt(rg(NodePos::Left, 0), rg(NodePos::Right, 0)));
  Trasi n = normalize(a);
  REQUIRE(n.registers.size() == 2);
  CHECK(n.registers[0] == "r");
  CHECK(n.languages.size() == 2);
  CHECK(!has_cross_atom(n.delta));
  CHECK(n.inputs == a.inputs);
  // The fresh register's language is {eps}.
  Dfa snap = determinize(n.languages[1]);
  CHECK(accepts_word(snap, ""));
  CHECK(!accepts_word(snap, "a"));

  // The snapshot register must mirror the left child's value; with it in
  // place the rewritten formula decides like the original.
  RegularDataTree t;
  t.alphabet = sigma;
  t.registers = n.registers;
  t.state_names = {"lo", "hi"};
  t.root = 0;
  t.label = {0, 0};
  t.left = {0, 0};
  t.right = {1, 1};
  t.astate = {0, 0};
  // Every node: left child 1, right child 2, so the original atom holds.
  t.regs = {{ExtValue::of_int(1), ExtValue::of_int(1)},
            {ExtValue::of_int(2), ExtValue::of_int(1)}};
  CHECK(!check_run(n, t));
  RegularDataTree bad = t;
  // Wrong snapshot: claims the left child holds 2.
  bad.regs[0][1] = ExtValue::of_int(2);
  CHECK(check_run(n, bad).has_value());
  RegularDataTree flipped = t;
  // Honest snapshot but the children violate the original comparison.
  flipped.left = {1, 1};
  flipped.right = {0, 0};
  flipped.regs = {{ExtValue::of_int(1), ExtValue::of_int(2)},
                  {ExtValue::of_int(2), ExtValue::of_int(2)}};
  CHECK(check_run(n, flipped).has_value());
}

TEST_CASE("language_close adds one register per missing residual") {
  std::vector<std::string> sigma = {"a", "b"};

  // Sigma* is its own single residual: nothing to add.
  Trasi full = one_state(sigma, {parse_regex("(a+b)*", sigma)}, {"r"}, tf_true());
  CHECK(language_close(full).registers == std::vector<std::string>{"r"});

  // Sigma*b has one extra residual, reached after a b.
  Trasi tail = one_state(sigma, {parse_regex("(a+b)*b", sigma)}, {"r"}, tf_true());
  Trasi tc = language_close(tail);
  CHECK(tc.registers == std::vector<std::string>{"r", "b.r"});
  Dfa br = determinize(tc.languages[1]);
  CHECK(accepts_word(br, ""));
  CHECK(accepts_word(br, "ab"));
  CHECK(!accepts_word(br, "a"));

  // {ab} decomposes into {b}, the empty language and {eps}.
  Trasi word = one_state(sigma, {parse_regex("ab", sigma)}, {"r"}, tf_true());
  Trasi wc = language_close(word);
  CHECK(wc.registers ==
        std::vector<std::string>{"r", "a.r", "b.r", "ab.r"});
  CHECK(accepts_word(determinize(wc.languages[1]), "b"));
  CHECK(language_empty(determinize(wc.languages[2])));
  CHECK(accepts_word(determinize(wc.languages[3]), ""));

  // Closing twice changes nothing.
  Trasi again = language_close(wc);
  CHECK(again.registers == wc.registers);
}

TEST_CASE("language_close aliases residuals to their base value") {
  std::vector<std::string> sigma = {"a", "b"};
  Trasi tail = one_state(sigma, {parse_regex("(a+b)*b", sigma)}, {"r"}, tf_true());
  Trasi tc = language_close(tail);
  REQUIRE(tc.registers.size() == 2);

  RegularDataTree t;
  t.alphabet = sigma;
  t.registers = tc.registers;
  t.state_names = {"s"};
  t.root = 0;
  t.label = {0};
  t.left = {0};
  t.right = {0};
  t.astate = {0};
  t.regs = {{ExtValue::of_int(7), ExtValue::of_int(7)}};
  CHECK(!check_run(tc, t));
  t.regs[0][1] = ExtValue::of_int(8);
  CHECK(check_run(tc, t).has_value());
}

TEST_CASE("language_close keeps register families apart") {
  // s's language happens to equal r's b-residual; the closure must still add
  // a residual register aliased to r rather than borrow s, and s grows its
  // own family.
  std::vector<std::string> sigma = {"a", "b"};
  Trasi a = one_state(
      sigma,
      {parse_regex("(a+b)*b", sigma), parse_regex("(a+b)*b+eps", sigma)},
      {"r", "s"}, tf_true());
  Trasi c = language_close(a);
  CHECK(c.registers == std::vector<std::string>{"r", "s", "b.r", "a.s"});

  auto rm = closure_map(c);
  REQUIRE(rm.size() == 4);
  // r's accepting residual resolves to b.r, not to the equal-language s.
  const Dfa& dr = rm[0].dfa;
  for (int q = 0; q < dr.nstates(); ++q)
    CHECK(rm[0].reg_of_state[q] == (dr.accepting(q) ? 2 : 0));
  const Dfa& ds = rm[1].dfa;
  for (int q = 0; q < ds.nstates(); ++q)
    CHECK(rm[1].reg_of_state[q] == (ds.accepting(q) ? 1 : 3));
}

TEST_CASE("closure_map resolves states by language and flags gaps") {
  std::vector<std::string> sigma = {"a", "b"};
  Trasi tail = one_state(sigma, {parse_regex("(a+b)*b", sigma)}, {"r"}, tf_true());
  Trasi tc = language_close(tail);
  auto rm = closure_map(tc);
  REQUIRE(rm.size() == 2);
  for (size_t j = 0; j < rm.size(); ++j) {
    REQUIRE(rm[j].reg_of_state.size() == (size_t)rm[j].dfa.nstates());
    for (int q = 0; q < rm[j].dfa.nstates(); ++q) {
      int k = rm[j].reg_of_state[q];
      CHECK(language_equivalent(rm[j].dfa.with_initial(q),
                                determinize(tc.languages[k])));
    }
  }

  // The unclosed original has a missing residual.
  CHECK_THROWS_AS((void)closure_map(tail), std::invalid_argument);
}

TEST_CASE("extended register indexing") {
  std::vector<std::string> sigma = {"a", "b"};
  Trasi tail = one_state(sigma, {parse_regex("(a+b)*b", sigma)}, {"r"}, tf_true());
  Trasi tc = language_close(tail);
  CHECK(sup_reg(tc, 0) == 2);
  CHECK(sup_reg(tc, 1) == 3);
  CHECK(inf_reg(tc, 0) == 4);
  CHECK(inf_reg(tc, 1) == 5);
  CHECK(extended_register_names(tc) ==
        std::vector<std::string>{"r", "b.r", "r.sup", "b.r.sup", "r.inf",
                                 "b.r.inf"});
  CHECK_THROWS_AS(sup_reg(tc, 2), std::invalid_argument);
}

TEST_CASE("extrema consistency constraints agree with the semantic extrema") {
  std::vector<std::string> sigma = {"a", "b"};
  Trasi tail = one_state(sigma, {parse_regex("(a+b)*b", sigma)}, {"r"}, tf_true());
  Trasi tc = language_close(tail);
  TF cc = extrema_consistency_constraints(tc);

  TreeRegisterAutomaton checker;
  checker.alphabet = sigma;
  checker.states = {"q"};
  checker.registers = extended_register_names(tc);
  checker.roots = {0};
  checker.rank = {0};
  checker.delta = cc;

  // A small mixed-label cycle; residual copies mirror the base as a real run
  // would, extrema cells filled from the semantic oracle.
  RegularDataTree t;
  t.alphabet = sigma;
  t.registers = checker.registers;
  t.state_names = {"s0", "s1", "s2"};
  t.root = 0;
  t.label = {0, 1, 0};
  t.left = {1, 2, 0};
  t.right = {2, 0, 1};
  t.astate = {0, 0, 0};
  std::vector<long long> base = {10, 3, 7};
  Dfa dr = determinize(tc.languages[0]);
  Dfa dbr = determinize(tc.languages[1]);
  t.regs.resize(3);
  for (int s = 0; s < 3; ++s) {
    ExtValue v = ExtValue::of_int(base[s]);
    t.regs[s] = {v, v, v, v, v, v};
  }
  for (int s = 0; s < 3; ++s) {
    auto [sup_r, inf_r] = regular_extrema(t, s, 0, dr);
    auto [sup_b, inf_b] = regular_extrema(t, s, 1, dbr);
    t.regs[s][2] = sup_r;
    t.regs[s][3] = sup_b;
    t.regs[s][4] = inf_r;
    t.regs[s][5] = inf_b;
  }
  CHECK(!check_run(checker, t));

  for (int s = 0; s < 3; ++s)
    for (int cell = 2; cell < 6; ++cell) {
      RegularDataTree bad = t;
      bad.regs[s][cell] = ExtValue::of_int(1000 + s);
      CHECK(check_run(checker, bad).has_value());
    }
}

TEST_CASE("extrema consistency pins empty languages") {
  std::vector<std::string> sigma = {"a"};
  Trasi none = one_state(sigma, {parse_regex("empty", sigma)}, {"r"}, tf_true());
  TF cc = extrema_consistency_constraints(none);

  TreeRegisterAutomaton checker;
  checker.alphabet = sigma;
  checker.states = {"q"};
  checker.registers = extended_register_names(none);
  checker.roots = {0};
  checker.rank = {0};
  checker.delta = cc;

  RegularDataTree t;
  t.alphabet = sigma;
  t.registers = checker.registers;
  t.state_names = {"s"};
  t.root = 0;
  t.label = {0};
  t.left = {0};
  t.right = {0};
  t.astate = {0};
  t.regs = {{ExtValue::of_int(4), ExtValue::neg_inf(), ExtValue::pos_inf()}};
  CHECK(!check_run(checker, t));
  t.regs[0][1] = ExtValue::of_int(4);
  CHECK(check_run(checker, t).has_value());
}

TEST_CASE("certificate alphabet layout") {
  CertAlphabet two = make_cert_alphabet({{"a", "b"}, {"-", "X"}});
  REQUIRE(two.symbols.size() == 4);
  CHECK(two.symbols[0] == "a|-");
  CHECK(two.symbols[1] == "a|X");
  CHECK(two.symbols[2] == "b|-");
  CHECK(two.symbols[3] == "b|X");
  CHECK(two.index({1, 0}) == 2);
  CHECK(two.decode(3) == std::vector<int>{1, 1});
  CHECK_THROWS_AS(two.index({2, 0}), std::invalid_argument);
  CHECK_THROWS_AS(two.decode(4), std::invalid_argument);
  CHECK_THROWS_AS(make_cert_alphabet({{}}), std::invalid_argument);

  std::vector<std::string> sigma = {"a", "b"};
  Trasi tc = language_close(
      one_state(sigma, {parse_regex("(a+b)*b", sigma)}, {"r"}, tf_true()));
  CertAlphabet ca = certificate_alphabet(tc);
  REQUIRE(ca.component_values.size() == 4);
  CHECK(ca.component_values[0] == sigma);
  CHECK(ca.component_values[1] == std::vector<std::string>{"-", "X"});
  CHECK(ca.component_values[2] ==
        std::vector<std::string>{"r+0", "r+1", "r-0", "r-1", "b.r+0", "b.r+1",
                                 "b.r-0", "b.r-1"});
  CHECK(ca.component_values[3] ==
        std::vector<std::string>{"r+", "r-", "b.r+", "b.r-"});
  CHECK(ca.symbols.size() == 2u * 2 * 8 * 4);
}

TEST_CASE("certificate automaton shape for one full register") {
  std::vector<std::string> sigma = {"a"};
  Trasi full = one_state(sigma, {parse_regex("a*", sigma)}, {"r"}, tf_true());
  TreeRegisterAutomaton b = certificate_automaton(full);
  CHECK(b.registers == std::vector<std::string>{"r", "r.sup", "r.inf", "t"});
  CHECK(b.alphabet.size() == 1u * 2 * 2 * 2);
  REQUIRE(b.states == std::vector<std::string>{"n-c2T0", "nXc2T0", "rXc2T0"});
  CHECK(b.rank == std::vector<int>{1, 2, 2});
  CHECK(b.roots == std::vector<int>{2});
}

namespace {

// A uniform every-node-starts-a-path certificate over two full registers:
// period-four label cycle r+0, r-0, s+0, s-0 with the matching witness
// labels; register values constant per column.
RegularDataTree uniform_certificate(const TreeRegisterAutomaton& b,
                                    long long rv, long long sv,
                                    long long rsup) {
  const std::vector<std::string> kappas = {"r+0", "r-0", "s+0", "s-0"};
  const std::vector<std::string> lams = {"r+", "r-", "s+", "s-"};
  RegularDataTree t;
  t.alphabet = b.alphabet;
  t.registers = b.registers;
  t.root = 0;
  auto sym = [&](const std::string& name) {
    auto it = std::find(b.alphabet.begin(), b.alphabet.end(), name);
    REQUIRE(it != b.alphabet.end());
    return (int)(it - b.alphabet.begin());
  };
  int root_state = reg_index(b.states, "rXc2T0");
  int inner_state = reg_index(b.states, "nXc2T0");
  // States 1..4 carry kappa 0..3; the root duplicates kappa 0.  Children
  // always advance the cycle since every node starts a path.
  for (int i = 0; i < 5; ++i) {
    int kap = i == 0 ? 0 : i - 1;
    t.state_names.push_back("p" + std::to_string(i));
    t.label.push_back(sym("a|X|" + kappas[kap] + "|" + lams[kap]));
    int next = (kap + 1) % 4 + 1;
    t.left.push_back(next);
    t.right.push_back(next);
    t.astate.push_back(i == 0 ? root_state : inner_state);
    // r, s, r.sup, s.sup, r.inf, s.inf, t
    long long tv = kap < 2 ? rv : sv;
    t.regs.push_back({ExtValue::of_int(rv), ExtValue::of_int(sv),
                      ExtValue::of_int(rsup), ExtValue::of_int(sv),
                      ExtValue::of_int(rv), ExtValue::of_int(sv),
                      ExtValue::of_int(tv)});
  }
  return t;
}

}  // namespace

TEST_CASE("certificate automaton accepts attained extrema and rejects lies") {
  std::vector<std::string> sigma = {"a"};
  Trasi two = one_state(
      sigma, {parse_regex("a*", sigma), parse_regex("a*", sigma)}, {"r", "s"},
      tf_true());
  TreeRegisterAutomaton b = certificate_automaton(two);
  CHECK(b.registers ==
        std::vector<std::string>{"r", "s", "r.sup", "s.sup", "r.inf", "s.inf",
                                 "t"});
  CHECK(b.alphabet.size() == 1u * 2 * 4 * 4);

  // All extrema attained by the constant columns: a valid certificate.
  RegularDataTree good = uniform_certificate(b, 8, 20, 8);
  REQUIRE(good.validate() == std::nullopt);
  CHECK(!check_run(b, good));

  // Claiming sup r = 10 over constant 8s leaves the half-open gap [8, 10)
  // inhabited by r itself, and by s = 9 besides.
  RegularDataTree lie = uniform_certificate(b, 8, 9, 10);
  CHECK(check_run(b, lie).has_value());
}

TEST_CASE("certificate automaton enforces target constancy along parts") {
  std::vector<std::string> sigma = {"a"};
  Trasi two = one_state(
      sigma, {parse_regex("a*", sigma), parse_regex("a*", sigma)}, {"r", "s"},
      tf_true());
  TreeRegisterAutomaton b = certificate_automaton(two);
  const std::vector<std::string> kappas = {"r+0", "r-0", "s+0", "s-0"};
  const std::vector<std::string> lams = {"r+", "r-", "s+", "s-"};

  // Two-node parts: a path start plus its left child; the right child starts
  // the next path.  kappa advances on X nodes only.
  RegularDataTree t;
  t.alphabet = b.alphabet;
  t.registers = b.registers;
  t.root = 0;
  auto sym = [&](const std::string& name) {
    auto it = std::find(b.alphabet.begin(), b.alphabet.end(), name);
    REQUIRE(it != b.alphabet.end());
    return (int)(it - b.alphabet.begin());
  };
  int root_state = reg_index(b.states, "rXc2T0");
  int x_state = reg_index(b.states, "nXc2T0");
  int pass_state = reg_index(b.states, "n-c2T0");
  long long rv = 4, sv = 6;
  auto values = [&](int kap) {
    long long tv = kap < 2 ? rv : sv;
    return std::vector<ExtValue>{ExtValue::of_int(rv), ExtValue::of_int(sv),
                                 ExtValue::of_int(rv), ExtValue::of_int(sv),
                                 ExtValue::of_int(rv), ExtValue::of_int(sv),
                                 ExtValue::of_int(tv)};
  };
  // Part i = X node 2i with its non-X continuation 2i+1; the continuation's
  // children both start part i+1, the X node keeps its part alive on the
  // left and spawns part i+1 on the right.  State 8 closes the kappa cycle.
  auto add = [&](const std::string& nm, bool x, int kap, int l, int r,
                 int astate) {
    t.state_names.push_back(nm);
    t.label.push_back(
        sym("a|" + std::string(x ? "X" : "-") + "|" + kappas[kap] + "|" +
            lams[kap]));
    t.regs.push_back(values(kap));
    t.left.push_back(l);
    t.right.push_back(r);
    t.astate.push_back(astate);
  };
  add("root", true, 0, 1, 2, root_state);
  add("c0", false, 0, 2, 2, pass_state);
  add("x1", true, 1, 3, 4, x_state);
  add("c1", false, 1, 4, 4, pass_state);
  add("x2", true, 2, 5, 6, x_state);
  add("c2", false, 2, 6, 6, pass_state);
  add("x3", true, 3, 7, 8, x_state);
  add("c3", false, 3, 8, 8, pass_state);
  add("x0", true, 0, 1, 2, x_state);

  REQUIRE(t.validate() == std::nullopt);
  CHECK(!check_run(b, t));

  // A non-start node whose target departs from its parent's is rejected.
  RegularDataTree drift = t;
  drift.regs[1][6] = ExtValue::of_int(99);
  CHECK(check_run(b, drift).has_value());

  // A non-start node relabeled as advancing kappa is rejected.
  RegularDataTree skip = t;
  skip.label[1] = sym("a|-|" + kappas[1] + "|" + lams[1]);
  CHECK(check_run(b, skip).has_value());
}

TEST_CASE("to_tra passes extremum-free automata through") {
  Trasi a = example_increasing();
  TreeRegisterAutomaton p = to_tra(a);
  CHECK(p.alphabet == a.alphabet);
  CHECK(p.states == a.states);
  CHECK(p.registers == a.registers);
  CHECK(p.roots == a.roots);
  CHECK(p.rank == a.rank);

  CHECK(!trasi_is_empty(a));
  auto w = trasi_witness(a);
  REQUIRE(w.has_value());
  CHECK(!check_witness(*w, p));
  // Only the all-accepting state appears.
  for (int q : w->states) CHECK(q == 0);
  // Realized register values strictly increase along both edges.
  auto vals = realize_prefix(*w, p, 3);
  REQUIRE(vals.size() >= 7);
  for (size_t i = 0; 2 * i + 2 < vals.size(); ++i) {
    CHECK(vals[i][0] < vals[2 * i + 1][0]);
    CHECK(vals[i][0] < vals[2 * i + 2][0]);
  }
}

TEST_CASE("to_tra composes the supremum example") {
  Trasi b = example_supremum();
  TreeRegisterAutomaton p = to_tra(b);
  CHECK(p.registers ==
        std::vector<std::string>{"r", "r.sup", "b.r.sup", "t"});
  // Base letters, start flag, four kappa labels, two witness labels.
  CHECK(p.alphabet.size() == 3u * 2 * 4 * 2);
  CHECK(split_symbol(p.alphabet[0]) ==
        std::vector<std::string>{"a", "-", "r+0", "r+"});
  REQUIRE(p.roots.size() == 1);
  CHECK(p.states[p.roots[0]].substr(0, 5) == "qT|rX");

  // The composition is nonempty, and the witness survives revalidation.
  auto w = tra_witness(p);
  REQUIRE(w.has_value());
  CHECK(!check_witness(*w, p));

  // kappa labels advance exactly at path starts, cyclically.
  const std::vector<std::string> kappas = {"r+0", "r+1", "b.r+0", "b.r+1"};
  auto comp = [&](int node, int at) {
    const NodeType& ty = w->alphabet.types[w->types.letter[node]];
    return split_symbol(p.alphabet[ty.label[0]])[at];
  };
  int root = w->types.root;
  CHECK(comp(root, 1) == "X");
  CHECK(comp(root, 2) == kappas[0]);
  std::set<int> seen;
  std::vector<int> frontier = {root};
  while (!frontier.empty()) {
    int n = frontier.back();
    frontier.pop_back();
    if (!seen.insert(n).second) continue;
    auto idx = [&](const std::string& k) {
      return (int)(std::find(kappas.begin(), kappas.end(), k) -
                   kappas.begin());
    };
    int here = idx(comp(n, 2));
    REQUIRE(here < 4);
    for (int c : {w->types.left[n], w->types.right[n]}) {
      int there = idx(comp(c, 2));
      REQUIRE(there < 4);
      if (comp(c, 1) == "X")
        CHECK(there == (here + 1) % 4);
      else
        CHECK(there == here);
      frontier.push_back(c);
    }
  }
}

TEST_CASE("to_tra accepts trees avoiding the guarded label entirely") {
  // All-c trees satisfy the supremum example vacuously: the closed automaton
  // must not force a b-descendant into existence.
  Trasi b = example_supremum();
  RegularDataTree t;
  t.alphabet = b.alphabet;
  t.registers = {"r"};
  t.state_names = {"s"};
  t.root = 0;
  t.label = {2};
  t.left = {0};
  t.right = {0};
  t.astate = {0};
  t.regs = {{ExtValue::of_int(5)}};
  CHECK(!check_run(b, t));

  // An a-node whose value misses the supremum of its b-reached values.
  RegularDataTree miss;
  miss.alphabet = b.alphabet;
  miss.registers = {"r"};
  miss.state_names = {"top", "bee", "low"};
  miss.root = 0;
  miss.label = {0, 1, 2};
  miss.left = {1, 2, 2};
  miss.right = {1, 2, 2};
  miss.astate = {0, 0, 0};
  miss.regs = {{ExtValue::of_int(5)},
               {ExtValue::of_int(2)},
               {ExtValue::of_int(3)}};
  CHECK(check_run(b, miss).has_value());
  // Matching the supremum (attained by the b-node's children) repairs it.
  miss.regs[0][0] = ExtValue::of_int(3);
  CHECK(!check_run(b, miss));
}

TEST_CASE("to_tra separates increasing from decreasing supremum constraints") {
  std::vector<std::string> sigma = {"a"};
  auto lang = [&] { return parse_regex("a*", sigma); };
  TF strict_sup = tf_lt(rg(NodePos::Self, 0), sup(0));

  // Strictly decreasing values cannot exceed their own supremum.
  Trasi dec = one_state(
      sigma, {lang()}, {"r"},
      tf_and({strict_sup, tf_lt(rg(NodePos::Left, 0), rg(NodePos::Self, 0)),
              tf_lt(rg(NodePos::Right, 0), rg(NodePos::Self, 0))}));
  CHECK(trasi_is_empty(dec));

  // Strictly increasing values approach a bound they never attain.
  Trasi inc = one_state(
      sigma, {lang()}, {"r"},
      tf_and({strict_sup, tf_lt(rg(NodePos::Self, 0), rg(NodePos::Left, 0)),
              tf_lt(rg(NodePos::Self, 0), rg(NodePos::Right, 0))}));
  CHECK(!trasi_is_empty(inc));

  // Contradictory bounds around the supremum.
  Trasi contra = one_state(sigma, {lang()}, {"r"},
                           tf_and({strict_sup, tf_lt(sup(0), rg(NodePos::Self, 0))}));
  CHECK(trasi_is_empty(contra));
}

TEST_CASE("to_tra handles attained extrema") {
  std::vector<std::string> sigma = {"a"};
  auto lang = [&] { return parse_regex("a*", sigma); };
  Trasi max_here = one_state(
      sigma, {lang()}, {"r"},
      tf_and({tf_eq(rg(NodePos::Self, 0), sup(0)),
              tf_lt(rg(NodePos::Left, 0), rg(NodePos::Self, 0)),
              tf_lt(rg(NodePos::Right, 0), rg(NodePos::Self, 0))}));
  CHECK(!trasi_is_empty(max_here));

  Trasi min_here = one_state(
      sigma, {lang()}, {"r"},
      tf_and({tf_eq(rg(NodePos::Self, 0), inf(0)),
              tf_lt(rg(NodePos::Self, 0), rg(NodePos::Left, 0)),
              tf_lt(rg(NodePos::Self, 0), rg(NodePos::Right, 0))}));
  CHECK(!trasi_is_empty(min_here));
}

TEST_CASE("to_tra with empty-language registers") {
  std::vector<std::string> sigma = {"a"};
  // The supremum over no descendants is -inf: comparing it with itself is
  // vacuous, equating the register with it is impossible.
  Trasi vac = one_state(sigma, {parse_regex("empty", sigma)}, {"r"},
                        tf_eq(sup(0), sup(0)));
  CHECK(!trasi_is_empty(vac));
  Trasi pin = one_state(sigma, {parse_regex("empty", sigma)}, {"r"},
                        tf_eq(rg(NodePos::Self, 0), sup(0)));
  CHECK(trasi_is_empty(pin));
}

TEST_CASE("to_tra normalizes child-child atoms before closing") {
  std::vector<std::string> sigma = {"a"};
  Trasi a = one_state(
      sigma, {parse_regex("a*", sigma)}, {"r"},
      tf_and({tf_eq(rg(NodePos::Left, 0), rg(NodePos::Right, 0)),
              tf_eq(rg(NodePos::Self, 0), sup(0))}));
  TreeRegisterAutomaton p = to_tra(a);
  CHECK(std::find(p.registers.begin(), p.registers.end(), "w0") !=
        p.registers.end());
  CHECK(std::find(p.registers.begin(), p.registers.end(), "r.sup") !=
        p.registers.end());
  CHECK(!tra_is_empty(p));
}

TEST_CASE("weak diversity constraints") {
  CertAlphabet alph =
      make_cert_alphabet({{"a"}, kDiversityTags, kDiversityTags});
  TF wd = weak_diversity_constraints(alph, {1, 2}, {"r0", "r1"}, 0);
  TreeRegisterAutomaton d;
  d.alphabet = alph.symbols;
  d.states = {"q"};
  d.registers = {"r0", "r1"};
  d.roots = {0};
  d.rank = {0};
  d.delta = wd;

  // A constant input register cannot be tagged: the input is pinned to
  // source S, and an edge equality then demands a subtree tag.
  for (int t0 = 0; t0 < 4; ++t0)
    for (int t1 = 0; t1 < 4; ++t1) {
      RegularDataTree t;
      t.alphabet = d.alphabet;
      t.registers = d.registers;
      t.state_names = {"s"};
      t.root = 0;
      t.label = {alph.index({0, t0, t1})};
      t.left = {0};
      t.right = {0};
      t.astate = {0};
      t.regs = {{ExtValue::of_int(1), ExtValue::of_int(2)}};
      CHECK(check_run(d, t).has_value());
    }

  // A constant non-input register is taggable exactly one way: from above.
  int accepted = 0, accepted_tag = -1;
  for (int t1a = 0; t1a < 4; ++t1a)
    for (int t1b = 0; t1b < 4; ++t1b) {
      RegularDataTree t;
      t.alphabet = d.alphabet;
      t.registers = d.registers;
      t.state_names = {"even", "odd"};
      t.root = 0;
      t.label = {alph.index({0, 0, t1a}), alph.index({0, 0, t1b})};
      t.left = {1, 0};
      t.right = {1, 0};
      t.astate = {0, 0};
      t.regs = {{ExtValue::of_int(1), ExtValue::of_int(7)},
                {ExtValue::of_int(2), ExtValue::of_int(7)}};
      if (!check_run(d, t)) {
        ++accepted;
        accepted_tag = t1a * 4 + t1b;
      }
    }
  CHECK(accepted == 1);
  CHECK(accepted_tag == 1 * 4 + 1);  // "^" at both states

  // r1 mirroring the parent's input: every labeling forcing anything but a
  // uniform from-above tag for r1 fails; the input itself stays S.
  int hits = 0;
  for (int l0 = 0; l0 < 16; ++l0)
    for (int l1 = 0; l1 < 16; ++l1)
      for (int l2 = 0; l2 < 16; ++l2) {
        RegularDataTree t;
        t.alphabet = d.alphabet;
        t.registers = d.registers;
        t.state_names = {"s0", "s1", "s2"};
        t.root = 0;
        t.label = {alph.index({0, l0 / 4, l0 % 4}),
                   alph.index({0, l1 / 4, l1 % 4}),
                   alph.index({0, l2 / 4, l2 % 4})};
        t.left = {1, 2, 0};
        t.right = {1, 2, 0};
        t.astate = {0, 0, 0};
        t.regs = {{ExtValue::of_int(1), ExtValue::of_int(3)},
                  {ExtValue::of_int(2), ExtValue::of_int(1)},
                  {ExtValue::of_int(3), ExtValue::of_int(2)}};
        if (!check_run(d, t)) ++hits;
      }
  // S for the input, ^ for the mirror, at all three states.
  CHECK(hits == 1);
}
