#include "ordalia/trasi.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <utility>

#include "tra_internal.hpp"

namespace ordalia {

namespace {

void validate_term(const TTerm& t, const Trasi& a) {
  if (t.kind == TTerm::Kind::Const) return;
  if (t.reg < 0 || t.reg >= (int)a.registers.size())
    throw std::invalid_argument("register index out of range in transition formula");
  if (t.kind != TTerm::Kind::Reg && t.pos != NodePos::Self)
    throw std::invalid_argument("extremum terms refer to the current node only");
}

void validate_formula(const TF& f, const Trasi& a) {
  switch (f->kind) {
    case TFormula::Kind::Label:
      if (f->idx < 0 || f->idx >= (int)a.alphabet.size())
        throw std::invalid_argument("label index out of range");
      return;
    case TFormula::Kind::State:
      if (f->idx < 0 || f->idx >= (int)a.states.size())
        throw std::invalid_argument("state index out of range");
      return;
    case TFormula::Kind::Cmp:
      validate_term(f->lhs, a);
      validate_term(f->rhs, a);
      return;
    default:
      for (const auto& k : f->kids) validate_formula(k, a);
      return;
  }
}

void validate_trasi(const Trasi& a) {
  if (a.alphabet.empty()) throw std::invalid_argument("empty alphabet");
  if (a.states.empty()) throw std::invalid_argument("no states");
  if (a.rank.size() != a.states.size())
    throw std::invalid_argument("rank size mismatch");
  for (int r : a.rank)
    if (r < 0) throw std::invalid_argument("negative rank");
  for (int q : a.roots)
    if (q < 0 || q >= (int)a.states.size())
      throw std::invalid_argument("root state out of range");
  if (a.languages.size() != a.registers.size())
    throw std::invalid_argument("one language per register required");
  for (int i : a.inputs)
    if (i < 0 || i >= (int)a.registers.size())
      throw std::invalid_argument("input register out of range");
  for (size_t i = 0; i < a.registers.size(); ++i) {
    if (a.registers[i].empty()) throw std::invalid_argument("empty register name");
    if (a.languages[i].alphabet != a.alphabet)
      throw std::invalid_argument("register language over a different alphabet");
    for (size_t j = i + 1; j < a.registers.size(); ++j)
      if (a.registers[i] == a.registers[j])
        throw std::invalid_argument("duplicate register name");
  }
  validate_formula(a.delta, a);
}

std::string fresh_name(const std::vector<std::string>& taken, std::string want) {
  while (std::find(taken.begin(), taken.end(), want) != taken.end()) want += "'";
  return want;
}

Nfa dfa_as_nfa(const Dfa& d, int initial) {
  Nfa n;
  n.alphabet = d.alphabet();
  for (int q = 0; q < d.nstates(); ++q) n.add_state();
  n.initials = {initial};
  for (int q = 0; q < d.nstates(); ++q) {
    n.accepting[q] = d.accepting(q);
    for (int l = 0; l < d.nletters(); ++l) n.add_arc(q, l, d.step(q, l));
  }
  return n;
}

// Shortest access word per state, breadth-first with letters in declared
// order; the word strings name the residual registers.
std::vector<std::string> access_words(const Dfa& d) {
  std::vector<std::string> words(d.nstates());
  std::vector<bool> seen(d.nstates(), false);
  std::queue<int> bfs;
  seen[d.initial()] = true;
  bfs.push(d.initial());
  while (!bfs.empty()) {
    int u = bfs.front();
    bfs.pop();
    for (int l = 0; l < d.nletters(); ++l) {
      int v = d.step(u, l);
      if (seen[v]) continue;
      seen[v] = true;
      words[v] = words[u] + d.alphabet()[l];
      bfs.push(v);
    }
  }
  return words;
}

// Merge language-equivalent states and renumber breadth-first.  Residual
// registers, tape counts and copy-tracking all key on dfa states standing in
// bijection with residual languages, so every determinization below goes
// through here.
Dfa minimal_dfa(const Dfa& d) {
  int n = d.nstates();
  std::vector<int> cls(n, -1);
  std::vector<int> reps;
  for (int q = 0; q < n; ++q) {
    for (size_t c = 0; c < reps.size() && cls[q] < 0; ++c)
      if (language_equivalent(d.with_initial(q), d.with_initial(reps[c])))
        cls[q] = (int)c;
    if (cls[q] < 0) {
      cls[q] = (int)reps.size();
      reps.push_back(q);
    }
  }
  std::vector<int> renum(reps.size(), -1);
  std::vector<int> order;
  renum[cls[d.initial()]] = 0;
  order.push_back(cls[d.initial()]);
  for (size_t h = 0; h < order.size(); ++h)
    for (int l = 0; l < d.nletters(); ++l) {
      int t = cls[d.step(reps[order[h]], l)];
      if (renum[t] < 0) {
        renum[t] = (int)order.size();
        order.push_back(t);
      }
    }
  int m = (int)order.size();
  std::vector<int> delta(m * d.nletters());
  std::vector<bool> acc(m);
  for (int c : order) {
    acc[renum[c]] = d.accepting(reps[c]);
    for (int l = 0; l < d.nletters(); ++l)
      delta[renum[c] * d.nletters() + l] = renum[cls[d.step(reps[c], l)]];
  }
  return Dfa(d.alphabet(), m, 0, std::move(delta), std::move(acc));
}

// The register's family base: registers named `word.base` belong to the
// family of `base` when such a register exists; everything else is its own
// base.  language_close names its additions this way, so closure maps can be
// rebuilt from a closed automaton alone.
std::vector<int> family_bases(const Trasi& a) {
  std::vector<int> base(a.registers.size());
  for (size_t i = 0; i < a.registers.size(); ++i) {
    base[i] = (int)i;
    auto dot = a.registers[i].find('.');
    if (dot == std::string::npos) continue;
    std::string suffix = a.registers[i].substr(dot + 1);
    for (size_t k = 0; k < a.registers.size(); ++k)
      if (a.registers[k] == suffix) {
        base[i] = (int)k;
        break;
      }
  }
  return base;
}

Trasi close_impl(const Trasi& a, std::vector<int>* base_out) {
  validate_trasi(a);
  Trasi out = a;
  int n0 = (int)a.registers.size();
  std::vector<int> base_of = family_bases(a);
  std::vector<Dfa> dets;
  dets.reserve(n0);
  for (int i = 0; i < n0; ++i)
    dets.push_back(minimal_dfa(determinize(a.languages[i])));
  std::vector<TF> conj{a.delta};
  for (int i = 0; i < n0; ++i) {
    const Dfa d = dets[i];
    auto words = access_words(d);
    for (int q = 0; q < d.nstates(); ++q) {
      Dfa dq = d.with_initial(q);
      bool found = false;
      for (size_t k = 0; k < out.registers.size() && !found; ++k)
        if (base_of[k] == base_of[i] && language_equivalent(dq, dets[k]))
          found = true;
      if (found) continue;
      std::string name =
          fresh_name(out.registers, words[q] + "." + out.registers[i]);
      out.registers.push_back(name);
      out.languages.push_back(dfa_as_nfa(d, q));
      base_of.push_back(base_of[i]);
      dets.push_back(dq);
      int idx = (int)out.registers.size() - 1;
      conj.push_back(tf_eq(TTerm::mk_reg(NodePos::Self, idx),
                           TTerm::mk_reg(NodePos::Self, base_of[i])));
    }
  }
  if (conj.size() > 1) out.delta = tf_and(std::move(conj));
  if (base_out) *base_out = base_of;
  return out;
}

std::vector<ResidualMap> family_maps(const Trasi& c,
                                     const std::vector<int>& base_of) {
  std::vector<Dfa> dets;
  dets.reserve(c.registers.size());
  for (const auto& l : c.languages)
    dets.push_back(minimal_dfa(determinize(l)));
  std::vector<ResidualMap> out;
  for (size_t j = 0; j < c.registers.size(); ++j) {
    ResidualMap m{dets[j], {}};
    for (int q = 0; q < dets[j].nstates(); ++q) {
      int hit = -1;
      for (size_t k = 0; k < c.registers.size() && hit < 0; ++k)
        if (base_of[k] == base_of[j] &&
            language_equivalent(dets[j].with_initial(q), dets[k]))
          hit = (int)k;
      if (hit < 0)
        throw std::invalid_argument(
            "missing residual register: automaton is not language-closed");
      m.reg_of_state.push_back(hit);
    }
    out.push_back(std::move(m));
  }
  return out;
}

// Whether some labeling of a full binary tree avoids every accepting arrival
// of the language automaton, i.e. whether a node can have no L-descendant at
// all.  Greatest fixpoint of "non-accepting and some letter stays inside".
bool possibly_empty_range(const Dfa& d) {
  std::vector<bool> in(d.nstates(), true);
  for (int q = 0; q < d.nstates(); ++q) in[q] = !d.accepting(q);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int q = 0; q < d.nstates(); ++q) {
      if (!in[q]) continue;
      bool stay = false;
      for (int l = 0; l < d.nletters(); ++l)
        if (in[d.step(q, l)]) stay = true;
      if (!stay) {
        in[q] = false;
        changed = true;
      }
    }
  }
  return in[d.initial()];
}

void collect_extrema(const TF& f, std::set<int>& sup, std::set<int>& inf) {
  if (f->kind == TFormula::Kind::Cmp) {
    for (const TTerm* t : {&f->lhs, &f->rhs}) {
      if (t->kind == TTerm::Kind::Sup) sup.insert(t->reg);
      if (t->kind == TTerm::Kind::Inf) inf.insert(t->reg);
    }
    return;
  }
  for (const auto& k : f->kids) collect_extrema(k, sup, inf);
}

// a = max(operands) / a = min(operands): a is bounded by every operand and
// attains one of them.
TF extremum_eq(const TTerm& a, const std::vector<TTerm>& ops, bool is_max) {
  std::vector<TF> conj, attain;
  for (const auto& o : ops) {
    conj.push_back(is_max ? tf_not(tf_lt(a, o)) : tf_not(tf_lt(o, a)));
    attain.push_back(tf_eq(a, o));
  }
  conj.push_back(tf_or(std::move(attain)));
  return tf_and(std::move(conj));
}

// One register's per-label recurrence, with the callee choosing how register
// slots and label atoms are rendered.
struct RecurrenceSink {
  std::function<TF(int)> label_atom;      // base letter -> formula
  std::function<TTerm(NodePos, int)> base_term;  // register value
  std::function<TTerm(NodePos, int)> sup_term;   // sup copy
  std::function<TTerm(NodePos, int)> inf_term;   // inf copy
};

void append_recurrences(const Trasi& a, const std::vector<ResidualMap>& rm,
                        int reg, bool want_sup, bool want_inf,
                        const RecurrenceSink& s, std::vector<TF>& out) {
  const Dfa& d = rm[reg].dfa;
  if (language_empty(d)) {
    if (want_sup)
      out.push_back(tf_eq(s.sup_term(NodePos::Self, reg),
                          TTerm::mk_const(ExtValue::neg_inf())));
    if (want_inf)
      out.push_back(tf_eq(s.inf_term(NodePos::Self, reg),
                          TTerm::mk_const(ExtValue::pos_inf())));
    return;
  }
  bool has_eps = d.accepting(d.initial());
  for (int l = 0; l < (int)a.alphabet.size(); ++l) {
    int res = rm[reg].reg_of_state[d.step(d.initial(), l)];
    if (want_sup) {
      std::vector<TTerm> ops;
      if (has_eps) ops.push_back(s.base_term(NodePos::Self, reg));
      ops.push_back(s.sup_term(NodePos::Left, res));
      ops.push_back(s.sup_term(NodePos::Right, res));
      out.push_back(tf_implies(
          s.label_atom(l), extremum_eq(s.sup_term(NodePos::Self, reg), ops, true)));
    }
    if (want_inf) {
      std::vector<TTerm> ops;
      if (has_eps) ops.push_back(s.base_term(NodePos::Self, reg));
      ops.push_back(s.inf_term(NodePos::Left, res));
      ops.push_back(s.inf_term(NodePos::Right, res));
      out.push_back(tf_implies(
          s.label_atom(l), extremum_eq(s.inf_term(NodePos::Self, reg), ops, false)));
    }
  }
}

// ---------------------------------------------------------------------------
// Certificate construction.  One builder serves both the standalone checker
// (all registers, no automaton component) and the full composition in to_tra
// (tracked registers only, A's transition formula, recurrences and parity
// folded in).

struct KEntry {
  int reg;
  bool sup;
  int tape;
};
struct LEntry {
  int reg;
  bool sup;
};

struct TapeSpace {
  std::vector<std::vector<int>> vecs;
  std::map<std::vector<int>, int> idx;
};

TapeSpace tape_space(const Dfa& d) {
  TapeSpace ts;
  std::vector<int> start = initial_tapes(d);
  ts.idx[start] = 0;
  ts.vecs.push_back(start);
  std::queue<int> bfs;
  bfs.push(0);
  while (!bfs.empty()) {
    int u = bfs.front();
    bfs.pop();
    for (int l = 0; l < d.nletters(); ++l) {
      auto nxt = tape_step(d, ts.vecs[u], l);
      if (ts.idx.count(nxt)) continue;
      ts.idx[nxt] = (int)ts.vecs.size();
      ts.vecs.push_back(nxt);
      bfs.push((int)ts.idx[nxt]);
    }
  }
  return ts;
}

struct CertSpec {
  const Trasi* closed = nullptr;
  const std::vector<ResidualMap>* rm = nullptr;
  std::vector<int> sup_tracked, inf_tracked;  // ascending register indices
  std::vector<int> kept_bases;                // registers kept as base values
  std::vector<int> base_of;                   // family original per register
  bool with_automaton = false;
  TF delta = tf_true();  // A's transition formula when with_automaton
};

struct CertParts {
  CertAlphabet alphabet;
  std::vector<KEntry> K;
  std::vector<LEntry> L;
};

CertParts cert_parts(const Trasi& a, const std::vector<ResidualMap>& rm,
                     const std::vector<int>& sup_tracked,
                     const std::vector<int>& inf_tracked) {
  CertParts p;
  std::set<int> sups(sup_tracked.begin(), sup_tracked.end());
  std::set<int> infs(inf_tracked.begin(), inf_tracked.end());
  for (int i = 0; i < (int)a.registers.size(); ++i) {
    if (sups.count(i))
      for (int t = 0; t < rm[i].dfa.nstates(); ++t) p.K.push_back({i, true, t});
    if (infs.count(i))
      for (int t = 0; t < rm[i].dfa.nstates(); ++t) p.K.push_back({i, false, t});
  }
  for (int i = 0; i < (int)a.registers.size(); ++i) {
    if (sups.count(i)) p.L.push_back({i, true});
    if (infs.count(i)) p.L.push_back({i, false});
  }
  std::vector<std::vector<std::string>> comps;
  comps.push_back(a.alphabet);
  comps.push_back({"-", "X"});
  if (!p.K.empty()) {
    std::vector<std::string> kn, ln;
    for (const auto& e : p.K)
      kn.push_back(a.registers[e.reg] + (e.sup ? "+" : "-") +
                   std::to_string(e.tape));
    for (const auto& e : p.L)
      ln.push_back(a.registers[e.reg] + (e.sup ? "+" : "-"));
    comps.push_back(kn);
    comps.push_back(ln);
  }
  p.alphabet = make_cert_alphabet(std::move(comps));
  return p;
}

TreeRegisterAutomaton build_certificate(const CertSpec& cs) {
  const Trasi& A = *cs.closed;
  const auto& rm = *cs.rm;
  const int nletters = (int)A.alphabet.size();
  CertParts parts = cert_parts(A, rm, cs.sup_tracked, cs.inf_tracked);
  const auto& K = parts.K;
  const auto& L = parts.L;
  const int nsym = (int)parts.alphabet.symbols.size();
  const bool labels = !K.empty();

  TreeRegisterAutomaton out;
  out.alphabet = parts.alphabet.symbols;

  // Registers: kept base values, sup copies, inf copies, target.
  std::vector<int> base_slot(A.registers.size(), -1);
  std::vector<int> sup_slot(A.registers.size(), -1);
  std::vector<int> inf_slot(A.registers.size(), -1);
  for (int b : cs.kept_bases) {
    base_slot[b] = (int)out.registers.size();
    out.registers.push_back(A.registers[b]);
  }
  for (int i : cs.sup_tracked) {
    sup_slot[i] = (int)out.registers.size();
    out.registers.push_back(fresh_name(out.registers, A.registers[i] + ".sup"));
  }
  for (int i : cs.inf_tracked) {
    inf_slot[i] = (int)out.registers.size();
    out.registers.push_back(fresh_name(out.registers, A.registers[i] + ".inf"));
  }
  int t_slot = -1;
  if (labels) {
    t_slot = (int)out.registers.size();
    out.registers.push_back(fresh_name(out.registers, "t"));
  }
  auto base_term = [&](NodePos pos, int reg) {
    int slot = base_slot[cs.base_of[reg]];
    if (slot < 0) throw std::logic_error("dropped base register consulted");
    return TTerm::mk_reg(pos, slot);
  };
  auto sup_term = [&](NodePos pos, int reg) {
    if (sup_slot[reg] < 0) throw std::logic_error("untracked sup consulted");
    return TTerm::mk_reg(pos, sup_slot[reg]);
  };
  auto inf_term = [&](NodePos pos, int reg) {
    if (inf_slot[reg] < 0) throw std::logic_error("untracked inf consulted");
    return TTerm::mk_reg(pos, inf_slot[reg]);
  };

  // Tape bookkeeping for every register named by K: the tape vector at a node
  // is a deterministic function of the path word, carried in the state as one
  // combination index over the tracked registers.
  std::vector<int> tracked;
  std::set_union(cs.sup_tracked.begin(), cs.sup_tracked.end(),
                 cs.inf_tracked.begin(), cs.inf_tracked.end(),
                 std::back_inserter(tracked));
  std::vector<int> tr_pos(A.registers.size(), -1);
  std::vector<TapeSpace> spaces;
  long long ncombo_ll = 1;
  for (size_t k = 0; k < tracked.size(); ++k) {
    tr_pos[tracked[k]] = (int)k;
    spaces.push_back(tape_space(rm[tracked[k]].dfa));
    ncombo_ll *= (long long)spaces.back().vecs.size();
    if (ncombo_ll > 50000)
      throw std::runtime_error("certificate tape space too large");
  }
  int ncombo = (int)ncombo_ll;
  auto combo_encode = [&](const std::vector<int>& per) {
    int idx = 0;
    for (size_t k = 0; k < spaces.size(); ++k)
      idx = idx * (int)spaces[k].vecs.size() + per[k];
    return idx;
  };
  auto combo_decode = [&](int combo) {
    std::vector<int> per(spaces.size());
    for (int k = (int)spaces.size() - 1; k >= 0; --k) {
      per[k] = combo % (int)spaces[k].vecs.size();
      combo /= (int)spaces[k].vecs.size();
    }
    return per;
  };
  int init_combo = 0;
  {
    std::vector<int> per;
    for (auto& s : spaces) {
      (void)s;
      per.push_back(0);  // tape_space seeds with initial_tapes at index 0
    }
    init_combo = spaces.empty() ? 0 : combo_encode(per);
  }
  std::vector<std::vector<int>> combo_step(ncombo, std::vector<int>(nletters));
  for (int c = 0; c < ncombo; ++c) {
    auto per = combo_decode(c);
    for (int l = 0; l < nletters; ++l) {
      std::vector<int> nxt(per.size());
      for (size_t k = 0; k < spaces.size(); ++k)
        nxt[k] = spaces[k].idx.at(
            tape_step(rm[tracked[k]].dfa, spaces[k].vecs[per[k]], l));
      combo_step[c][l] = combo_encode(nxt);
    }
  }

  // States: automaton state, root flag, path-start flag, emitted-rank carry,
  // tape combination.  The carry accumulates the maximum shifted automaton
  // rank since the segment's start; a node emits it when it starts a path and
  // rank 1 otherwise, so a branch with finitely many path starts has odd
  // limit superior and A's parity decides the rest.
  struct BS {
    int q, root, selfx, carry, combo;
  };
  int nQ = cs.with_automaton ? (int)A.states.size() : 1;
  auto shifted = [&](int q) { return cs.with_automaton ? A.rank[q] + 2 : 2; };
  std::set<int> cset;
  for (int q = 0; q < nQ; ++q) cset.insert(shifted(q));
  std::vector<int> cvals(cset.begin(), cset.end());
  std::vector<BS> bst;
  std::map<std::tuple<int, int, int, int, int>, int> bidx;
  auto add_state = [&](BS s) {
    bidx[{s.q, s.root, s.selfx, s.carry, s.combo}] = (int)bst.size();
    bst.push_back(s);
  };
  for (int q = 0; q < nQ; ++q)
    for (int selfx = 0; selfx < 2; ++selfx)
      for (int c : cvals) {
        if (c < shifted(q)) continue;
        for (int combo = 0; combo < ncombo; ++combo)
          add_state({q, 0, selfx, c, combo});
      }
  std::vector<int> root_qs = cs.with_automaton ? A.roots : std::vector<int>{0};
  for (int q : root_qs) add_state({q, 1, 1, shifted(q), init_combo});
  if ((long long)bst.size() * nsym > 2000000)
    throw std::runtime_error("certificate automaton too large");
  for (const auto& s : bst) {
    std::string nm;
    if (cs.with_automaton) nm = A.states[s.q] + "|";
    nm += (s.root ? "r" : "n");
    nm += (s.selfx ? "X" : "-");
    nm += "c" + std::to_string(s.carry);
    nm += "T" + std::to_string(s.combo);
    out.states.push_back(nm);
    out.rank.push_back(s.selfx ? s.carry : 1);
    if (s.root) out.roots.push_back((int)out.states.size() - 1);
  }

  // Label and state atom groups, shared across all conjuncts.  Each class
  // comes in two spellings: the disjunction of its members, used where the
  // formula is taken apart (antecedents), and the conjoined exclusion of the
  // complement, used where it must be established.  The second never forces
  // the emptiness search to commit to a member — exactly one label and state
  // hold per position, so excluding the complement is the same constraint —
  // which keeps the move search branching on value comparisons only.
  auto sym_dis = [&](NodePos pos, const std::function<bool(int)>& pred) {
    std::vector<TF> d;
    for (int s = 0; s < nsym; ++s)
      if (pred(s)) d.push_back(tf_label(pos, s));
    return tf_or(std::move(d));
  };
  auto sym_excl = [&](NodePos pos, const std::function<bool(int)>& pred) {
    std::vector<TF> d;
    for (int s = 0; s < nsym; ++s)
      if (!pred(s)) d.push_back(tf_not(tf_label(pos, s)));
    return tf_and(std::move(d));
  };
  auto comp_of = [&](int sym, int comp) {
    return parts.alphabet.decode(sym)[comp];
  };
  // [pos][value], disjunction form / exclusion form per component.
  std::vector<std::vector<TF>> lblB(3), lblX(3), lblK(3), lblL(3);
  std::vector<std::vector<TF>> lblXe(3), lblKe(3), lblLe(3);
  for (int p = 0; p < 3; ++p) {
    NodePos pos = (NodePos)p;
    for (int l = 0; l < nletters; ++l)
      lblB[p].push_back(sym_dis(pos, [&](int s) { return comp_of(s, 0) == l; }));
    for (int b = 0; b < 2; ++b) {
      lblX[p].push_back(sym_dis(pos, [&](int s) { return comp_of(s, 1) == b; }));
      lblXe[p].push_back(
          sym_excl(pos, [&](int s) { return comp_of(s, 1) == b; }));
    }
    if (labels) {
      for (int k = 0; k < (int)K.size(); ++k) {
        lblK[p].push_back(
            sym_dis(pos, [&](int s) { return comp_of(s, 2) == k; }));
        lblKe[p].push_back(
            sym_excl(pos, [&](int s) { return comp_of(s, 2) == k; }));
      }
      for (int l = 0; l < (int)L.size(); ++l) {
        lblL[p].push_back(
            sym_dis(pos, [&](int s) { return comp_of(s, 3) == l; }));
        lblLe[p].push_back(
            sym_excl(pos, [&](int s) { return comp_of(s, 3) == l; }));
      }
    }
  }
  auto st_dis = [&](NodePos pos, const std::function<bool(const BS&)>& pred) {
    std::vector<TF> d;
    for (size_t i = 0; i < bst.size(); ++i)
      if (pred(bst[i])) d.push_back(tf_state(pos, (int)i));
    return tf_or(std::move(d));
  };
  auto st_excl = [&](NodePos pos, const std::function<bool(const BS&)>& pred) {
    std::vector<TF> d;
    for (size_t i = 0; i < bst.size(); ++i)
      if (!pred(bst[i])) d.push_back(tf_not(tf_state(pos, (int)i)));
    return tf_and(std::move(d));
  };

  std::vector<TF> conj;

  // A's transition formula over the product alphabet, extrema as copies.
  // Token classes expand by the polarity they occur under.
  if (cs.with_automaton) {
    std::vector<std::vector<TF>> stQ(3), stQe(3), lblBe(3);
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < nQ; ++q) {
        stQ[p].push_back(
            st_dis((NodePos)p, [&](const BS& s) { return s.q == q; }));
        stQe[p].push_back(
            st_excl((NodePos)p, [&](const BS& s) { return s.q == q; }));
      }
      for (int l = 0; l < nletters; ++l)
        lblBe[p].push_back(
            sym_excl((NodePos)p, [&](int s) { return comp_of(s, 0) == l; }));
    }
    std::function<TF(const TF&, bool)> rw = [&](const TF& f, bool pos) -> TF {
      switch (f->kind) {
        case TFormula::Kind::True:
        case TFormula::Kind::False:
          return f;
        case TFormula::Kind::Label:
          return (pos ? lblBe : lblB)[(int)f->pos][f->idx];
        case TFormula::Kind::State:
          return (pos ? stQe : stQ)[(int)f->pos][f->idx];
        case TFormula::Kind::Cmp: {
          auto term = [&](const TTerm& t) {
            switch (t.kind) {
              case TTerm::Kind::Const:
                return t;
              case TTerm::Kind::Reg:
                return base_term(t.pos, t.reg);
              case TTerm::Kind::Sup:
                return sup_term(NodePos::Self, t.reg);
              case TTerm::Kind::Inf:
                return inf_term(NodePos::Self, t.reg);
            }
            return t;
          };
          TTerm a = term(f->lhs), b = term(f->rhs);
          return f->strict ? tf_lt(a, b) : tf_eq(a, b);
        }
        case TFormula::Kind::Not:
          return tf_not(rw(f->kids[0], !pos));
        case TFormula::Kind::And:
        case TFormula::Kind::Or: {
          std::vector<TF> kids;
          for (const auto& k : f->kids) kids.push_back(rw(k, pos));
          return f->kind == TFormula::Kind::And ? tf_and(std::move(kids))
                                                : tf_or(std::move(kids));
        }
      }
      return f;
    };
    conj.push_back(rw(cs.delta, true));
  }

  // Root discipline: root-flagged states never sit below another node, and
  // the root starts a path carrying the least witness label.
  conj.push_back(st_excl(NodePos::Left, [](const BS& s) { return !s.root; }));
  conj.push_back(st_excl(NodePos::Right, [](const BS& s) { return !s.root; }));
  {
    std::vector<TF> at_root{lblXe[0][1]};
    if (labels) at_root.push_back(lblKe[0][0]);
    conj.push_back(tf_implies(
        st_dis(NodePos::Self, [](const BS& s) { return s.root == 1; }),
        tf_and(std::move(at_root))));
  }

  // The state's path-start flag mirrors the guessed letter component; pinned
  // from both sides of the edge so a frame never hands a child a mismatched
  // pair only to have the child's own frame reject it.
  for (int b = 0; b < 2; ++b) {
    conj.push_back(tf_implies(
        st_dis(NodePos::Self, [&](const BS& s) { return s.selfx == b; }),
        lblXe[0][b]));
    for (int side = 1; side <= 2; ++side)
      conj.push_back(tf_implies(
          lblX[side][b],
          st_excl((NodePos)side, [&](const BS& s) { return s.selfx == b; })));
  }

  // Tape determinism: children extend the parent's tape vectors by the
  // parent's base letter.
  if (ncombo > 1) {
    for (int c = 0; c < ncombo; ++c) {
      TF here = st_dis(NodePos::Self, [&](const BS& s) { return s.combo == c; });
      for (int l = 0; l < nletters; ++l) {
        int nxt = combo_step[c][l];
        TF lhs = tf_and({here, lblB[0][l]});
        for (int side = 1; side <= 2; ++side)
          conj.push_back(tf_implies(
              lhs, st_excl((NodePos)side,
                           [&](const BS& s) { return s.combo == nxt; })));
      }
    }
  }

  // Carry propagation: a path start resets the segment maximum, anything
  // else extends it.
  if ((int)cvals.size() > 1) {
    for (int px = 0; px < 2; ++px)
      for (int pc : cvals) {
        TF here = st_dis(NodePos::Self, [&](const BS& s) {
          return s.selfx == px && s.carry == pc;
        });
        auto want = [&](const BS& s) {
          int need = px ? shifted(s.q) : std::max(pc, shifted(s.q));
          return s.carry == need;
        };
        for (int side = 1; side <= 2; ++side)
          conj.push_back(tf_implies(here, st_excl((NodePos)side, want)));
      }
  }

  // Every node has a child starting a path; otherwise some part would branch.
  conj.push_back(tf_or({lblXe[1][1], lblXe[2][1]}));

  if (labels) {
    // Cyclic scheduling of the K± labels and constancy along parts.
    for (int side = 1; side <= 2; ++side) {
      for (int k = 0; k < (int)K.size(); ++k) {
        int succ = (k + 1) % (int)K.size();
        conj.push_back(tf_implies(
            lblK[0][k],
            tf_and({tf_implies(lblX[side][1], lblKe[side][succ]),
                    tf_implies(lblX[side][0], lblKe[side][k])})));
      }
      std::vector<TF> keep{tf_eq(TTerm::mk_reg((NodePos)side, t_slot),
                                 TTerm::mk_reg(NodePos::Self, t_slot))};
      for (int l = 0; l < (int)L.size(); ++l)
        keep.push_back(tf_implies(lblL[0][l], lblLe[side][l]));
      conj.push_back(tf_implies(lblX[side][0], tf_and(std::move(keep))));
    }

    // At a path start the witness label is the residual register carried by
    // the scheduled tape.
    std::map<std::pair<int, int>, int> lidx;
    for (int l = 0; l < (int)L.size(); ++l)
      lidx[{L[l].reg, L[l].sup ? 1 : 0}] = l;
    for (int c = 0; c < ncombo; ++c) {
      auto per = combo_decode(c);
      TF here = ncombo > 1 ? st_dis(NodePos::Self,
                                    [&](const BS& s) { return s.combo == c; })
                           : tf_true();
      for (int k = 0; k < (int)K.size(); ++k) {
        int state = spaces[tr_pos[K[k].reg]].vecs[per[tr_pos[K[k].reg]]][K[k].tape];
        int reg = rm[K[k].reg].reg_of_state[state];
        int l = lidx.at({reg, K[k].sup ? 1 : 0});
        std::vector<TF> lhs{lblX[0][1], lblK[0][k]};
        if (ncombo > 1) lhs.insert(lhs.begin(), here);
        conj.push_back(tf_implies(tf_and(std::move(lhs)), lblLe[0][l]));
      }
    }

    // A part's largest node (both children start paths) pins the target to
    // the witness register's value.
    {
      std::vector<TF> pins;
      for (int l = 0; l < (int)L.size(); ++l)
        pins.push_back(tf_implies(
            lblL[0][l], tf_eq(TTerm::mk_reg(NodePos::Self, t_slot),
                              base_term(NodePos::Self, L[l].reg))));
      conj.push_back(tf_implies(tf_and({lblX[1][1], lblX[2][1]}),
                                tf_and(std::move(pins))));
    }

    // Gap freedom at path starts, checked from the parent so the parent's
    // register values are in scope; the root checks its own values only.
    std::vector<int> gap_regs;
    for (int r = 0; r < (int)out.registers.size(); ++r)
      if (r != t_slot) gap_regs.push_back(r);
    auto gap_formula = [&](const LEntry& le, NodePos at, bool with_parent) {
      TTerm target = TTerm::mk_reg(at, t_slot);
      TTerm ext = le.sup ? sup_term(at, le.reg) : inf_term(at, le.reg);
      std::vector<TF> g;
      if (possibly_empty_range(rm[le.reg].dfa)) {
        TTerm sentinel = TTerm::mk_const(le.sup ? ExtValue::neg_inf()
                                                : ExtValue::pos_inf());
        g.push_back(tf_or({tf_eq(ext, sentinel),
                           tf_not(le.sup ? tf_lt(ext, target)
                                         : tf_lt(target, ext))}));
      } else {
        g.push_back(tf_not(le.sup ? tf_lt(ext, target) : tf_lt(target, ext)));
      }
      std::vector<NodePos> where{at};
      if (with_parent) where.push_back(NodePos::Self);
      for (int u : gap_regs)
        for (NodePos w : where) {
          TTerm val = TTerm::mk_reg(w, u);
          TF inside =
              le.sup ? tf_and({tf_or({tf_eq(target, val), tf_lt(target, val)}),
                               tf_lt(val, ext)})
                     : tf_and({tf_lt(ext, val),
                               tf_or({tf_eq(val, target), tf_lt(val, target)})});
          g.push_back(tf_not(inside));
        }
      return tf_and(std::move(g));
    };
    for (int side = 1; side <= 2; ++side)
      for (int l = 0; l < (int)L.size(); ++l)
        conj.push_back(
            tf_implies(tf_and({lblX[side][1], lblL[side][l]}),
                       gap_formula(L[l], (NodePos)side, true)));
    {
      std::vector<TF> at_root;
      for (int l = 0; l < (int)L.size(); ++l)
        at_root.push_back(
            tf_implies(lblL[0][l], gap_formula(L[l], NodePos::Self, false)));
      conj.push_back(tf_implies(
          st_dis(NodePos::Self, [](const BS& s) { return s.root == 1; }),
          tf_and(std::move(at_root))));
    }
  }

  // Extrema recurrences over the product alphabet (composition only; the
  // standalone checker leaves consistency to its own operation).
  if (cs.with_automaton) {
    RecurrenceSink sink{[&](int l) { return lblB[0][l]; }, base_term, sup_term,
                        inf_term};
    std::set<int> sups(cs.sup_tracked.begin(), cs.sup_tracked.end());
    std::set<int> infs(cs.inf_tracked.begin(), cs.inf_tracked.end());
    for (int r : tracked)
      append_recurrences(A, rm, r, sups.count(r) > 0, infs.count(r) > 0, sink,
                         conj);
  }

  // Domain bounds: base values are data values, never infinite; sup copies
  // may only be -inf (empty range), inf copies only +inf.  Needed only once
  // an infinity is mentioned at all, since pinning is otherwise impossible.
  if (cs.with_automaton) {
    auto consts = tf_constants(tf_and(conj));
    bool has_neg = false, has_pos = false;
    for (const auto& c : consts) {
      if (c.is_neg_inf()) has_neg = true;
      if (c.is_pos_inf()) has_pos = true;
    }
    TTerm neg = TTerm::mk_const(ExtValue::neg_inf());
    TTerm pos = TTerm::mk_const(ExtValue::pos_inf());
    for (int b : cs.kept_bases) {
      if (has_neg) conj.push_back(tf_lt(neg, base_term(NodePos::Self, b)));
      if (has_pos) conj.push_back(tf_lt(base_term(NodePos::Self, b), pos));
    }
    if (has_pos)
      for (int i : cs.sup_tracked)
        conj.push_back(tf_lt(sup_term(NodePos::Self, i), pos));
    if (has_neg)
      for (int i : cs.inf_tracked)
        conj.push_back(tf_lt(neg, inf_term(NodePos::Self, i)));
  }

  out.delta = tf_and(std::move(conj));
  return out;
}

}  // namespace

Trasi normalize(const Trasi& a) {
  validate_trasi(a);
  Trasi out = a;
  size_t before = out.registers.size();
  out.delta = detail::split_cross_atoms(a.delta, out.registers, "w");
  for (size_t i = before; i < out.registers.size(); ++i) {
    Nfa eps;
    eps.alphabet = a.alphabet;
    int q = eps.add_state();
    eps.initials = {q};
    eps.accepting[q] = true;
    out.languages.push_back(std::move(eps));
  }
  return out;
}

Trasi language_close(const Trasi& a) { return close_impl(a, nullptr); }

std::vector<ResidualMap> closure_map(const Trasi& closed) {
  validate_trasi(closed);
  return family_maps(closed, family_bases(closed));
}

int sup_reg(const Trasi& closed, int reg) {
  if (reg < 0 || reg >= (int)closed.registers.size())
    throw std::invalid_argument("register index out of range");
  return (int)closed.registers.size() + reg;
}

int inf_reg(const Trasi& closed, int reg) {
  if (reg < 0 || reg >= (int)closed.registers.size())
    throw std::invalid_argument("register index out of range");
  return 2 * (int)closed.registers.size() + reg;
}

std::vector<std::string> extended_register_names(const Trasi& closed) {
  std::vector<std::string> out = closed.registers;
  for (const auto& r : closed.registers) out.push_back(r + ".sup");
  for (const auto& r : closed.registers) out.push_back(r + ".inf");
  return out;
}

TF extrema_consistency_constraints(const Trasi& closed) {
  validate_trasi(closed);
  auto rm = closure_map(closed);
  int n = (int)closed.registers.size();
  RecurrenceSink sink{
      [](int l) { return tf_label(NodePos::Self, l); },
      [](NodePos p, int r) { return TTerm::mk_reg(p, r); },
      [n](NodePos p, int r) { return TTerm::mk_reg(p, n + r); },
      [n](NodePos p, int r) { return TTerm::mk_reg(p, 2 * n + r); }};
  std::vector<TF> conj;
  for (int r = 0; r < n; ++r)
    append_recurrences(closed, rm, r, true, true, sink, conj);
  return tf_and(std::move(conj));
}

int CertAlphabet::index(const std::vector<int>& choice) const {
  if (choice.size() != component_values.size())
    throw std::invalid_argument("component count mismatch");
  int idx = 0;
  for (size_t c = 0; c < component_values.size(); ++c) {
    if (choice[c] < 0 || choice[c] >= (int)component_values[c].size())
      throw std::invalid_argument("component value out of range");
    idx = idx * (int)component_values[c].size() + choice[c];
  }
  return idx;
}

std::vector<int> CertAlphabet::decode(int symbol) const {
  if (symbol < 0 || symbol >= (int)symbols.size())
    throw std::invalid_argument("symbol out of range");
  std::vector<int> out(component_values.size());
  for (int c = (int)component_values.size() - 1; c >= 0; --c) {
    out[c] = symbol % (int)component_values[c].size();
    symbol /= (int)component_values[c].size();
  }
  return out;
}

CertAlphabet make_cert_alphabet(std::vector<std::vector<std::string>> components) {
  if (components.empty()) throw std::invalid_argument("no alphabet components");
  long long total = 1;
  for (const auto& c : components) {
    if (c.empty()) throw std::invalid_argument("empty alphabet component");
    total *= (long long)c.size();
    if (total > 2000000) throw std::invalid_argument("alphabet too large");
  }
  CertAlphabet out;
  out.component_values = std::move(components);
  for (int s = 0; s < (int)total; ++s) out.symbols.push_back("");
  for (int s = 0; s < (int)total; ++s) {
    auto parts = out.decode(s);
    std::string nm;
    for (size_t c = 0; c < parts.size(); ++c) {
      if (c) nm += "|";
      nm += out.component_values[c][parts[c]];
    }
    out.symbols[s] = nm;
  }
  return out;
}

CertAlphabet certificate_alphabet(const Trasi& closed) {
  validate_trasi(closed);
  auto rm = closure_map(closed);
  std::vector<int> all(closed.registers.size());
  std::iota(all.begin(), all.end(), 0);
  return cert_parts(closed, rm, all, all).alphabet;
}

TreeRegisterAutomaton certificate_automaton(const Trasi& closed) {
  validate_trasi(closed);
  auto rm = closure_map(closed);
  CertSpec cs;
  cs.closed = &closed;
  cs.rm = &rm;
  cs.sup_tracked.resize(closed.registers.size());
  std::iota(cs.sup_tracked.begin(), cs.sup_tracked.end(), 0);
  cs.inf_tracked = cs.sup_tracked;
  cs.kept_bases = cs.sup_tracked;
  cs.base_of = cs.sup_tracked;
  cs.with_automaton = false;
  return build_certificate(cs);
}

TreeRegisterAutomaton to_tra(const Trasi& a0) {
  validate_trasi(a0);
  if (!tf_mentions_extrema(a0.delta))
    return {a0.alphabet, a0.states, a0.registers, a0.roots, a0.rank, a0.delta};
  Trasi a1 = normalize(a0);
  std::vector<int> base_of;
  Trasi a2 = close_impl(a1, &base_of);
  auto rm = family_maps(a2, base_of);

  // Track every register whose extremum is consulted by the formula, closed
  // under the residual references of the recurrences; everything else keeps
  // its extrema implicit.
  std::set<int> sup_seed, inf_seed;
  collect_extrema(a1.delta, sup_seed, inf_seed);
  auto close_tracked = [&](std::set<int> seed) {
    std::vector<int> work(seed.begin(), seed.end());
    while (!work.empty()) {
      int r = work.back();
      work.pop_back();
      for (int j : rm[r].reg_of_state)
        if (seed.insert(j).second) work.push_back(j);
    }
    return std::vector<int>(seed.begin(), seed.end());
  };

  CertSpec cs;
  cs.closed = &a2;
  cs.rm = &rm;
  cs.sup_tracked = close_tracked(sup_seed);
  cs.inf_tracked = close_tracked(inf_seed);
  cs.kept_bases.resize(a1.registers.size());
  std::iota(cs.kept_bases.begin(), cs.kept_bases.end(), 0);
  cs.base_of = base_of;
  cs.with_automaton = true;
  cs.delta = a1.delta;
  return build_certificate(cs);
}

bool trasi_is_empty(const Trasi& a) { return tra_is_empty(to_tra(a)); }

std::optional<TraWitness> trasi_witness(const Trasi& a) {
  return tra_witness(to_tra(a));
}

TF weak_diversity_constraints(const CertAlphabet& alph,
                              const std::vector<int>& tag_component,
                              const std::vector<std::string>& registers,
                              int input_reg) {
  if (tag_component.size() != registers.size())
    throw std::invalid_argument("one tag component per register required");
  if (input_reg < 0 || input_reg >= (int)registers.size())
    throw std::invalid_argument("input register out of range");
  for (int c : tag_component) {
    if (c < 0 || c >= (int)alph.component_values.size())
      throw std::invalid_argument("tag component out of range");
    if (alph.component_values[c] != kDiversityTags)
      throw std::invalid_argument("tag component must list the source tags");
  }
  int nregs = (int)registers.size();
  const int kSrc = 0, kUp = 1, kLeft = 2, kRight = 3;
  std::vector<std::vector<std::vector<TF>>> tag(
      3, std::vector<std::vector<TF>>(nregs, std::vector<TF>(4)));
  for (int p = 0; p < 3; ++p)
    for (int r = 0; r < nregs; ++r)
      for (int d = 0; d < 4; ++d) {
        std::vector<TF> dis;
        for (int s = 0; s < (int)alph.symbols.size(); ++s)
          if (alph.decode(s)[tag_component[r]] == d)
            dis.push_back(tf_label((NodePos)p, s));
        tag[p][r][d] = tf_or(std::move(dis));
      }

  std::vector<TF> conj;
  // The input register is its own source everywhere.
  conj.push_back(tag[0][input_reg][kSrc]);
  // Registers holding the same value agree on the source tag.
  for (int r = 0; r < nregs; ++r)
    for (int r2 = r + 1; r2 < nregs; ++r2) {
      std::vector<TF> agree;
      for (int d = 0; d < 4; ++d)
        agree.push_back(tf_implies(tag[0][r][d], tag[0][r2][d]));
      conj.push_back(tf_implies(tf_eq(TTerm::mk_reg(NodePos::Self, r),
                                      TTerm::mk_reg(NodePos::Self, r2)),
                                tf_and(std::move(agree))));
    }
  // A value shared across an edge locates its source on one side: if the
  // child's copy originates at or below the child, the parent's copy points
  // into that subtree, and a child's copy from above never does.
  for (int side = 1; side <= 2; ++side) {
    int here = side == 1 ? kLeft : kRight;
    int other = side == 1 ? kRight : kLeft;
    for (int r = 0; r < nregs; ++r)
      for (int r2 = 0; r2 < nregs; ++r2) {
        TF below = tf_or({tag[side][r][kSrc], tag[side][r][kLeft],
                          tag[side][r][kRight]});
        TF rule = tf_and(
            {tf_implies(below, tag[0][r2][here]),
             tf_implies(tag[side][r][kUp],
                        tf_or({tag[0][r2][kSrc], tag[0][r2][other],
                               tag[0][r2][kUp]}))});
        conj.push_back(tf_implies(tf_eq(TTerm::mk_reg((NodePos)side, r),
                                        TTerm::mk_reg(NodePos::Self, r2)),
                                  rule));
      }
  }
  return tf_and(std::move(conj));
}

}  // namespace ordalia
