#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "ordalia/tra.hpp"
#include "tra_internal.hpp"

namespace ordalia {

namespace detail {

void order_type_atoms(const OrderType& t, const FrameVars& fv, NodePos pos,
                      const std::vector<std::string>& registers,
                      std::vector<IdxAtom>& out) {
  // Map a type variable name to a frame id: bare register names belong to
  // `pos`, "#"-prefixed names are constants.
  auto var_id = [&](const std::string& name) -> int {
    if (!name.empty() && name[0] == '#') {
      auto v = ExtValue::parse(name.substr(1));
      return fv.const_var(*v);
    }
    for (size_t r = 0; r < registers.size(); ++r)
      if (registers[r] == name) return fv.reg_var(pos, (int)r);
    throw std::logic_error("unknown type variable " + name);
  };
  int prev_rep = 0;
  for (size_t b = 0; b < t.blocks.size(); ++b) {
    int rep = var_id(t.blocks[b][0]);
    for (size_t i = 1; i < t.blocks[b].size(); ++i)
      out.push_back(IdxAtom::eq(rep, var_id(t.blocks[b][i])));
    if (b == 0 && t.neg_pinned) out.push_back(IdxAtom::eq(rep, kNegInfId));
    if (b + 1 == t.blocks.size() && t.pos_pinned)
      out.push_back(IdxAtom::eq(rep, kPosInfId));
    if (b > 0) out.push_back(IdxAtom::lt(prev_rep, rep));
    prev_rep = rep;
  }
}

RelClosure::RelClosure(int nvars, const std::vector<IdxAtom>& atoms) : n_(nvars) {
  int m = n_ + 2;
  leq_.assign(m, std::vector<char>(m, 0));
  lt_.assign(m, std::vector<char>(m, 0));
  for (int i = 0; i < m; ++i) leq_[i][i] = 1;
  for (int i = 0; i < m; ++i) {
    leq_[n_][i] = 1;      // -inf weakly below everything: values may be -inf
    leq_[i][n_ + 1] = 1;  // everything weakly below +inf
  }
  lt_[n_][n_ + 1] = 1;
  for (const auto& a : atoms) {
    int u = slot(a.lhs), v = slot(a.rhs);
    leq_[u][v] = 1;
    if (a.strict)
      lt_[u][v] = 1;
    else
      leq_[v][u] = 1;
  }
  // Floyd–Warshall style closure; lt propagates through leq on either side.
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i) {
      if (!leq_[i][k]) continue;
      for (int j = 0; j < m; ++j) {
        if (!leq_[k][j]) continue;
        leq_[i][j] = 1;
        if (lt_[i][k] || lt_[k][j]) lt_[i][j] = 1;
      }
    }
  for (int i = 0; i < m && consistent_; ++i)
    if (lt_[i][i]) consistent_ = false;
}

}  // namespace detail

using detail::FrameVars;

std::string type_var_name(NodePos pos, const std::string& reg) {
  return std::string(pos_prefix(pos)) + reg;
}

bool NodeType::operator<(const NodeType& o) const {
  for (int i = 0; i < 3; ++i)
    if (label[i] != o.label[i]) return label[i] < o.label[i];
  return order < o.order;
}

std::string NodeType::str(const std::vector<std::string>& alphabet) const {
  std::string s = "(" + alphabet.at(label[0]) + "," + alphabet.at(label[1]) +
                  "," + alphabet.at(label[2]) + " | " + order.str() + ")";
  return s;
}

namespace {

// All ordered partitions of `pool`: the next block ranges over every
// nonempty subset, so each ordered partition arises exactly once.
void ordered_partitions(std::vector<std::string>& pool,
                        std::vector<std::vector<std::string>>& acc,
                        const std::function<void()>& emit) {
  if (pool.empty()) {
    emit();
    return;
  }
  int k = (int)pool.size();
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<std::string> block, rest;
    for (int i = 0; i < k; ++i)
      ((mask >> i) & 1 ? block : rest).push_back(pool[i]);
    acc.push_back(block);
    ordered_partitions(rest, acc, emit);
    acc.pop_back();
  }
}

}  // namespace

std::vector<NodeType> enumerate_types(int alphabet_size,
                                      const std::vector<std::string>& registers,
                                      const std::vector<ExtValue>& constants) {
  std::vector<ExtValue> consts = constants;
  std::sort(consts.begin(), consts.end(),
            [](const ExtValue& a, const ExtValue& b) { return a < b; });
  consts.erase(std::unique(consts.begin(), consts.end()), consts.end());
  bool has_neg = !consts.empty() && consts.front().is_neg_inf();
  bool has_pos = !consts.empty() && consts.back().is_pos_inf();

  std::vector<std::string> vars;
  for (NodePos p : {NodePos::Self, NodePos::Left, NodePos::Right})
    for (const auto& r : registers) vars.push_back(type_var_name(p, r));
  for (const auto& c : consts) vars.push_back(detail::const_var_name(c));
  if (vars.size() > 10)
    throw std::invalid_argument("enumerate_types: too many order variables");

  std::vector<OrderType> orders;
  std::vector<std::vector<std::string>> acc;
  auto emit = [&]() {
    // Constants must sit in strictly increasing blocks, infinities at the
    // pinned ends, finite constants strictly inside.
    int prev = -1;
    for (const auto& c : consts) {
      std::string name = detail::const_var_name(c);
      int b = -1;
      for (size_t i = 0; i < acc.size(); ++i)
        if (std::find(acc[i].begin(), acc[i].end(), name) != acc[i].end()) {
          b = (int)i;
          break;
        }
      if (b <= prev) return;
      prev = b;
      if (c.is_neg_inf() && b != 0) return;
      if (c.is_pos_inf() && b != (int)acc.size() - 1) return;
      if (c.is_finite() && has_neg && b == 0) return;
      if (c.is_finite() && has_pos && b == (int)acc.size() - 1) return;
    }
    OrderType t;
    t.blocks = acc;
    t.neg_pinned = has_neg;
    t.pos_pinned = has_pos;
    t.canonicalize();
    orders.push_back(std::move(t));
  };
  std::vector<std::string> pool = vars;
  if (vars.empty()) {
    orders.push_back(OrderType{});
  } else {
    ordered_partitions(pool, acc, emit);
  }
  std::sort(orders.begin(), orders.end());

  std::vector<NodeType> out;
  for (int l0 = 0; l0 < alphabet_size; ++l0)
    for (int l1 = 0; l1 < alphabet_size; ++l1)
      for (int l2 = 0; l2 < alphabet_size; ++l2)
        for (const auto& o : orders) {
          NodeType t;
          t.label[0] = l0;
          t.label[1] = l1;
          t.label[2] = l2;
          t.order = o;
          out.push_back(std::move(t));
        }
  return out;
}

namespace detail {

OrderType restrict_to_position(const OrderType& o, NodePos pos) {
  std::string prefix = pos_prefix(pos);
  OrderType out;
  out.neg_pinned = o.neg_pinned;
  out.pos_pinned = o.pos_pinned;
  for (size_t b = 0; b < o.blocks.size(); ++b) {
    std::vector<std::string> kept;
    for (const auto& name : o.blocks[b]) {
      if (!name.empty() && name[0] == '#') {
        kept.push_back(name);
      } else if (pos == NodePos::Self) {
        if (name.compare(0, 2, "<:") != 0 && name.compare(0, 2, ">:") != 0)
          kept.push_back(name);
      } else if (name.compare(0, 2, prefix) == 0) {
        kept.push_back(name.substr(2));
      }
    }
    if (!kept.empty()) {
      out.blocks.push_back(std::move(kept));
    } else {
      // A pinned end block may not vanish silently: it only can when no
      // constant pins it, in which case the pin is dropped with it.
      if (b == 0 && o.neg_pinned) out.neg_pinned = false;
      if (b + 1 == o.blocks.size() && o.pos_pinned) out.pos_pinned = false;
    }
  }
  out.canonicalize();
  return out;
}

}  // namespace detail

using detail::restrict_to_position;

bool pair_consistent(const NodeType& parent, const NodeType& child, NodePos side,
                     const std::vector<std::string>& registers,
                     const std::vector<ExtValue>& constants) {
  (void)registers;
  (void)constants;
  assert(side == NodePos::Left || side == NodePos::Right);
  if (parent.label[(int)side] != child.label[0]) return false;
  return restrict_to_position(parent.order, side) ==
         restrict_to_position(child.order, NodePos::Self);
}

bool is_consistent_triple(const NodeType& t, const NodeType& left,
                          const NodeType& right,
                          const std::vector<std::string>& registers,
                          const std::vector<ExtValue>& constants) {
  return pair_consistent(t, left, NodePos::Left, registers, constants) &&
         pair_consistent(t, right, NodePos::Right, registers, constants);
}

namespace detail {

bool eval_on_type(const TF& f, const NodeType& t,
                  const std::vector<std::string>& registers, int q, int ql,
                  int qr) {
  switch (f->kind) {
    case TFormula::Kind::True:
      return true;
    case TFormula::Kind::False:
      return false;
    case TFormula::Kind::Label:
      return t.label[(int)f->pos] == f->idx;
    case TFormula::Kind::State: {
      int have = f->pos == NodePos::Self ? q : f->pos == NodePos::Left ? ql : qr;
      return have == f->idx;
    }
    case TFormula::Kind::Cmp: {
      auto name = [&](const TTerm& term) {
        if (term.kind == TTerm::Kind::Const)
          return detail::const_var_name(term.value);
        return type_var_name(term.pos, registers.at(term.reg));
      };
      if (f->lhs.kind == TTerm::Kind::Sup || f->lhs.kind == TTerm::Kind::Inf ||
          f->rhs.kind == TTerm::Kind::Sup || f->rhs.kind == TTerm::Kind::Inf)
        throw std::invalid_argument("extremum term in register automaton");
      std::string a = name(f->lhs), b = name(f->rhs);
      return f->strict ? t.order.less(a, b) : t.order.eq(a, b);
    }
    case TFormula::Kind::Not:
      return !eval_on_type(f->kids[0], t, registers, q, ql, qr);
    case TFormula::Kind::And:
      for (const auto& k : f->kids)
        if (!eval_on_type(k, t, registers, q, ql, qr)) return false;
      return true;
    case TFormula::Kind::Or:
      for (const auto& k : f->kids)
        if (eval_on_type(k, t, registers, q, ql, qr)) return true;
      return false;
  }
  return false;
}

namespace {

bool child_term(const TTerm& t, NodePos pos) {
  return t.kind != TTerm::Kind::Const && t.pos == pos;
}

void collect_cross_left_terms(const TF& f, std::vector<TTerm>& out) {
  if (f->kind == TFormula::Kind::Cmp) {
    const TTerm* lt = nullptr;
    if (child_term(f->lhs, NodePos::Left) && child_term(f->rhs, NodePos::Right))
      lt = &f->lhs;
    else if (child_term(f->rhs, NodePos::Left) && child_term(f->lhs, NodePos::Right))
      lt = &f->rhs;
    if (lt && std::find(out.begin(), out.end(), *lt) == out.end())
      out.push_back(*lt);
    return;
  }
  for (const auto& k : f->kids) collect_cross_left_terms(k, out);
}

TF replace_cross_atoms(const TF& f, const std::vector<TTerm>& terms,
                       const std::vector<int>& snapshot_reg) {
  switch (f->kind) {
    case TFormula::Kind::Cmp: {
      const TTerm* lt = nullptr;
      bool on_lhs = false;
      if (child_term(f->lhs, NodePos::Left) && child_term(f->rhs, NodePos::Right)) {
        lt = &f->lhs;
        on_lhs = true;
      } else if (child_term(f->rhs, NodePos::Left) &&
                 child_term(f->lhs, NodePos::Right)) {
        lt = &f->rhs;
      }
      if (!lt) return f;
      size_t i = std::find(terms.begin(), terms.end(), *lt) - terms.begin();
      TTerm w = TTerm::mk_reg(NodePos::Self, snapshot_reg[i]);
      TTerm other = on_lhs ? f->rhs : f->lhs;
      if (f->strict)
        return on_lhs ? tf_lt(w, other) : tf_lt(other, w);
      return tf_eq(w, other);
    }
    case TFormula::Kind::Not:
      return tf_not(replace_cross_atoms(f->kids[0], terms, snapshot_reg));
    case TFormula::Kind::And:
    case TFormula::Kind::Or: {
      std::vector<TF> kids;
      for (const auto& k : f->kids)
        kids.push_back(replace_cross_atoms(k, terms, snapshot_reg));
      return f->kind == TFormula::Kind::And ? tf_and(std::move(kids))
                                            : tf_or(std::move(kids));
    }
    default:
      return f;
  }
}

}  // namespace

TF split_cross_atoms(const TF& f, std::vector<std::string>& registers,
                     const std::string& hint) {
  std::vector<TTerm> terms;
  collect_cross_left_terms(f, terms);
  if (terms.empty()) return f;
  std::vector<int> snapshot_reg;
  std::vector<TF> conjuncts;
  for (const auto& t : terms) {
    std::string name;
    for (int i = 0;; ++i) {
      name = hint + std::to_string(i);
      if (std::find(registers.begin(), registers.end(), name) == registers.end())
        break;
    }
    registers.push_back(name);
    int idx = (int)registers.size() - 1;
    snapshot_reg.push_back(idx);
    conjuncts.push_back(tf_eq(TTerm::mk_reg(NodePos::Self, idx), t));
  }
  conjuncts.push_back(replace_cross_atoms(f, terms, snapshot_reg));
  return tf_and(std::move(conjuncts));
}

}  // namespace detail

using detail::eval_on_type;

TypeAlphabet type_alphabet(const TreeRegisterAutomaton& a) {
  TypeAlphabet ta;
  ta.types = enumerate_types((int)a.alphabet.size(), a.registers,
                             tf_constants(a.delta));
  for (size_t i = 0; i < ta.types.size(); ++i)
    ta.names.push_back("t" + std::to_string(i));
  return ta;
}

ParityTreeAutomaton correspondence_automaton(const TreeRegisterAutomaton& a,
                                             const TypeAlphabet& ta) {
  ParityTreeAutomaton p(ta.names, 0);
  int nq = (int)a.states.size();
  for (int q = 0; q < nq; ++q) p.add_state(a.rank[q]);
  for (int r : a.roots) p.add_root(r);
  for (size_t t = 0; t < ta.types.size(); ++t)
    for (int q = 0; q < nq; ++q)
      for (int ql = 0; ql < nq; ++ql)
        for (int qr = 0; qr < nq; ++qr)
          if (eval_on_type(a.delta, ta.types[t], a.registers, q, ql, qr))
            p.add_transition(q, (int)t, ql, qr);
  return p;
}

ParityTreeAutomaton consistency_automaton(const TreeRegisterAutomaton& a,
                                          const TypeAlphabet& ta) {
  ParityTreeAutomaton p(ta.names, 0);
  int nt = (int)ta.types.size();
  for (int t = 0; t < nt; ++t) {
    p.add_state(0);
    p.add_root(t);
  }
  // Bucket types by their self restriction so compatible children are found
  // by key instead of scanning all pairs of types.
  std::map<std::string, std::vector<int>> by_self;
  for (int t = 0; t < nt; ++t)
    by_self[restrict_to_position(ta.types[t].order, NodePos::Self).str() + "/" +
            std::to_string(ta.types[t].label[0])]
        .push_back(t);
  auto compatible = [&](int t, NodePos side) -> const std::vector<int>& {
    static const std::vector<int> none;
    std::string key =
        restrict_to_position(ta.types[t].order, side).str() + "/" +
        std::to_string(ta.types[t].label[(int)side]);
    auto it = by_self.find(key);
    return it == by_self.end() ? none : it->second;
  };
  for (int t = 0; t < nt; ++t)
    for (int tl : compatible(t, NodePos::Left))
      for (int tr : compatible(t, NodePos::Right))
        p.add_transition(t, t, tl, tr);
  return p;
}

bool tra_is_empty_enumerative(const TreeRegisterAutomaton& a) {
  TypeAlphabet ta = type_alphabet(a);
  ParityTreeAutomaton corr = correspondence_automaton(a, ta);
  ParityTreeAutomaton cons = consistency_automaton(a, ta);
  return pta_is_empty(intersect(corr, cons));
}

}  // namespace ordalia
