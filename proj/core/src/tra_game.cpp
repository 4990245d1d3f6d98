#include <algorithm>
#include <cassert>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "ordalia/tra.hpp"
#include "tra_internal.hpp"

// Emptiness game, played on abstractions of single transition frames.  The
// automaton player sits at (state, label, total weak order of the node's
// registers against the constants), picks a way to satisfy the transition
// formula — which letters, states and order constraints the two children get —
// and the pathfinder picks the child to descend into.  Positionality of parity
// strategies turns a winning strategy into a regular tree of node types.
//
// Keeping the self order total is what makes the per-child constraint
// projections sound: once direct child-child comparisons are split away
// (normalize_cross_atoms) every entailment chain between the two children
// passes through a self variable or a constant, and a total self order
// collapses such chains into the two projections.  Independent extensions of
// the projections then stay jointly satisfiable.

namespace ordalia {

using detail::FrameVars;

TreeRegisterAutomaton normalize_cross_atoms(const TreeRegisterAutomaton& a) {
  TreeRegisterAutomaton out = a;
  out.delta = detail::split_cross_atoms(a.delta, out.registers, "w");
  return out;
}

namespace {

constexpr long long kMaxExtensions = 500000;  // order completions per position
constexpr int kMaxVertices = 4000000;

// Entailment closure over the variables of one frame plus the two infinity
// sentinels.  Two bits per cell: weak and strict reachability.  Small enough
// to copy per branching decision, which keeps the move search allocation-free
// on the hot path.
class Closure {
 public:
  Closure() = default;
  explicit Closure(int nvars) : n_(nvars), m_(nvars + 2), rel_(m_ * m_, 0) {
    for (int i = 0; i < m_; ++i) rel_[i * m_ + i] |= 1;
    for (int i = 0; i < m_; ++i) {
      rel_[n_ * m_ + i] |= 1;        // -inf weakly below everything
      rel_[i * m_ + n_ + 1] |= 1;    // everything weakly below +inf
    }
    insert(n_, n_ + 1, true);
  }

  bool consistent() const { return consistent_; }
  bool leq(int u, int v) const { return rel_[slot(u) * m_ + slot(v)] & 1; }
  bool lt(int u, int v) const { return (rel_[slot(u) * m_ + slot(v)] & 2) != 0; }
  bool eq(int u, int v) const { return leq(u, v) && leq(v, u); }

  void add(const IdxAtom& a) {
    if (a.strict)
      add_lt(a.lhs, a.rhs);
    else
      add_eq(a.lhs, a.rhs);
  }
  void add_lt(int u, int v) { insert(slot(u), slot(v), true); }
  void add_le(int u, int v) { insert(slot(u), slot(v), false); }
  void add_eq(int u, int v) {
    insert(slot(u), slot(v), false);
    insert(slot(v), slot(u), false);
  }

 private:
  int slot(int v) const { return v == kNegInfId ? n_ : v == kPosInfId ? n_ + 1 : v; }

  // One edge into an already closed relation: new paths are i <= a -> b <= j,
  // strict when any link is.
  void insert(int a, int b, bool strict) {
    if (!consistent_) return;
    for (int i = 0; i < m_; ++i) {
      uint8_t ia = rel_[i * m_ + a];
      if (!(ia & 1)) continue;
      for (int j = 0; j < m_; ++j) {
        uint8_t bj = rel_[b * m_ + j];
        if (!(bj & 1)) continue;
        uint8_t bits = 1;
        if (strict || (ia & 2) || (bj & 2)) bits |= 2;
        rel_[i * m_ + j] |= bits;
      }
    }
    for (int i = 0; i < m_; ++i)
      if (rel_[i * m_ + i] & 2) {
        consistent_ = false;
        return;
      }
  }

  int n_ = 0, m_ = 2;
  bool consistent_ = true;
  std::vector<uint8_t> rel_;
};

// Projection of a closure onto one position's registers plus the constants:
// the partial order a child inherits from its parent's move.
struct Proj {
  int m = 0;  // registers + finite constants + 2 sentinel slots
  std::vector<uint8_t> rel;
  std::string key;
};

Proj project(const Closure& c, const FrameVars& fv, NodePos pos) {
  int n = fv.nregs, nc = (int)fv.finite_consts.size();
  Proj p;
  p.m = n + nc + 2;
  auto gid = [&](int slot) {
    if (slot < n) return fv.reg_var(pos, slot);
    if (slot < n + nc) return 3 * fv.nregs + (slot - n);
    return slot == n + nc ? kNegInfId : kPosInfId;
  };
  p.rel.assign(p.m * p.m, 0);
  p.key.resize(p.m * p.m);
  for (int i = 0; i < p.m; ++i)
    for (int j = 0; j < p.m; ++j) {
      uint8_t code = 0;
      if (c.leq(gid(i), gid(j))) code |= 1;
      if (c.lt(gid(i), gid(j))) code |= 2;
      p.rel[i * p.m + j] = code;
      p.key[i * p.m + j] = (char)('0' + code);
    }
  return p;
}

// A conjunct of the transition formula that holds at every node of every run;
// instantiating it at the child positions tightens the projections before
// they are handed down.
struct UnitFact {
  int op;  // 0: a < b, 1: a = b, 2: a <= b
  TTerm a, b;
};

class GameBuilder {
 public:
  explicit GameBuilder(const TreeRegisterAutomaton& a)
      : a_(a),
        consts_(tf_constants(a.delta)),
        fv_((int)a.registers.size(), consts_) {
    collect_atoms(a_.delta);
    base_.root = compile_into(a_.delta, base_);
    mentioned_.assign(a_.alphabet.size(), false);
    for (const auto& la : lbl_atoms_)
      if (la.letter >= 0 && la.letter < (int)mentioned_.size())
        mentioned_[la.letter] = true;
    rep_free_letter_ = -1;
    for (size_t i = 0; i < mentioned_.size(); ++i)
      if (!mentioned_[i]) {
        rep_free_letter_ = (int)i;
        break;
      }
    collect_units();
  }

  void build() {
    start_ = new_vertex(false, 0, 0, 0);
    Closure c0(fv_.total_vars());
    for (const auto& at : fv_.const_atoms()) c0.add(at);
    apply_units(c0, NodePos::Self);
    Proj p0 = project(c0, fv_, NodePos::Self);
    std::vector<int> roots = a_.roots;
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    for (int q : roots)
      for (int s : any_letters())
        g_.add_edge(start_, v3s_[intern_v3(q, s, p0)].vertex);
    const bool stats = std::getenv("ORDALIA_GAME_STATS") != nullptr;
    long long done1 = 0, done3 = 0;
    while (!todo1_.empty() || !todo3_.empty()) {
      if (!todo3_.empty()) {
        int i = todo3_.back();
        todo3_.pop_back();
        expand_v3(i);
        ++done3;
      } else {
        int i = todo1_.back();
        todo1_.pop_back();
        expand_v1(i);
        ++done1;
      }
      if (stats && ((done1 + done3) & 0x3f) == 0)
        std::fprintf(stderr,
                     "game: v1=%zu v2=%zu v3=%zu leaves=%lld done1=%lld done3=%lld\n",
                     v1s_.size(), v2s_.size(), v3s_.size(), leaves_, done1, done3);
    }
    if (stats)
      std::fprintf(stderr, "game: final v1=%zu v2=%zu v3=%zu leaves=%lld vertices=%d\n",
                   v1s_.size(), v2s_.size(), v3s_.size(), leaves_, g_.size());
    g_.ensure_total();
  }

  GameSolution solve() { return solve_parity_game(g_); }

  int start() const { return start_; }

  TraWitness decode(const GameSolution& sol) {
    TraWitness w;
    std::map<NodeType, int> type_ids;
    RegularTree t;
    std::vector<int> nodeof(v1s_.size(), -1);
    std::function<int(int)> go = [&](int v1i) -> int {
      if (nodeof[v1i] >= 0) return nodeof[v1i];
      int id = (int)t.letter.size();
      t.letter.push_back(-1);
      t.left.push_back(-1);
      t.right.push_back(-1);
      w.states.push_back(v1s_[v1i].q);
      nodeof[v1i] = id;

      int v2vert = sol.strategy[v1s_[v1i].vertex];
      assert(v2vert >= 0 && vkind_[v2vert] == 2);
      const V2& m = v2s_[vidx_[v2vert]];
      auto pick = [&](const std::vector<std::pair<int, std::vector<IdxAtom>>>& opts,
                      int chooser) -> const std::pair<int, std::vector<IdxAtom>>& {
        int v3vert = sol.strategy[chooser];
        for (const auto& o : opts)
          if (v3s_[o.first].vertex == v3vert) return o;
        throw std::logic_error("strategy leaves the move family");
      };
      const auto& ol = pick(m.ls, m.lv);
      const auto& orr = pick(m.rs, m.rv);
      int v1l = vidx_[sol.strategy[v3s_[ol.first].vertex]];
      int v1r = vidx_[sol.strategy[v3s_[orr.first].vertex]];

      std::vector<IdxAtom> atoms = fv_.const_atoms();
      atoms.insert(atoms.end(), v1s_[v1i].tau_atoms.begin(), v1s_[v1i].tau_atoms.end());
      atoms.insert(atoms.end(), m.mixed.begin(), m.mixed.end());
      atoms.insert(atoms.end(), ol.second.begin(), ol.second.end());
      atoms.insert(atoms.end(), orr.second.begin(), orr.second.end());
      detail::order_type_atoms(v1s_[v1l].tau, fv_, NodePos::Left, a_.registers, atoms);
      detail::order_type_atoms(v1s_[v1r].tau, fv_, NodePos::Right, a_.registers, atoms);
      auto vals = scratch_.solve(fv_.total_vars(), atoms);
      if (!vals) throw std::logic_error("inconsistent move survived the game");

      std::map<std::string, ExtValue> asg;
      for (NodePos pos : {NodePos::Self, NodePos::Left, NodePos::Right})
        for (size_t r = 0; r < a_.registers.size(); ++r)
          asg[type_var_name(pos, a_.registers[r])] = (*vals)[fv_.reg_var(pos, (int)r)];
      for (size_t i = 0; i < fv_.finite_consts.size(); ++i)
        asg[detail::const_var_name(fv_.finite_consts[i])] =
            (*vals)[3 * fv_.nregs + (int)i];
      if (fv_.has_neg) asg["#-inf"] = ExtValue::neg_inf();
      if (fv_.has_pos) asg["#inf"] = ExtValue::pos_inf();

      NodeType nt;
      nt.label[0] = v1s_[v1i].sigma;
      nt.label[1] = v1s_[v1l].sigma;
      nt.label[2] = v1s_[v1r].sigma;
      nt.order = order_type_of(asg);
      auto [it, fresh] = type_ids.try_emplace(nt, (int)w.alphabet.types.size());
      if (fresh) w.alphabet.types.push_back(nt);
      t.letter[id] = it->second;

      t.left[id] = go(v1l);
      t.right[id] = go(v1r);
      return id;
    };
    int rootv3 = sol.strategy[start_];
    int rootv1 = vidx_[sol.strategy[rootv3]];
    t.root = go(rootv1);
    for (size_t i = 0; i < w.alphabet.types.size(); ++i)
      w.alphabet.names.push_back("t" + std::to_string(i));
    t.alphabet = w.alphabet.names;
    w.types = std::move(t);
    return w;
  }

 private:
  struct LblAtom {
    NodePos pos;
    int letter;
  };
  struct StAtom {
    NodePos pos;
    int state;
  };
  struct CmpAtom {
    int l, r;  // frame var ids, possibly sentinels
    bool strict;
  };
  struct V1 {
    int q, sigma, vertex;
    OrderType tau;
    std::vector<IdxAtom> tau_atoms;
  };
  // Flattened formula.  The move search re-reads the transition formula at
  // every branching decision; on composed automata the formula has thousands
  // of nodes, nearly all settled once the position's letter, state and order
  // are fixed.  Compiling to an index array and re-specializing per position
  // keeps the inner loop on the handful of atoms that are still open.
  enum class CK : uint8_t { False, True, Lbl, St, Cmp, Not, And, Or };
  struct CNode {
    CK kind;
    int atom = -1;       // Lbl/St/Cmp: index into the atom tables
    int kb = 0, ke = 0;  // Not/And/Or: range in kids
  };
  struct CForm {
    std::vector<CNode> nodes;
    std::vector<int> kids;
    int root = -1;
  };
  struct V3 {
    int q, sigma, vertex;
    Proj proj;
  };
  // A family of moves sharing one mixed-leaf assignment.  The children are
  // independent there, so the sets combine freely: the vertex belongs to the
  // opponent, who picks a side; the side vertices pick one option each.
  // Materializing the cross product as single-pair moves instead blows up
  // quadratically on composed automata.
  struct V2 {
    int vertex, lv, rv;
    std::vector<IdxAtom> mixed;
    std::vector<std::pair<int, std::vector<IdxAtom>>> ls, rs;  // v3, trail tail
  };

  // ---- construction of the atom tables --------------------------------------

  void collect_atoms(const TF& f) {
    if (atom_of_.count(f.get())) return;
    switch (f->kind) {
      case TFormula::Kind::Label: {
        auto [it, fresh] =
            lbl_key_.try_emplace({(int)f->pos, f->idx}, (int)lbl_atoms_.size());
        if (fresh) lbl_atoms_.push_back({f->pos, f->idx});
        atom_of_[f.get()] = it->second;
        return;
      }
      case TFormula::Kind::State: {
        auto [it, fresh] =
            st_key_.try_emplace({(int)f->pos, f->idx}, (int)st_atoms_.size());
        if (fresh) st_atoms_.push_back({f->pos, f->idx});
        atom_of_[f.get()] = it->second;
        return;
      }
      case TFormula::Kind::Cmp: {
        if (f->lhs.kind == TTerm::Kind::Sup || f->lhs.kind == TTerm::Kind::Inf ||
            f->rhs.kind == TTerm::Kind::Sup || f->rhs.kind == TTerm::Kind::Inf)
          throw std::invalid_argument("extremum term in register automaton");
        int l = fv_.term_var(f->lhs), r = fv_.term_var(f->rhs);
        int cl = l, cr = r;
        if (!f->strict && cl > cr) std::swap(cl, cr);  // a=b is symmetric
        auto [it, fresh] =
            cmp_key_.try_emplace(std::make_tuple(cl, cr, f->strict),
                                 (int)cmp_atoms_.size());
        if (fresh) cmp_atoms_.push_back({l, r, f->strict});
        atom_of_[f.get()] = it->second;
        return;
      }
      case TFormula::Kind::Not:
      case TFormula::Kind::And:
      case TFormula::Kind::Or:
        for (const auto& k : f->kids) collect_atoms(k);
        return;
      default:
        return;
    }
  }

  // Top-level comparison conjuncts hold at every node, so they may be
  // instantiated at the children to tighten projections.  (a = b) and (a < b)
  // come from plain conjuncts, (b <= a) from a negated strict one.
  void collect_units() {
    auto consider = [&](const TF& f) {
      if (f->kind == TFormula::Kind::Cmp) {
        if (f->lhs.kind == TTerm::Kind::Sup || f->lhs.kind == TTerm::Kind::Inf ||
            f->rhs.kind == TTerm::Kind::Sup || f->rhs.kind == TTerm::Kind::Inf)
          return;
        units_.push_back({f->strict ? 0 : 1, f->lhs, f->rhs});
      } else if (f->kind == TFormula::Kind::Not &&
                 f->kids[0]->kind == TFormula::Kind::Cmp &&
                 f->kids[0]->strict) {
        const auto& c = f->kids[0];
        if (c->lhs.kind == TTerm::Kind::Sup || c->lhs.kind == TTerm::Kind::Inf ||
            c->rhs.kind == TTerm::Kind::Sup || c->rhs.kind == TTerm::Kind::Inf)
          return;
        units_.push_back({2, c->rhs, c->lhs});
      }
    };
    if (a_.delta->kind == TFormula::Kind::And) {
      for (const auto& k : a_.delta->kids) consider(k);
    } else {
      consider(a_.delta);
    }
  }

  // Units re-read with the unit's Self meaning the given position.  Units
  // mentioning a child position cannot be shifted (they would speak about
  // grandchildren) and are skipped.
  void apply_units(Closure& c, NodePos pos) {
    auto shift = [&](const TTerm& t, int& var) {
      if (t.kind == TTerm::Kind::Const) {
        var = fv_.const_var(t.value);
        return true;
      }
      if (t.pos != NodePos::Self) return false;
      var = fv_.reg_var(pos, t.reg);
      return true;
    };
    for (const auto& u : units_) {
      int va, vb;
      if (!shift(u.a, va) || !shift(u.b, vb)) continue;
      if (u.op == 0)
        c.add_lt(va, vb);
      else if (u.op == 1)
        c.add_eq(va, vb);
      else
        c.add_le(va, vb);
    }
  }

  // ---- vertex interning ------------------------------------------------------

  int new_vertex(bool odd, int prio, int kind, int idx) {
    if (g_.size() >= kMaxVertices)
      throw std::runtime_error("emptiness game exceeds the vertex budget");
    int v = g_.add_vertex(odd, prio);
    vkind_.push_back(kind);
    vidx_.push_back(idx);
    return v;
  }

  int intern_v3(int q, int sigma, const Proj& p) {
    auto [it, fresh] =
        v3_ids_.try_emplace(std::make_tuple(q, sigma, p.key), (int)v3s_.size());
    if (fresh) {
      int idx = (int)v3s_.size();
      v3s_.push_back({q, sigma, -1, p});
      v3s_[idx].vertex = new_vertex(false, 0, 3, idx);
      todo3_.push_back(idx);
    }
    return it->second;
  }

  int intern_v1(int q, int sigma, const OrderType& tau) {
    auto [it, fresh] = v1_ids_.try_emplace(std::make_tuple(q, sigma, tau.str()),
                                           (int)v1s_.size());
    if (fresh) {
      int idx = (int)v1s_.size();
      v1s_.push_back({q, sigma, -1, tau, {}});
      detail::order_type_atoms(tau, fv_, NodePos::Self, a_.registers,
                               v1s_[idx].tau_atoms);
      v1s_[idx].vertex = new_vertex(false, a_.rank[q], 1, idx);
      todo1_.push_back(idx);
    }
    return it->second;
  }

  // ---- extension of a projection to total weak orders ------------------------

  void expand_v3(int i) {
    const V3 v = v3s_[i];
    const Proj& p = v.proj;
    int n = fv_.nregs, nc = (int)fv_.finite_consts.size();
    std::vector<int> slots;
    for (int s = 0; s < n + nc; ++s) slots.push_back(s);
    if (fv_.has_neg) slots.push_back(n + nc);
    if (fv_.has_pos) slots.push_back(n + nc + 1);

    auto rel = [&](int s, int t) { return p.rel[s * p.m + t]; };
    // Values outside the declared constants can never be pinned at an
    // infinity, so undeclared sentinel slots stay out of the blocks.
    for (int s : slots)
      if (s < n + nc) {
        assert(fv_.has_neg || !((rel(s, n + nc) & 1) && (rel(n + nc, s) & 1)));
        assert(fv_.has_pos ||
               !((rel(s, n + nc + 1) & 1) && (rel(n + nc + 1, s) & 1)));
      }

    // Equality classes over the included slots.
    std::vector<int> cls(p.m, -1);
    std::vector<std::vector<int>> members;
    for (int s : slots) {
      if (cls[s] >= 0) continue;
      int id = (int)members.size();
      members.push_back({});
      for (int t : slots)
        if (cls[t] < 0 && (rel(s, t) & 1) && (rel(t, s) & 1)) {
          cls[t] = id;
          members[id].push_back(t);
        }
    }
    int k = (int)members.size();
    if (k > 30)
      throw std::runtime_error("too many order classes for extension search");
    std::vector<uint32_t> pred(k, 0), strict(k, 0);
    for (int x = 0; x < k; ++x)
      for (int y = 0; y < k; ++y) {
        if (x == y) continue;
        uint8_t c = rel(members[x][0], members[y][0]);
        if (c & 1) pred[y] |= 1u << x;  // x below y: x may not come later
        if (c & 2) {
          strict[x] |= 1u << y;
          strict[y] |= 1u << x;
        }
      }

    auto slot_name = [&](int s) -> std::string {
      if (s < n) return a_.registers[s];
      if (s < n + nc) return detail::const_var_name(fv_.finite_consts[s - n]);
      return s == n + nc ? "#-inf" : "#inf";
    };

    long long count = 0;
    std::vector<uint32_t> chain;
    std::function<void(uint32_t)> rec = [&](uint32_t avail) {
      if (!avail) {
        if (++count > kMaxExtensions)
          throw std::runtime_error("order extension explosion at a game position");
        OrderType tau;
        tau.neg_pinned = fv_.has_neg;
        tau.pos_pinned = fv_.has_pos;
        for (uint32_t b : chain) {
          std::vector<std::string> names;
          for (int x = 0; x < k; ++x)
            if (b & (1u << x))
              for (int s : members[x]) names.push_back(slot_name(s));
          tau.blocks.push_back(std::move(names));
        }
        tau.canonicalize();
        g_.add_edge(v.vertex, v1s_[intern_v1(v.q, v.sigma, tau)].vertex);
        return;
      }
      for (uint32_t sub = avail;; sub = (sub - 1) & avail) {
        if (sub) {
          bool ok = true;
          for (int x = 0; x < k && ok; ++x)
            if (sub & (1u << x)) {
              if (pred[x] & avail & ~sub) ok = false;       // unplaced below x
              if (strict[x] & sub) ok = false;              // strict edge inside
            }
          if (ok) {
            chain.push_back(sub);
            rec(avail & ~sub);
            chain.pop_back();
          }
        }
        if (!sub) break;
      }
    };
    rec((1u << k) - 1);  // k == 0 emits the single empty order
  }

  // ---- move search at a total-order position ---------------------------------

  void expand_v1(int i) {
    const V1 v = v1s_[i];
    Closure c(fv_.total_vars());
    for (const auto& at : fv_.const_atoms()) c.add(at);
    for (const auto& at : v.tau_atoms) c.add(at);
    if (!c.consistent()) return;

    const CForm& f1 = spec1(v.q, v.sigma);
    lblA_.assign(lbl_atoms_.size(), -1);
    stA_.assign(st_atoms_.size(), -1);
    cmpA_.assign(cmp_atoms_.size(), -1);
    for (size_t j = 0; j < cmp_atoms_.size(); ++j) {
      const auto& ca = cmp_atoms_[j];
      if (ca.strict) {
        if (c.lt(ca.l, ca.r))
          cmpA_[j] = 1;
        else if (c.leq(ca.r, ca.l))
          cmpA_[j] = 0;
      } else {
        if (c.eq(ca.l, ca.r))
          cmpA_[j] = 1;
        else if (c.lt(ca.l, ca.r) || c.lt(ca.r, ca.l))
          cmpA_[j] = 0;
      }
    }
    // The order decides every comparison among the position's own registers
    // and the constants, so this second specialization leaves only atoms that
    // mention a child.
    CForm f2 = specialized(f1);

    // Conjuncts touching only one child are searched per child: with the self
    // order total and cross-child comparisons split away, the children only
    // interact through the mixed conjuncts, so any left completion pairs with
    // any right completion (entailment chains between them pass through the
    // totally ordered self variables and constants).
    std::vector<int> parts;
    if (f2.nodes[f2.root].kind == CK::And) {
      const CNode& r = f2.nodes[f2.root];
      for (int i = r.kb; i < r.ke; ++i) parts.push_back(f2.kids[i]);
    } else {
      parts.push_back(f2.root);
    }
    std::vector<int> pm, pl, pr;
    if (has_cross_cmp(f2, f2.root)) {
      pm = parts;  // a raw child-child comparison defeats the split
    } else {
      for (int p : parts) {
        int m = touch_mask(f2, p);
        if (m == 3)
          pm.push_back(p);
        else if (m == 2)
          pr.push_back(p);
        else
          pl.push_back(p);
      }
    }
    fm_ = conjunction_of(f2, pm);
    fl_ = conjunction_of(f2, pl);
    fr_ = conjunction_of(f2, pr);

    trail_.clear();
    moves_.clear();
    search(c, fm_, 0);

    for (auto& [key, grp] : moves_) {
      int idx = (int)v2s_.size();
      v2s_.push_back({-1, -1, -1, std::move(grp.mixed), std::move(grp.ls),
                      std::move(grp.rs)});
      V2& m = v2s_[idx];
      m.vertex = new_vertex(true, 0, 2, idx);
      m.lv = new_vertex(false, 0, 4, idx);
      m.rv = new_vertex(false, 0, 5, idx);
      g_.add_edge(v.vertex, m.vertex);
      g_.add_edge(m.vertex, m.lv);
      g_.add_edge(m.vertex, m.rv);
      for (const auto& [id, tr] : m.ls) g_.add_edge(m.lv, v3s_[id].vertex);
      for (const auto& [id, tr] : m.rs) g_.add_edge(m.rv, v3s_[id].vertex);
    }
  }

  int compile_into(const TF& f, CForm& out) {
    switch (f->kind) {
      case TFormula::Kind::True:
        out.nodes.push_back({CK::True});
        break;
      case TFormula::Kind::False:
        out.nodes.push_back({CK::False});
        break;
      case TFormula::Kind::Label:
        out.nodes.push_back({CK::Lbl, atom_of_.at(f.get())});
        break;
      case TFormula::Kind::State:
        out.nodes.push_back({CK::St, atom_of_.at(f.get())});
        break;
      case TFormula::Kind::Cmp:
        out.nodes.push_back({CK::Cmp, atom_of_.at(f.get())});
        break;
      case TFormula::Kind::Not:
      case TFormula::Kind::And:
      case TFormula::Kind::Or: {
        std::vector<int> ks;
        ks.reserve(f->kids.size());
        for (const auto& kid : f->kids) ks.push_back(compile_into(kid, out));
        CNode n;
        n.kind = f->kind == TFormula::Kind::Not  ? CK::Not
                 : f->kind == TFormula::Kind::And ? CK::And
                                                   : CK::Or;
        n.kb = (int)out.kids.size();
        out.kids.insert(out.kids.end(), ks.begin(), ks.end());
        n.ke = (int)out.kids.size();
        out.nodes.push_back(n);
        break;
      }
    }
    return (int)out.nodes.size() - 1;
  }

  int8_t atom_val(const CNode& n) const {
    return n.kind == CK::Lbl  ? lblA_[n.atom]
           : n.kind == CK::St ? stA_[n.atom]
                              : cmpA_[n.atom];
  }

  // Three-valued truth under the current assignment; records the first
  // undetermined atom of a subformula whose value is still open.
  int evalc(const CForm& f, int n, int* unk) {
    const CNode& nd = f.nodes[n];
    switch (nd.kind) {
      case CK::True:
        return 1;
      case CK::False:
        return 0;
      case CK::Lbl:
      case CK::St:
      case CK::Cmp: {
        int val = atom_val(nd);
        if (val < 0 && *unk < 0) *unk = n;
        return val;
      }
      case CK::Not: {
        int val = evalc(f, f.kids[nd.kb], unk);
        return val < 0 ? -1 : 1 - val;
      }
      case CK::And: {
        int saved = *unk;
        bool open = false;
        for (int i = nd.kb; i < nd.ke; ++i) {
          int val = evalc(f, f.kids[i], unk);
          if (val == 0) {
            *unk = saved;
            return 0;
          }
          if (val < 0) open = true;
        }
        return open ? -1 : 1;
      }
      case CK::Or: {
        int saved = *unk;
        bool open = false;
        for (int i = nd.kb; i < nd.ke; ++i) {
          int val = evalc(f, f.kids[i], unk);
          if (val == 1) {
            *unk = saved;
            return 1;
          }
          if (val < 0) open = true;
        }
        return open ? -1 : 0;
      }
    }
    return 0;
  }

  // Copy of the formula with every decided atom folded away.  -1/-2 stand for
  // folded-true/folded-false so constant subtrees cost nothing downstream;
  // kept kids preserve evaluation order, which keeps the branching heuristic
  // of the search identical to running on the original formula.
  int spec_into(const CForm& in, int n, CForm& out) {
    const CNode& nd = in.nodes[n];
    switch (nd.kind) {
      case CK::True:
        return -1;
      case CK::False:
        return -2;
      case CK::Lbl:
      case CK::St:
      case CK::Cmp: {
        int val = atom_val(nd);
        if (val < 0) {
          out.nodes.push_back(nd);
          return (int)out.nodes.size() - 1;
        }
        return val ? -1 : -2;
      }
      case CK::Not: {
        int k = spec_into(in, in.kids[nd.kb], out);
        if (k == -1) return -2;
        if (k == -2) return -1;
        CNode m;
        m.kind = CK::Not;
        m.kb = (int)out.kids.size();
        out.kids.push_back(k);
        m.ke = (int)out.kids.size();
        out.nodes.push_back(m);
        return (int)out.nodes.size() - 1;
      }
      case CK::And:
      case CK::Or: {
        bool conj = nd.kind == CK::And;
        std::vector<int> ks;
        for (int i = nd.kb; i < nd.ke; ++i) {
          int k = spec_into(in, in.kids[i], out);
          if (k == (conj ? -2 : -1)) return k;
          if (k >= 0) ks.push_back(k);
        }
        if (ks.empty()) return conj ? -1 : -2;
        if (ks.size() == 1) return ks[0];
        CNode m;
        m.kind = nd.kind;
        m.kb = (int)out.kids.size();
        out.kids.insert(out.kids.end(), ks.begin(), ks.end());
        m.ke = (int)out.kids.size();
        out.nodes.push_back(m);
        return (int)out.nodes.size() - 1;
      }
    }
    return -2;
  }

  CForm specialized(const CForm& in) {
    CForm f;
    int r = spec_into(in, in.root, f);
    if (r < 0) {
      f.nodes.clear();
      f.kids.clear();
      f.nodes.push_back({r == -1 ? CK::True : CK::False});
      r = 0;
    }
    f.root = r;
    return f;
  }

  // Residual formula for a (state, letter) pair: the position's own token
  // atoms are constants there, and they decide most of the formula.
  const CForm& spec1(int q, int sigma) {
    auto [it, fresh] =
        spec1_ids_.try_emplace(std::make_pair(q, sigma), (int)spec1s_.size());
    if (fresh) {
      lblA_.assign(lbl_atoms_.size(), -1);
      stA_.assign(st_atoms_.size(), -1);
      cmpA_.assign(cmp_atoms_.size(), -1);
      for (size_t j = 0; j < lbl_atoms_.size(); ++j)
        if (lbl_atoms_[j].pos == NodePos::Self)
          lblA_[j] = lbl_atoms_[j].letter == sigma ? 1 : 0;
      for (size_t j = 0; j < st_atoms_.size(); ++j)
        if (st_atoms_[j].pos == NodePos::Self)
          stA_[j] = st_atoms_[j].state == q ? 1 : 0;
      spec1s_.push_back(specialized(base_));
    }
    return spec1s_[it->second];
  }

  // bit 0: mentions the left child, bit 1: the right child.
  int touch_mask(const CForm& f, int n) const {
    const CNode& nd = f.nodes[n];
    switch (nd.kind) {
      case CK::True:
      case CK::False:
        return 0;
      case CK::Lbl: {
        NodePos p = lbl_atoms_[nd.atom].pos;
        return p == NodePos::Left ? 1 : p == NodePos::Right ? 2 : 0;
      }
      case CK::St: {
        NodePos p = st_atoms_[nd.atom].pos;
        return p == NodePos::Left ? 1 : p == NodePos::Right ? 2 : 0;
      }
      case CK::Cmp: {
        auto vm = [&](int v) {
          if (fv_.nregs == 0 || v < 0 || v >= 3 * fv_.nregs) return 0;
          int p = v / fv_.nregs;
          return p == 1 ? 1 : p == 2 ? 2 : 0;
        };
        const auto& ca = cmp_atoms_[nd.atom];
        return vm(ca.l) | vm(ca.r);
      }
      case CK::Not:
      case CK::And:
      case CK::Or: {
        int m = 0;
        for (int i = nd.kb; i < nd.ke; ++i) m |= touch_mask(f, f.kids[i]);
        return m;
      }
    }
    return 0;
  }

  // Normalization is supposed to remove these; if one is ever present the
  // children are no longer independent and the search stays joint.
  bool has_cross_cmp(const CForm& f, int n) const {
    const CNode& nd = f.nodes[n];
    if (nd.kind == CK::Cmp) return touch_mask(f, n) == 3;
    if (nd.kind == CK::Not || nd.kind == CK::And || nd.kind == CK::Or)
      for (int i = nd.kb; i < nd.ke; ++i)
        if (has_cross_cmp(f, f.kids[i])) return true;
    return false;
  }

  int copy_into(const CForm& in, int n, CForm& out) {
    const CNode& nd = in.nodes[n];
    if (nd.kind == CK::Not || nd.kind == CK::And || nd.kind == CK::Or) {
      std::vector<int> ks;
      ks.reserve(nd.ke - nd.kb);
      for (int i = nd.kb; i < nd.ke; ++i)
        ks.push_back(copy_into(in, in.kids[i], out));
      CNode m;
      m.kind = nd.kind;
      m.kb = (int)out.kids.size();
      out.kids.insert(out.kids.end(), ks.begin(), ks.end());
      m.ke = (int)out.kids.size();
      out.nodes.push_back(m);
    } else {
      out.nodes.push_back(nd);
    }
    return (int)out.nodes.size() - 1;
  }

  CForm conjunction_of(const CForm& in, const std::vector<int>& sel) {
    CForm f;
    if (sel.empty()) {
      f.nodes.push_back({CK::True});
      f.root = 0;
      return f;
    }
    if (sel.size() == 1) {
      f.root = copy_into(in, sel[0], f);
      return f;
    }
    std::vector<int> ks;
    ks.reserve(sel.size());
    for (int p : sel) ks.push_back(copy_into(in, p, f));
    CNode m;
    m.kind = CK::And;
    m.kb = (int)f.kids.size();
    f.kids.insert(f.kids.end(), ks.begin(), ks.end());
    m.ke = (int)f.kids.size();
    f.nodes.push_back(m);
    f.root = (int)f.nodes.size() - 1;
    return f;
  }

  // mode 0 searches the mixed conjuncts and fans out into the two child
  // searches at each satisfying assignment; modes 1/2 search one child's
  // conjuncts and record that child's options.
  void search(const Closure& c, const CForm& f, int mode) {
    int unk = -1;
    int val = evalc(f, f.root, &unk);
    if (val == 0) return;
    if (val == 1) {
      if (mode == 0)
        run_sides(c);
      else
        side_leaf(c, mode);
      return;
    }
    assert(unk >= 0);
    const CNode& nd = f.nodes[unk];
    switch (nd.kind) {
      case CK::Lbl:
        branch_token(c, f, mode, lblA_, nd.atom, lbl_atoms_);
        return;
      case CK::St:
        branch_token(c, f, mode, stA_, nd.atom, st_atoms_);
        return;
      case CK::Cmp: {
        const auto& ca = cmp_atoms_[nd.atom];
        int id = nd.atom;
        auto attempt = [&](int8_t truth, IdxAtom at) {
          Closure c2 = c;
          c2.add(at);
          if (!c2.consistent()) return;
          cmpA_[id] = truth;
          trail_.push_back(at);
          search(c2, f, mode);
          trail_.pop_back();
          cmpA_[id] = -1;
        };
        if (ca.strict) {
          attempt(1, IdxAtom::lt(ca.l, ca.r));
          attempt(0, IdxAtom::lt(ca.r, ca.l));
          attempt(0, IdxAtom::eq(ca.l, ca.r));
        } else {
          attempt(1, IdxAtom::eq(ca.l, ca.r));
          attempt(0, IdxAtom::lt(ca.l, ca.r));
          attempt(0, IdxAtom::lt(ca.r, ca.l));
        }
        return;
      }
      default:
        return;
    }
  }

  // Branching for the functional token atoms (labels and states): choosing
  // one true forces every sibling at the same position false.
  template <typename Atoms>
  void branch_token(const Closure& c, const CForm& f, int mode,
                    std::vector<int8_t>& asg, int id, const Atoms& atoms) {
    NodePos pos = atoms[id].pos;
    bool clash = false;
    std::vector<int> flipped;
    for (size_t j = 0; j < atoms.size(); ++j) {
      if ((int)j == id || atoms[j].pos != pos) continue;
      if (asg[j] == 1) {
        clash = true;
        break;
      }
      if (asg[j] == -1) flipped.push_back((int)j);
    }
    if (!clash) {
      asg[id] = 1;
      for (int j : flipped) asg[j] = 0;
      search(c, f, mode);
      for (int j : flipped) asg[j] = -1;
      asg[id] = -1;
    }
    asg[id] = 0;
    search(c, f, mode);
    asg[id] = -1;
  }

  std::vector<int> any_letters() const {
    std::vector<int> out;
    for (size_t i = 0; i < mentioned_.size(); ++i)
      if (mentioned_[i]) out.push_back((int)i);
    if (rep_free_letter_ >= 0) out.push_back(rep_free_letter_);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Letters a child may carry under the current assignment.  Letters the
  // formula never mentions are interchangeable, so one representative stands
  // for the whole class.
  std::vector<int> letters_for(NodePos pos) const {
    int forced = -1;
    for (size_t j = 0; j < lbl_atoms_.size(); ++j)
      if (lbl_atoms_[j].pos == pos && lblA_[j] == 1) {
        assert(forced < 0);
        forced = lbl_atoms_[j].letter;
      }
    if (forced >= 0) return {forced};
    std::vector<int> out;
    for (size_t i = 0; i < mentioned_.size(); ++i) {
      if (!mentioned_[i]) continue;
      bool excluded = false;
      for (size_t j = 0; j < lbl_atoms_.size(); ++j)
        if (lbl_atoms_[j].pos == pos && lbl_atoms_[j].letter == (int)i &&
            lblA_[j] == 0)
          excluded = true;
      if (!excluded) out.push_back((int)i);
    }
    if (rep_free_letter_ >= 0) out.push_back(rep_free_letter_);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<int> states_for(NodePos pos) const {
    int forced = -1;
    for (size_t j = 0; j < st_atoms_.size(); ++j)
      if (st_atoms_[j].pos == pos && stA_[j] == 1) {
        assert(forced < 0);
        forced = st_atoms_[j].state;
      }
    if (forced >= 0) return {forced};
    std::vector<int> out;
    for (int q = 0; q < (int)a_.states.size(); ++q) {
      bool excluded = false;
      for (size_t j = 0; j < st_atoms_.size(); ++j)
        if (st_atoms_[j].pos == pos && st_atoms_[j].state == q && stA_[j] == 0)
          excluded = true;
      if (!excluded) out.push_back(q);
    }
    return out;
  }

  // One way a child can round off the formula: its candidate tokens, its
  // constraint projection, and the comparison decisions taken on the way.
  struct SideRec {
    std::vector<int> letters, states;
    Proj proj;
    std::vector<IdxAtom> trail;
    std::vector<int> v3s;
  };

  // A mixed leaf has fixed everything the children share, so the per-child
  // conjuncts are finished independently and every left completion pairs
  // with every right completion.
  void run_sides(const Closure& c) {
    ++leaves_;
    side_mark_ = trail_.size();
    lrecs_.clear();
    search(c, fl_, 1);
    if (lrecs_.empty()) return;
    rrecs_.clear();
    search(c, fr_, 2);
    if (rrecs_.empty()) return;

    for (auto& rec : lrecs_) fill_v3s(rec);
    for (auto& rec : rrecs_) fill_v3s(rec);
    auto options = [&](const std::vector<SideRec>& recs) {
      std::vector<std::pair<int, std::vector<IdxAtom>>> out;
      std::set<int> seen;
      for (const auto& rec : recs)
        for (int id : rec.v3s)
          if (seen.insert(id).second) out.emplace_back(id, rec.trail);
      return out;
    };
    Group g;
    g.ls = options(lrecs_);
    g.rs = options(rrecs_);
    std::pair<std::vector<int>, std::vector<int>> key;
    for (const auto& [id, tr] : g.ls) key.first.push_back(id);
    for (const auto& [id, tr] : g.rs) key.second.push_back(id);
    std::sort(key.first.begin(), key.first.end());
    std::sort(key.second.begin(), key.second.end());
    if (moves_.count(key)) return;
    g.mixed.assign(trail_.begin(), trail_.begin() + side_mark_);
    moves_.emplace(std::move(key), std::move(g));
  }

  void side_leaf(const Closure& c, int mode) {
    NodePos pos = mode == 1 ? NodePos::Left : NodePos::Right;
    SideRec rec;
    rec.letters = letters_for(pos);
    if (rec.letters.empty()) return;
    rec.states = states_for(pos);
    if (rec.states.empty()) return;
    Closure c2 = c;
    apply_units(c2, pos);
    if (!c2.consistent()) return;  // the child could not satisfy the formula
    rec.proj = project(c2, fv_, pos);
    rec.trail.assign(trail_.begin() + side_mark_, trail_.end());
    (mode == 1 ? lrecs_ : rrecs_).push_back(std::move(rec));
  }

  void fill_v3s(SideRec& rec) {
    if (!rec.v3s.empty()) return;
    for (int s : rec.letters)
      for (int q : rec.states) rec.v3s.push_back(intern_v3(q, s, rec.proj));
  }

  const TreeRegisterAutomaton& a_;
  std::vector<ExtValue> consts_;
  FrameVars fv_;

  std::vector<LblAtom> lbl_atoms_;
  std::vector<StAtom> st_atoms_;
  std::vector<CmpAtom> cmp_atoms_;
  std::map<std::pair<int, int>, int> lbl_key_, st_key_;
  std::map<std::tuple<int, int, bool>, int> cmp_key_;
  std::unordered_map<const TFormula*, int> atom_of_;
  std::vector<UnitFact> units_;
  std::vector<bool> mentioned_;
  int rep_free_letter_ = -1;

  ParityGame g_;
  int start_ = -1;
  std::vector<V1> v1s_;
  std::vector<V3> v3s_;
  std::vector<V2> v2s_;
  std::map<std::tuple<int, int, std::string>, int> v1_ids_, v3_ids_;
  std::vector<int> todo1_, todo3_;
  std::vector<int> vkind_, vidx_;

  CForm base_;
  std::map<std::pair<int, int>, int> spec1_ids_;
  std::vector<CForm> spec1s_;
  long long leaves_ = 0;

  CForm fm_, fl_, fr_;
  std::vector<SideRec> lrecs_, rrecs_;
  size_t side_mark_ = 0;

  struct Group {
    std::vector<IdxAtom> mixed;
    std::vector<std::pair<int, std::vector<IdxAtom>>> ls, rs;
  };

  std::vector<int8_t> lblA_, stA_, cmpA_;
  std::vector<IdxAtom> trail_;
  std::map<std::pair<std::vector<int>, std::vector<int>>, Group> moves_;
  RealizeScratch scratch_;
};

void validate_automaton(const TreeRegisterAutomaton& a) {
  if (a.states.empty()) throw std::invalid_argument("automaton without states");
  if (a.rank.size() != a.states.size())
    throw std::invalid_argument("rank vector size mismatch");
  for (int r : a.rank)
    if (r < 0) throw std::invalid_argument("negative parity rank");
  for (int q : a.roots)
    if (q < 0 || q >= (int)a.states.size())
      throw std::invalid_argument("root state out of range");
}

}  // namespace

bool tra_is_empty(const TreeRegisterAutomaton& a0) {
  validate_automaton(a0);
  TreeRegisterAutomaton a = normalize_cross_atoms(a0);
  GameBuilder b(a);
  b.build();
  GameSolution sol = b.solve();
  return sol.winner[b.start()] != 0;
}

std::optional<TraWitness> tra_witness(const TreeRegisterAutomaton& a0) {
  validate_automaton(a0);
  TreeRegisterAutomaton a = normalize_cross_atoms(a0);
  GameBuilder b(a);
  b.build();
  GameSolution sol = b.solve();
  if (sol.winner[b.start()] != 0) return std::nullopt;
  return b.decode(sol);
}

// ---- independent witness validation -----------------------------------------

namespace {

std::optional<std::string> type_shape_error(const NodeType& t, size_t idx,
                                            const TreeRegisterAutomaton& a,
                                            const std::vector<ExtValue>& consts) {
  auto tag = [&](const std::string& what) {
    return "type " + std::to_string(idx) + ": " + what;
  };
  for (int s = 0; s < 3; ++s)
    if (t.label[s] < 0 || t.label[s] >= (int)a.alphabet.size())
      return tag("label out of range");
  std::set<std::string> expect;
  for (NodePos pos : {NodePos::Self, NodePos::Left, NodePos::Right})
    for (const auto& r : a.registers) expect.insert(type_var_name(pos, r));
  for (const auto& c : consts) expect.insert(detail::const_var_name(c));
  std::set<std::string> have;
  for (const auto& b : t.order.blocks)
    for (const auto& name : b) {
      if (!have.insert(name).second) return tag("variable listed twice");
    }
  if (have != expect) return tag("wrong variable set");
  bool has_neg = !consts.empty() && consts.front().is_neg_inf();
  bool has_pos = !consts.empty() && consts.back().is_pos_inf();
  if (t.order.neg_pinned != has_neg || t.order.pos_pinned != has_pos)
    return tag("infinity pin mismatch");
  if (has_neg && t.order.block_of("#-inf") != 0)
    return tag("-inf not in the first block");
  if (has_pos && t.order.block_of("#inf") != (int)t.order.blocks.size() - 1)
    return tag("+inf not in the last block");
  const ExtValue* prev = nullptr;
  for (const auto& c : consts) {
    if (c.is_finite()) {
      int b = t.order.block_of(detail::const_var_name(c));
      if (has_neg && b == 0) return tag("finite constant pinned at -inf");
      if (has_pos && b == (int)t.order.blocks.size() - 1)
        return tag("finite constant pinned at +inf");
    }
    if (prev && !t.order.less(detail::const_var_name(*prev),
                              detail::const_var_name(c)))
      return tag("constants out of order");
    prev = &c;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> check_witness(const TraWitness& w,
                                         const TreeRegisterAutomaton& a0) {
  TreeRegisterAutomaton a = normalize_cross_atoms(a0);
  const RegularTree& t = w.types;
  int n = t.size();
  if (n == 0) return "witness has no nodes";
  if ((int)t.left.size() != n || (int)t.right.size() != n)
    return "child arrays sized differently from letters";
  if (t.root < 0 || t.root >= n) return "root out of range";
  if ((int)w.states.size() != n) return "one state per node required";
  if (w.alphabet.names.size() != w.alphabet.types.size())
    return "type alphabet names out of sync";
  if (t.alphabet != w.alphabet.names) return "tree alphabet differs from types";

  std::vector<ExtValue> consts = tf_constants(a.delta);
  for (size_t i = 0; i < w.alphabet.types.size(); ++i)
    if (auto err = type_shape_error(w.alphabet.types[i], i, a, consts))
      return err;

  for (int v = 0; v < n; ++v) {
    if (t.letter[v] < 0 || t.letter[v] >= (int)w.alphabet.types.size())
      return "node letter out of range";
    if (t.left[v] < 0 || t.left[v] >= n || t.right[v] < 0 || t.right[v] >= n)
      return "child index out of range";
    if (w.states[v] < 0 || w.states[v] >= (int)a.states.size())
      return "state out of range";
  }

  // Reachable part from the root.
  std::vector<char> seen(n, 0);
  std::vector<int> stack{t.root}, reach;
  seen[t.root] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    reach.push_back(v);
    for (int kid : {t.left[v], t.right[v]})
      if (!seen[kid]) {
        seen[kid] = 1;
        stack.push_back(kid);
      }
  }

  if (std::find(a.roots.begin(), a.roots.end(), w.states[t.root]) ==
      a.roots.end())
    return "root state is not a root of the automaton";

  for (int v : reach) {
    const NodeType& tv = w.alphabet.types[t.letter[v]];
    const NodeType& tl = w.alphabet.types[t.letter[t.left[v]]];
    const NodeType& tr = w.alphabet.types[t.letter[t.right[v]]];
    if (!detail::eval_on_type(a.delta, tv, a.registers, w.states[v],
                              w.states[t.left[v]], w.states[t.right[v]]))
      return "transition formula fails at node " + std::to_string(v);
    if (!pair_consistent(tv, tl, NodePos::Left, a.registers, consts))
      return "left restriction mismatch at node " + std::to_string(v);
    if (!pair_consistent(tv, tr, NodePos::Right, a.registers, consts))
      return "right restriction mismatch at node " + std::to_string(v);
  }

  // No cycle through the reachable part may have an odd maximum rank.
  std::vector<int> rk(n, -1);
  for (int v : reach) rk[v] = a.rank[w.states[v]];
  std::set<int> odd_ranks;
  for (int v : reach)
    if (rk[v] % 2 == 1) odd_ranks.insert(rk[v]);
  for (int c : odd_ranks) {
    for (int v : reach) {
      if (rk[v] != c) continue;
      // DFS through nodes of rank <= c, looking for a way back to v.
      std::vector<char> vis(n, 0);
      std::vector<int> st2{v};
      bool back = false;
      while (!st2.empty() && !back) {
        int u = st2.back();
        st2.pop_back();
        for (int kid : {t.left[u], t.right[u]}) {
          if (rk[kid] < 0 || rk[kid] > c) continue;
          if (kid == v) {
            back = true;
            break;
          }
          if (!vis[kid]) {
            vis[kid] = 1;
            st2.push_back(kid);
          }
        }
      }
      if (back)
        return "odd rank " + std::to_string(c) + " recurs on a cycle";
    }
  }
  return std::nullopt;
}

// ---- concrete values for a witness prefix ------------------------------------

std::vector<std::vector<ExtValue>> realize_prefix(const TraWitness& w,
                                                  const TreeRegisterAutomaton& a0,
                                                  int depth) {
  if (depth <= 0) return {};
  TreeRegisterAutomaton a = normalize_cross_atoms(a0);
  const RegularTree& t = w.types;
  int count = (1 << depth) - 1;
  std::vector<int> node(count);
  node[0] = t.root;
  for (int i = 0; i < count; ++i) {
    if (2 * i + 1 < count) node[2 * i + 1] = t.left[node[i]];
    if (2 * i + 2 < count) node[2 * i + 2] = t.right[node[i]];
  }

  auto inst = [](const std::string& name, int slot) -> std::string {
    if (!name.empty() && name[0] == '#') return name;
    if (name.compare(0, 2, "<:") == 0)
      return "n" + std::to_string(2 * slot + 1) + "." + name.substr(2);
    if (name.compare(0, 2, ">:") == 0)
      return "n" + std::to_string(2 * slot + 2) + "." + name.substr(2);
    return "n" + std::to_string(slot) + "." + name;
  };

  std::vector<OrdAtom> atoms;
  for (int i = 0; i < count; ++i) {
    const OrderType& o = w.alphabet.types[t.letter[node[i]]].order;
    OrdTerm prev;
    for (size_t b = 0; b < o.blocks.size(); ++b) {
      OrdTerm rep = OrdTerm::var(inst(o.blocks[b][0], i));
      for (size_t j = 1; j < o.blocks[b].size(); ++j)
        atoms.push_back(OrdAtom::eq(rep, OrdTerm::var(inst(o.blocks[b][j], i))));
      if (b == 0 && o.neg_pinned)
        atoms.push_back(OrdAtom::eq(rep, OrdTerm::neg_inf()));
      if (b + 1 == o.blocks.size() && o.pos_pinned)
        atoms.push_back(OrdAtom::eq(rep, OrdTerm::pos_inf()));
      if (b > 0) atoms.push_back(OrdAtom::lt(prev, rep));
      prev = rep;
    }
  }
  std::map<std::string, ExtValue> anchors;
  for (const auto& c : tf_constants(a.delta))
    anchors[detail::const_var_name(c)] = c;

  auto vals = realize_with_anchors(atoms, anchors);
  if (!vals) throw std::logic_error("witness prefix failed to realize");

  std::vector<std::vector<ExtValue>> out(count);
  for (int i = 0; i < count; ++i) {
    out[i].reserve(a.registers.size());
    for (const auto& r : a.registers) {
      auto it = vals->find("n" + std::to_string(i) + "." + r);
      out[i].push_back(it == vals->end() ? ExtValue::of_int(0) : it->second);
    }
  }
  return out;
}

}  // namespace ordalia
