#include "ordalia/parity.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <set>
#include <stdexcept>

namespace ordalia {

int ParityGame::add_vertex(bool odd_owner, int priority) {
  verts.push_back({odd_owner, priority});
  succ.emplace_back();
  return (int)verts.size() - 1;
}

void ParityGame::ensure_total() {
  for (int v = 0; v < size(); ++v)
    if (succ[v].empty()) {
      verts[v].priority = verts[v].odd_owner ? 0 : 1;  // losing for the owner
      succ[v].push_back(v);
    }
}

namespace {

class Zielonka {
 public:
  explicit Zielonka(const ParityGame& g) : g_(g), n_(g.size()), pred_(n_), strat_(n_, -1) {
    for (int u = 0; u < n_; ++u) {
      assert(!g.succ[u].empty());
      for (int v : g.succ[u]) pred_[v].push_back(u);
    }
  }

  GameSolution solve() {
    std::vector<char> act(n_, 1), w0, w1;
    run(std::move(act), w0, w1);
    GameSolution sol;
    sol.winner.resize(n_);
    sol.strategy.assign(n_, -1);
    for (int v = 0; v < n_; ++v) {
      sol.winner[v] = w1[v] ? 1 : 0;
      if ((g_.verts[v].odd_owner ? 1 : 0) == sol.winner[v]) sol.strategy[v] = strat_[v];
    }
    return sol;
  }

 private:
  // Attractor for player p toward seeds within act; records the strategy of
  // p-owned vertices pulled in (seeds are left untouched).
  std::vector<char> attract(const std::vector<char>& act, const std::vector<char>& seed, int p) {
    std::vector<char> in(n_, 0);
    std::vector<int> cnt(n_, 0), queue;
    for (int v = 0; v < n_; ++v) {
      if (!act[v]) continue;
      if ((g_.verts[v].odd_owner ? 1 : 0) != p)
        for (int w : g_.succ[v])
          if (act[w]) ++cnt[v];
      if (seed[v]) {
        in[v] = 1;
        queue.push_back(v);
      }
    }
    for (size_t i = 0; i < queue.size(); ++i) {
      int v = queue[i];
      for (int u : pred_[v]) {
        if (!act[u] || in[u]) continue;
        if ((g_.verts[u].odd_owner ? 1 : 0) == p) {
          in[u] = 1;
          strat_[u] = v;
          queue.push_back(u);
        } else if (--cnt[u] == 0) {
          in[u] = 1;
          queue.push_back(u);
        }
      }
    }
    return in;
  }

  // Fills w0/w1 for the vertices of act.  The second Zielonka recursion is a
  // tail call, so the recursion depth is bounded by the priority count.
  void run(std::vector<char> act, std::vector<char>& w0, std::vector<char>& w1) {
    w0.assign(n_, 0);
    w1.assign(n_, 0);
    while (true) {
      int d = -1;
      for (int v = 0; v < n_; ++v)
        if (act[v]) d = std::max(d, g_.verts[v].priority);
      if (d < 0) return;
      const int p = d & 1;
      auto& wp = p == 0 ? w0 : w1;
      auto& wo = p == 0 ? w1 : w0;

      std::vector<char> seed(n_, 0);
      for (int v = 0; v < n_; ++v)
        if (act[v] && g_.verts[v].priority == d) seed[v] = 1;
      std::vector<char> A = attract(act, seed, p);
      std::vector<char> sub(n_, 0);
      for (int v = 0; v < n_; ++v) sub[v] = act[v] && !A[v];

      std::vector<char> s0, s1;
      run(std::move(sub), s0, s1);
      std::vector<char>& so = p == 0 ? s1 : s0;

      bool opponent_empty = true;
      for (int v = 0; v < n_; ++v)
        if (so[v]) {
          opponent_empty = false;
          break;
        }
      if (opponent_empty) {
        for (int v = 0; v < n_; ++v)
          if (act[v]) {
            wp[v] = 1;
            if (seed[v] && (g_.verts[v].odd_owner ? 1 : 0) == p)
              for (int w : g_.succ[v])
                if (act[w]) {
                  strat_[v] = w;
                  break;
                }
          }
        return;
      }
      std::vector<char> B = attract(act, so, 1 - p);
      for (int v = 0; v < n_; ++v)
        if (B[v]) {
          wo[v] = 1;
          act[v] = 0;
        }
    }
  }

  const ParityGame& g_;
  int n_;
  std::vector<std::vector<int>> pred_;
  std::vector<int> strat_;
};

}  // namespace

GameSolution solve_parity_game(const ParityGame& game) { return Zielonka(game).solve(); }

int RegularTree::add_node(int letter_idx, int l, int r) {
  letter.push_back(letter_idx);
  left.push_back(l);
  right.push_back(r);
  return (int)letter.size() - 1;
}

ParityTreeAutomaton::ParityTreeAutomaton(std::vector<std::string> alphabet, int nstates)
    : alphabet_(std::move(alphabet)), rank_(nstates, 0), trans_(nstates) {}

int ParityTreeAutomaton::add_state(int rank) {
  rank_.push_back(rank);
  trans_.emplace_back();
  return (int)rank_.size() - 1;
}

void ParityTreeAutomaton::add_transition(int q, int letter, int left, int right) {
  assert(letter >= 0 && letter < nletters());
  trans_[q][letter].push_back({left, right});
}

int ParityTreeAutomaton::max_rank() const {
  int m = 0;
  for (int r : rank_) m = std::max(m, r);
  return m;
}

int ParityTreeAutomaton::letter_index(const std::string& s) const {
  for (size_t i = 0; i < alphabet_.size(); ++i)
    if (alphabet_[i] == s) return (int)i;
  return -1;
}

const std::vector<std::pair<int, int>>& ParityTreeAutomaton::moves(int q, int letter) const {
  static const std::vector<std::pair<int, int>> none;
  auto it = trans_[q].find(letter);
  return it == trans_[q].end() ? none : it->second;
}

std::vector<int> ParityTreeAutomaton::enabled_letters(int q) const {
  std::vector<int> out;
  for (const auto& [l, moves] : trans_[q])
    if (!moves.empty()) out.push_back(l);
  return out;
}

long long ParityTreeAutomaton::transition_count() const {
  long long n = 0;
  for (const auto& m : trans_)
    for (const auto& [l, moves] : m) n += (long long)moves.size();
  return n;
}

// ---- emptiness -------------------------------------------------------------
//
// Game shape: position q for Automaton (Even) choosing a letter and a
// transition, intermediate position for Pathfinder (Odd) choosing a branch.
// Priorities are the state ranks; intermediates carry 0, which never raises a
// limsup.  Stuck Automaton positions are closed by ensure_total (self-loop of
// priority 1).

namespace {

struct EmptinessGame {
  ParityGame game;
  std::vector<std::array<int, 3>> choice;  // per intermediate: letter, left, right
  std::vector<int> choice_of_vertex;       // vertex -> index into choice, -1 for state vertices

  explicit EmptinessGame(const ParityTreeAutomaton& pta) {
    const int n = pta.nstates();
    for (int q = 0; q < n; ++q) {
      game.add_vertex(false, pta.rank(q));
      choice_of_vertex.push_back(-1);
    }
    for (int q = 0; q < n; ++q)
      for (int letter : pta.enabled_letters(q))
        for (auto [l, r] : pta.moves(q, letter)) {
          int v = game.add_vertex(true, 0);
          choice_of_vertex.push_back((int)choice.size());
          choice.push_back({letter, l, r});
          game.add_edge(q, v);
          game.add_edge(v, l);
          game.add_edge(v, r);
        }
    game.ensure_total();
  }
};

}  // namespace

std::optional<RegularTree> pta_witness(const ParityTreeAutomaton& pta) {
  EmptinessGame eg(pta);
  GameSolution sol = solve_parity_game(eg.game);
  int start = -1;
  for (int r : pta.roots())
    if (sol.winner[r] == 0) {
      start = r;
      break;
    }
  if (start < 0) return std::nullopt;

  RegularTree tree;
  tree.alphabet = pta.alphabet();
  std::vector<int> node_of(pta.nstates(), -1);
  std::vector<int> queue = {start};
  node_of[start] = tree.add_node(0, 0, 0);
  tree.root = node_of[start];
  for (size_t i = 0; i < queue.size(); ++i) {
    int q = queue[i];
    int mid = sol.strategy[q];
    assert(mid >= 0 && eg.choice_of_vertex[mid] >= 0);
    auto [letter, l, r] = eg.choice[eg.choice_of_vertex[mid]];
    for (int child : {l, r})
      if (node_of[child] < 0) {
        node_of[child] = tree.add_node(0, 0, 0);
        queue.push_back(child);
      }
    tree.letter[node_of[q]] = letter;
    tree.left[node_of[q]] = node_of[l];
    tree.right[node_of[q]] = node_of[r];
  }
  return tree;
}

bool pta_is_empty(const ParityTreeAutomaton& pta) {
  EmptinessGame eg(pta);
  GameSolution sol = solve_parity_game(eg.game);
  for (int r : pta.roots())
    if (sol.winner[r] == 0) return false;
  return true;
}

// ---- membership ------------------------------------------------------------

bool pta_accepts(const ParityTreeAutomaton& pta, const RegularTree& tree) {
  assert(pta.alphabet() == tree.alphabet);
  ParityGame game;
  std::map<std::pair<int, int>, int> vid;     // (tree node, state) -> vertex
  std::vector<std::pair<int, int>> queue;     // state vertices in creation order

  auto vertex = [&](int node, int q) {
    auto [it, fresh] = vid.emplace(std::make_pair(node, q), game.size());
    if (fresh) {
      game.add_vertex(false, pta.rank(q));
      queue.push_back({node, q});
    }
    return it->second;
  };

  std::vector<int> starts;
  for (int r : pta.roots()) starts.push_back(vertex(tree.root, r));
  for (size_t i = 0; i < queue.size(); ++i) {
    auto [node, q] = queue[i];
    int v = vid.at({node, q});
    for (auto [l, r] : pta.moves(q, tree.letter[node])) {
      int mid = game.add_vertex(true, 0);
      game.add_edge(v, mid);
      game.add_edge(mid, vertex(tree.left[node], l));
      game.add_edge(mid, vertex(tree.right[node], r));
    }
  }
  game.ensure_total();
  GameSolution sol = solve_parity_game(game);
  for (int s : starts)
    if (sol.winner[s] == 0) return true;
  return false;
}

// ---- intersection ----------------------------------------------------------

namespace {

std::vector<int> odd_ranks(const ParityTreeAutomaton& a) {
  std::set<int> s;
  for (int q = 0; q < a.nstates(); ++q)
    if (a.rank(q) % 2) s.insert(a.rank(q));
  return {s.begin(), s.end()};
}

// Plain product; rank of (qa,qb) supplied by the caller.
template <typename RankFn>
ParityTreeAutomaton plain_product(const ParityTreeAutomaton& a, const ParityTreeAutomaton& b,
                                  RankFn rank_of) {
  ParityTreeAutomaton out(a.alphabet(), 0);
  std::map<std::pair<int, int>, int> id;
  std::vector<std::pair<int, int>> queue;
  auto state = [&](int qa, int qb) {
    auto [it, fresh] = id.emplace(std::make_pair(qa, qb), out.nstates());
    if (fresh) {
      out.add_state(rank_of(qa, qb));
      queue.push_back({qa, qb});
    }
    return it->second;
  };
  for (int ra : a.roots())
    for (int rb : b.roots()) out.add_root(state(ra, rb));
  for (size_t i = 0; i < queue.size(); ++i) {
    auto [qa, qb] = queue[i];
    int q = state(qa, qb);
    for (int letter : a.enabled_letters(qa))
      for (auto [la, ra2] : a.moves(qa, letter))
        for (auto [lb, rb2] : b.moves(qb, letter))
          out.add_transition(q, letter, state(la, lb), state(ra2, rb2));
  }
  return out;
}

// Streett pairs for a max-parity condition: for every odd rank o, pair
// (E_o, F_o) with E_o = {rank = o}, F_o = {rank > o}; limsup even iff every
// infinitely-hit E_o comes with an infinitely-hit F_o.  The conjunction of
// the two sides' pairs is tracked by an index-appearance record: hit-F
// indices move to the front, and the emitted priority compares the deepest
// old positions of hit-E and hit-F indices.
class IarProduct {
 public:
  IarProduct(const ParityTreeAutomaton& a, const ParityTreeAutomaton& b)
      : a_(a), b_(b), oa_(odd_ranks(a)), ob_(odd_ranks(b)), k_((int)(oa_.size() + ob_.size())) {}

  ParityTreeAutomaton build() {
    ParityTreeAutomaton out(a_.alphabet(), 0);
    std::vector<int> identity(k_);
    for (int i = 0; i < k_; ++i) identity[i] = i;
    for (int ra : a_.roots())
      for (int rb : b_.roots()) out.add_root(state(out, ra, rb, identity));
    for (size_t i = 0; i < keys_.size(); ++i) {
      auto key = keys_[i];  // by value: keys_ grows below
      int q = id_.at(key);
      int qa = key[0], qb = key[1];
      std::vector<int> rec(key.begin() + 2, key.begin() + 2 + k_);
      for (int letter : a_.enabled_letters(qa))
        for (auto [la, ra2] : a_.moves(qa, letter))
          for (auto [lb, rb2] : b_.moves(qb, letter))
            out.add_transition(q, letter, state(out, la, lb, rec), state(out, ra2, rb2, rec));
    }
    return out;
  }

 private:
  int state(ParityTreeAutomaton& out, int qa, int qb, const std::vector<int>& record) {
    // Hits of the entered product state against every Streett pair.
    std::vector<char> ehit(k_, 0), fhit(k_, 0);
    for (size_t j = 0; j < oa_.size(); ++j) {
      if (a_.rank(qa) == oa_[j]) ehit[j] = 1;
      if (a_.rank(qa) > oa_[j]) fhit[j] = 1;
    }
    for (size_t j = 0; j < ob_.size(); ++j) {
      size_t jj = oa_.size() + j;
      if (b_.rank(qb) == ob_[j]) ehit[jj] = 1;
      if (b_.rank(qb) > ob_[j]) fhit[jj] = 1;
    }
    int e = -1, f = -1;
    for (int pos = 0; pos < k_; ++pos) {
      if (ehit[record[pos]]) e = pos;
      if (fhit[record[pos]]) f = pos;
    }
    int prio = e > f ? 2 * e + 1 : 2 * f + 2;
    std::vector<int> next;
    next.reserve(k_);
    for (int pos = 0; pos < k_; ++pos)
      if (fhit[record[pos]]) next.push_back(record[pos]);
    for (int pos = 0; pos < k_; ++pos)
      if (!fhit[record[pos]]) next.push_back(record[pos]);

    std::vector<int> key;
    key.reserve(2 + k_ + 1);
    key.push_back(qa);
    key.push_back(qb);
    key.insert(key.end(), next.begin(), next.end());
    key.push_back(prio);
    auto [it, fresh] = id_.emplace(key, -1);
    if (fresh) {
      it->second = out.add_state(prio);
      keys_.push_back(key);
    }
    return it->second;
  }

  const ParityTreeAutomaton& a_;
  const ParityTreeAutomaton& b_;
  std::vector<int> oa_, ob_;
  int k_;
  std::map<std::vector<int>, int> id_;
  std::vector<std::vector<int>> keys_;
};

}  // namespace

ParityTreeAutomaton intersect(const ParityTreeAutomaton& a, const ParityTreeAutomaton& b) {
  if (a.alphabet() != b.alphabet())
    throw std::invalid_argument("intersect: alphabets differ");
  bool a_safety = odd_ranks(a).empty(), b_safety = odd_ranks(b).empty();
  if (a_safety && b_safety) return plain_product(a, b, [](int, int) { return 0; });
  if (b_safety) return plain_product(a, b, [&](int qa, int) { return a.rank(qa); });
  if (a_safety) return plain_product(a, b, [&](int, int qb) { return b.rank(qb); });
  return IarProduct(a, b).build();
}

}  // namespace ordalia
