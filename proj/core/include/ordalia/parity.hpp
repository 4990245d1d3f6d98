#pragma once

// Parity games with positional strategies, nondeterministic parity tree
// automata over finite alphabets (acceptance: root state in the root set,
// limsup of ranks even on every branch), emptiness via games, intersection,
// and regular witness trees.

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ordalia {

// Max-parity game: Even wins a play iff the highest priority seen infinitely
// often is even.  Every vertex needs an outgoing edge before solving; call
// ensure_total() to close sinks with a self-loop losing for their owner.
struct ParityGame {
  struct Vertex {
    bool odd_owner = false;
    int priority = 0;
  };
  std::vector<Vertex> verts;
  std::vector<std::vector<int>> succ;

  int add_vertex(bool odd_owner, int priority);
  void add_edge(int u, int v) { succ[u].push_back(v); }
  int size() const { return (int)verts.size(); }
  void ensure_total();
};

struct GameSolution {
  std::vector<int> winner;    // per vertex: 0 = Even, 1 = Odd
  std::vector<int> strategy;  // successor choice where owner wins, else -1
};

GameSolution solve_parity_game(const ParityGame& game);

// Finite presentation of an infinite binary tree: per node-state a letter and
// the two successor node-states; the tree is its unfolding from the root.
struct RegularTree {
  std::vector<std::string> alphabet;
  int root = 0;
  std::vector<int> letter;
  std::vector<int> left;
  std::vector<int> right;

  int size() const { return (int)letter.size(); }
  int add_node(int letter_idx, int l, int r);
};

class ParityTreeAutomaton {
 public:
  ParityTreeAutomaton(std::vector<std::string> alphabet, int nstates);

  int add_state(int rank = 0);
  void set_rank(int q, int rank) { rank_[q] = rank; }
  void add_root(int q) { roots_.push_back(q); }
  void add_transition(int q, int letter, int left, int right);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  int nletters() const { return (int)alphabet_.size(); }
  int nstates() const { return (int)rank_.size(); }
  int rank(int q) const { return rank_[q]; }
  int max_rank() const;
  const std::vector<int>& roots() const { return roots_; }
  int letter_index(const std::string& s) const;  // -1 when unknown
  // Transitions of q on a letter; empty when none.
  const std::vector<std::pair<int, int>>& moves(int q, int letter) const;
  // Letters on which q has any transition, ascending.
  std::vector<int> enabled_letters(int q) const;
  long long transition_count() const;

 private:
  std::vector<std::string> alphabet_;
  std::vector<int> rank_;
  std::vector<int> roots_;
  std::vector<std::map<int, std::vector<std::pair<int, int>>>> trans_;
};

bool pta_is_empty(const ParityTreeAutomaton& pta);
// A tree accepted by the automaton, decoded from the Automaton player's
// positional strategy in the emptiness game; nullopt iff the language is
// empty.
std::optional<RegularTree> pta_witness(const ParityTreeAutomaton& pta);
// Membership of the unfolding of the given regular tree, decided by the
// acceptance game on the product.
bool pta_accepts(const ParityTreeAutomaton& pta, const RegularTree& tree);

// Language intersection.  Product construction; the two parity conditions are
// tracked as Streett pairs through an index-appearance record, except that a
// side without odd ranks (a safety condition) is absorbed into a plain
// product.  Alphabets must agree (std::invalid_argument).
ParityTreeAutomaton intersect(const ParityTreeAutomaton& a, const ParityTreeAutomaton& b);

}  // namespace ordalia
