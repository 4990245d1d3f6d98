#pragma once

// Regular data trees: finite presentations of infinite annotated binary
// trees.  Every presentation state carries a label, one value per register,
// and its two successor states; unravelling from the root yields the tree.
// Runs of register automata are validated directly on the presentation.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ordalia/finlang.hpp"
#include "ordalia/ord.hpp"
#include "ordalia/tra.hpp"
#include "ordalia/trasi.hpp"

namespace ordalia {

struct RegularDataTree {
  std::vector<std::string> alphabet;
  std::vector<std::string> registers;
  std::vector<std::string> state_names;
  int root = 0;
  std::vector<int> label;                   // per presentation state
  std::vector<std::vector<ExtValue>> regs;  // [state][register]
  std::vector<int> left, right;
  std::vector<int> astate;  // automaton-state annotation, -1 when absent

  int nstates() const { return static_cast<int>(label.size()); }
  // Structural well-formedness; returns an error description or nothing.
  std::optional<std::string> validate() const;
};

// Explicit unfolding of the first k levels: 2^{k+1}-1 presentation-state ids
// in heap order (children of slot i at 2i+1, 2i+2).
std::vector<int> unfold_prefix(const RegularDataTree& t, int depth);

// Sup and inf of register r over the L-descendants of any node presented by
// `state`, where L is given by `dfa`.  Values are state-determined, so the
// extrema over the infinite descendant set equal max/min over the reachable
// accepting (tree-state, dfa-state) pairs; no reachable accepting pair gives
// (-inf, +inf).  The path word from v to w includes v's label and excludes
// w's; w = v itself counts iff the dfa accepts the empty word.
std::pair<ExtValue, ExtValue> regular_extrema(const RegularDataTree& t,
                                              int state, int reg,
                                              const Dfa& dfa);

// Validates an annotated presentation as an accepting run: annotation and
// register totality, root condition, the transition formula at every
// reachable state (extremum terms evaluated via regular_extrema), and parity
// (no reachable cycle whose maximum rank is odd).  Returns nothing on accept,
// else a description of the first violation in breadth-first state order.
std::optional<std::string> check_run(const Trasi& a, const RegularDataTree& t);
std::optional<std::string> check_run(const TreeRegisterAutomaton& a,
                                     const RegularDataTree& t);

}  // namespace ordalia
