#pragma once

// Tree register automata over rational data values: every node of a binary
// tree carries one value per register; a single transition formula constrains
// each node together with its two children, and a parity condition per state
// governs infinite branches.  No extremum terms here — those live in the
// sup/inf extension (trasi.hpp) and are compiled away into this model.

#include <optional>
#include <string>
#include <vector>

#include "ordalia/ord.hpp"
#include "ordalia/parity.hpp"
#include "ordalia/tformula.hpp"

namespace ordalia {

struct TreeRegisterAutomaton {
  std::vector<std::string> alphabet;
  std::vector<std::string> states;
  std::vector<std::string> registers;
  std::vector<int> roots;  // states allowed at the root
  std::vector<int> rank;   // parity rank per state; max on a branch must be even
  TF delta = tf_true();
};

// A node type abstracts one node and its two children: the three labels plus
// the order type of the register values at the three positions, with declared
// constants pinned alongside.  Register variables are named with the child
// prefixes used by the transition-formula syntax: r, <:r, >:r.
struct NodeType {
  int label[3] = {-1, -1, -1};
  OrderType order;

  bool operator==(const NodeType& o) const {
    return label[0] == o.label[0] && label[1] == o.label[1] &&
           label[2] == o.label[2] && order == o.order;
  }
  bool operator<(const NodeType& o) const;
  std::string str(const std::vector<std::string>& alphabet) const;
};

std::string type_var_name(NodePos pos, const std::string& reg);

// All node types for the given signature: label triples crossed with the weak
// orders of the register variables at the three positions, each pinned
// against the supplied constants.  Sizes grow as the ordered Bell numbers, so
// callers keep register counts small; emptiness checking does not go through
// this enumeration.
std::vector<NodeType> enumerate_types(int alphabet_size,
                                      const std::vector<std::string>& registers,
                                      const std::vector<ExtValue>& constants);

// Whether a parent type can sit above a child type on the given side: labels
// must agree and the order the parent induces on the child's registers must
// match the order the child induces on its own.  Equivalent to the existence
// of a joint 7-node realization of parent and both children.
bool pair_consistent(const NodeType& parent, const NodeType& child, NodePos side,
                     const std::vector<std::string>& registers,
                     const std::vector<ExtValue>& constants);
bool is_consistent_triple(const NodeType& t, const NodeType& left,
                          const NodeType& right,
                          const std::vector<std::string>& registers,
                          const std::vector<ExtValue>& constants);

// Explicit reduction to parity tree automata over the type alphabet: the
// correspondence automaton runs the register automaton's states and checks
// the transition formula against each type; the consistency automaton is a
// safety automaton accepting exactly the locally consistent type trees.
struct TypeAlphabet {
  std::vector<NodeType> types;
  std::vector<std::string> names;  // one symbol per type
};

TypeAlphabet type_alphabet(const TreeRegisterAutomaton& a);
ParityTreeAutomaton correspondence_automaton(const TreeRegisterAutomaton& a,
                                             const TypeAlphabet& ta);
ParityTreeAutomaton consistency_automaton(const TreeRegisterAutomaton& a,
                                          const TypeAlphabet& ta);

// A satisfiability witness: a regular tree of node types together with an
// accepting state assignment — a blueprint from which concrete register
// values can be realized level by level.  The type alphabet holds only the
// types the witness uses.
struct TraWitness {
  TypeAlphabet alphabet;
  RegularTree types;        // letters index into alphabet.types
  std::vector<int> states;  // automaton state per tree node
};

// Removes atoms comparing the two children directly by snapshotting the
// left-child term in a fresh register of the parent.  Emptiness and witness
// search go through this rewrite; witnesses for an automaton with such atoms
// speak over the extended register set.
TreeRegisterAutomaton normalize_cross_atoms(const TreeRegisterAutomaton& a);

bool tra_is_empty(const TreeRegisterAutomaton& a);
std::optional<TraWitness> tra_witness(const TreeRegisterAutomaton& a);

// Independent re-validation of a witness: the transition formula holds at
// every node under its type, overlapping order restrictions agree along
// edges, the root state is accepting, and no reachable cycle has odd maximum
// rank.  Returns nothing when sound, else a description.
std::optional<std::string> check_witness(const TraWitness& w,
                                         const TreeRegisterAutomaton& a);

// Emptiness via the explicit type enumeration; exponential in the register
// count, kept for cross-checking the game-based route on small instances.
bool tra_is_empty_enumerative(const TreeRegisterAutomaton& a);

// Concrete values for the first k levels of a witness: node i of the heap
// layout gets one value per register, consistent with every node type along
// the prefix.  Values are anchored so declared constants appear as themselves.
std::vector<std::vector<ExtValue>> realize_prefix(const TraWitness& w,
                                                  const TreeRegisterAutomaton& a,
                                                  int depth);

}  // namespace ordalia
