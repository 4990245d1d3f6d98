#pragma once

// Tree register automata with sup/inf constraints, and the reduction chain
// that compiles the extremum terms away: normalize the transition formula,
// close the register languages under residuals, conjoin the extrema
// recurrences, and run the regular-certificate automaton in product.

#include <optional>
#include <string>
#include <vector>

#include "ordalia/finlang.hpp"
#include "ordalia/tformula.hpp"
#include "ordalia/tra.hpp"

namespace ordalia {

struct Trasi {
  std::vector<std::string> alphabet;
  std::vector<std::string> states;
  std::vector<std::string> registers;
  std::vector<int> inputs;    // indices of input registers (the tree's data)
  std::vector<Nfa> languages; // one per register, over `alphabet`
  std::vector<int> roots;
  std::vector<int> rank;
  TF delta = tf_true();
};

// Rewrites every atom comparing a left-child term with a right-child term:
// a fresh register snapshots the left-child value at the parent and the atom
// compares the snapshot with the right-child term instead.  Fresh registers
// get language {eps}; their extrema are never consulted.
Trasi normalize(const Trasi& a);

// Adds one register per residual language u⁻¹L(r) (one per reachable state of
// the determinized Dfa, initial state = r itself), value-aliased to r by a
// conjoined equality at every node.  Idempotent.
Trasi language_close(const Trasi& a);

// Positions of the residual registers of one base register, indexed by the
// states of the determinized language Dfa.
struct ResidualMap {
  Dfa dfa;                      // determinization of the register's language
  std::vector<int> reg_of_state;  // register index per dfa state
};
// base register index -> its residual map; identity rows for registers that
// are themselves residual copies.  Requires a language-closed automaton.
std::vector<ResidualMap> closure_map(const Trasi& closed);

// Extended register indexing used once extrema become plain registers:
// 0..n-1 the closed automaton's registers, n+i the sup copy of register i,
// 2n+i the inf copy.
int sup_reg(const Trasi& closed, int reg);
int inf_reg(const Trasi& closed, int reg);
std::vector<std::string> extended_register_names(const Trasi& closed);

// The per-label max/min recurrences tying each sup/inf copy to the residual
// copies at the children, with the node's own value included exactly when the
// register's language contains the empty word; empty languages pin the copies
// to -inf/+inf outright.  A formula over the extended indexing above.
TF extrema_consistency_constraints(const Trasi& closed);

// The certificate alphabet: the base letter plus the guessed witness labels
// (path-partition membership and one K± label), rendered as one product
// symbol per combination.
struct CertAlphabet {
  // component value lists; component 0 is the base letter
  std::vector<std::vector<std::string>> component_values;
  std::vector<std::string> symbols;  // cross product, component-major
  int index(const std::vector<int>& choice) const;
  std::vector<int> decode(int symbol) const;
};

// Builds the product alphabet for the given component value lists; symbol
// names join the component values with '|', component 0 outermost.
CertAlphabet make_cert_alphabet(std::vector<std::vector<std::string>> components);

// The alphabet certificate_automaton runs over: base letter, path-start flag
// ("-"/"X"), the K± label ("<reg>+<tape>"/"<reg>-<tape>") and the R± witness
// label ("<reg>+"/"<reg>-").
CertAlphabet certificate_alphabet(const Trasi& closed);

// The regular-certificate automaton: a TRA over the certificate alphabet and
// the extended registers (plus a target register per node) that accepts
// exactly the annotated pre-runs carrying a valid certificate — path
// partition hit infinitely often on every branch, cyclically scheduled K±
// labels consistent with the register tapes, constant target value per path
// attained at the path's largest node, and gap freedom against all register
// values at the node and its parent.  States are named `rXc2T0` / `nXc2T0` /
// `n-c2T0`: root flag r/n, path-start flag X/-, emitted-rank carry, tape
// combination index.
TreeRegisterAutomaton certificate_automaton(const Trasi& closed);

// Source-direction tags for the weak-diversity gadget: the register's value
// originates here, above, in the left subtree, or in the right subtree.
inline const std::vector<std::string> kDiversityTags = {"S", "^", "<", ">"};

// The local conditions making register assignments weakly diverse: every two
// registers holding equal values agree on their source tag, source tags stay
// consistent across tree edges, and the designated input register is its own
// source everywhere.  `tag_component[r]` names the alphabet component that
// carries register r's tag (its values must be kDiversityTags in order).
TF weak_diversity_constraints(const CertAlphabet& alph,
                              const std::vector<int>& tag_component,
                              const std::vector<std::string>& registers,
                              int input_reg);

// Full composition: normalize, close, conjoin recurrences and aliasing, and
// product with the certificate automaton; the result has no extremum terms
// and is nonempty iff the input is.
TreeRegisterAutomaton to_tra(const Trasi& a);

bool trasi_is_empty(const Trasi& a);
std::optional<TraWitness> trasi_witness(const Trasi& a);

}  // namespace ordalia
