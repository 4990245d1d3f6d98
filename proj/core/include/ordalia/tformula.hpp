#pragma once

// Transition formulas of tree register automata: propositional formulas over
// atoms about a node and its two children — labels, automaton states, and
// order comparisons between register values, register extrema (sup/inf over
// language-descendants) and constants.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ordalia/ord.hpp"

namespace ordalia {

enum class NodePos { Self = 0, Left = 1, Right = 2 };

inline const char* pos_prefix(NodePos p) {
  return p == NodePos::Self ? "" : p == NodePos::Left ? "<:" : ">:";
}

// Comparison term: register value / extremum at a position, or a constant.
struct TTerm {
  enum class Kind { Reg, Sup, Inf, Const };
  Kind kind = Kind::Reg;
  NodePos pos = NodePos::Self;
  int reg = -1;
  ExtValue value;

  static TTerm mk_reg(NodePos p, int r) { return {Kind::Reg, p, r, {}}; }
  static TTerm mk_sup(NodePos p, int r) { return {Kind::Sup, p, r, {}}; }
  static TTerm mk_inf(NodePos p, int r) { return {Kind::Inf, p, r, {}}; }
  static TTerm mk_const(ExtValue v) { return {Kind::Const, NodePos::Self, -1, v}; }

  bool operator==(const TTerm& o) const {
    return kind == o.kind && pos == o.pos && reg == o.reg &&
           (kind != Kind::Const || value == o.value);
  }
};

struct TFormula;
using TF = std::shared_ptr<const TFormula>;

struct TFormula {
  enum class Kind { True, False, Label, State, Cmp, Not, And, Or };
  Kind kind = Kind::True;
  NodePos pos = NodePos::Self;  // Label/State
  int idx = -1;                 // letter or state index
  TTerm lhs, rhs;               // Cmp
  bool strict = true;           // Cmp: lhs < rhs when true, lhs = rhs else
  std::vector<TF> kids;         // Not (1), And/Or (n)
};

TF tf_true();
TF tf_false();
TF tf_label(NodePos pos, int letter);
TF tf_state(NodePos pos, int q);
TF tf_lt(TTerm a, TTerm b);
TF tf_eq(TTerm a, TTerm b);
TF tf_not(TF f);
TF tf_and(std::vector<TF> fs);  // empty -> true
TF tf_or(std::vector<TF> fs);   // empty -> false
TF tf_implies(TF a, TF b);

// Evaluation against a concrete node environment.  Extrema lookups are
// callbacks so callers decide how sup/inf over language-descendants are
// produced (concrete trees memoize them; abstract contexts reject them).
struct TFEnv {
  int label[3] = {-1, -1, -1};
  int state[3] = {-1, -1, -1};
  std::function<ExtValue(NodePos, int)> reg_value;
  std::function<ExtValue(NodePos, int)> sup_value;  // may be empty if unused
  std::function<ExtValue(NodePos, int)> inf_value;
};

ExtValue tf_term_value(const TTerm& t, const TFEnv& env);
bool tf_eval(const TF& f, const TFEnv& env);

// Structure queries.
bool tf_mentions_extrema(const TF& f);
// All comparison atoms, deduplicated structurally, in first-occurrence order.
std::vector<const TFormula*> tf_cmp_atoms(const TF& f);
// All constants appearing in comparison terms, deduplicated, ascending.
std::vector<ExtValue> tf_constants(const TF& f);

// Renders with the file-format syntax: `lbl(a)`, `lbl(<:a)`, `st(q2)`,
// `r < <:s`, `sup(r) = 0`, connectives `& | !` and parentheses.  Names are
// supplied by the caller.
std::string tf_str(const TF& f, const std::vector<std::string>& alphabet,
                   const std::vector<std::string>& registers,
                   const std::vector<std::string>& states);

}  // namespace ordalia
