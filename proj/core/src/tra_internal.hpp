#pragma once

// Shared helpers for the two emptiness routes: naming of order variables,
// constant pinning, and evaluation of transition formulas against abstract
// order information instead of concrete values.

#include <map>
#include <string>
#include <vector>

#include "ordalia/ord.hpp"
#include "ordalia/tformula.hpp"
#include "ordalia/tra.hpp"

namespace ordalia::detail {

inline std::string const_var_name(const ExtValue& v) { return "#" + v.str(); }

// Variable indexing for one transition frame: positions x registers first,
// then the finite constants; +-inf map to the realize sentinels.
struct FrameVars {
  int nregs = 0;
  std::vector<ExtValue> finite_consts;  // ascending
  bool has_neg = false, has_pos = false;

  explicit FrameVars(int nregs_, const std::vector<ExtValue>& consts)
      : nregs(nregs_) {
    for (const auto& c : consts) {
      if (c.is_neg_inf())
        has_neg = true;
      else if (c.is_pos_inf())
        has_pos = true;
      else
        finite_consts.push_back(c);
    }
  }
  int total_vars() const { return 3 * nregs + (int)finite_consts.size(); }
  int reg_var(NodePos pos, int reg) const {
    return (int)pos * nregs + reg;
  }
  int const_var(const ExtValue& c) const {
    if (c.is_neg_inf()) return kNegInfId;
    if (c.is_pos_inf()) return kPosInfId;
    for (size_t i = 0; i < finite_consts.size(); ++i)
      if (finite_consts[i] == c) return 3 * nregs + (int)i;
    return -100;  // caller guarantees membership
  }
  int term_var(const TTerm& t) const {
    if (t.kind == TTerm::Kind::Const) return const_var(t.value);
    return reg_var(t.pos, t.reg);  // Reg only; extrema never reach here
  }
  // Ordering atoms among the declared finite constants (and below +inf /
  // above -inf pins are implicit in the sentinels).
  std::vector<IdxAtom> const_atoms() const {
    std::vector<IdxAtom> out;
    for (size_t i = 0; i + 1 < finite_consts.size(); ++i)
      out.push_back(IdxAtom::lt(3 * nregs + (int)i, 3 * nregs + (int)i + 1));
    if (!finite_consts.empty()) {
      out.push_back(IdxAtom::lt(kNegInfId, 3 * nregs));
      out.push_back(IdxAtom::lt(3 * nregs + (int)finite_consts.size() - 1, kPosInfId));
    }
    return out;
  }
};

// Atoms pinning an OrderType over a single position's variables (plus the
// constants) into an indexed frame.  `pos` selects the register column the
// type's bare names refer to.
void order_type_atoms(const OrderType& t, const FrameVars& fv, NodePos pos,
                      const std::vector<std::string>& registers,
                      std::vector<IdxAtom>& out);

// Restriction of a node type's order to one position's registers (renamed to
// bare self names) plus the constants.
OrderType restrict_to_position(const OrderType& o, NodePos pos);

// Truth of the transition formula at a node whose abstraction is `t`, with
// the three states fixed.  Every comparison is decided by the type; extremum
// terms are rejected.
bool eval_on_type(const TF& f, const NodeType& t,
                  const std::vector<std::string>& registers, int q, int ql,
                  int qr);

// Splits atoms comparing left-child terms with right-child terms: each
// distinct left-child term gets a snapshot register equated to it at every
// node, and offending atoms compare the snapshot instead.  Returns the new
// formula and appends the snapshot names (derived from `hint`) to registers.
TF split_cross_atoms(const TF& f, std::vector<std::string>& registers,
                     const std::string& hint);

// Entailed-relation closure over a small variable set, including the two
// infinity sentinels; used for projections and consistency tests.
class RelClosure {
 public:
  RelClosure(int nvars, const std::vector<IdxAtom>& atoms);
  bool consistent() const { return consistent_; }
  bool leq(int u, int v) const { return leq_[slot(u)][slot(v)]; }
  bool lt(int u, int v) const { return lt_[slot(u)][slot(v)]; }
  bool eq(int u, int v) const { return leq(u, v) && leq(v, u); }

 private:
  int n_ = 0;
  bool consistent_ = true;
  std::vector<std::vector<char>> leq_, lt_;
  int slot(int v) const { return v == kNegInfId ? n_ : v == kPosInfId ? n_ + 1 : v; }
};

}  // namespace ordalia::detail
