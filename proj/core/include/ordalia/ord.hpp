#pragma once

// Ordered data domain: exact rationals extended with -inf/+inf, order types
// (weak orders with optional infinity pinning), and realization of order
// constraint systems over a dense complete order.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ordalia {

// Exact rational, kept in lowest terms with positive denominator.
class Rat {
 public:
  Rat() = default;
  Rat(long long n) : num_(n), den_(1) {}
  Rat(long long n, long long d);

  long long num() const { return num_; }
  long long den() const { return den_; }

  Rat operator+(const Rat& o) const;
  Rat operator-(const Rat& o) const;
  Rat operator*(const Rat& o) const;
  static Rat midpoint(const Rat& a, const Rat& b);

  bool operator==(const Rat& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator<(const Rat& o) const;
  bool operator<=(const Rat& o) const { return *this == o || *this < o; }

  std::string str() const;

 private:
  long long num_ = 0;
  long long den_ = 1;
};

// Value in the extended domain: rationals are dense in it and every subset
// has a supremum/infimum, which is all the constructions rely on.
class ExtValue {
 public:
  enum class Kind { NegInf, Finite, PosInf };

  ExtValue() : kind_(Kind::Finite), val_(0) {}
  static ExtValue neg_inf() { return ExtValue(Kind::NegInf, Rat(0)); }
  static ExtValue pos_inf() { return ExtValue(Kind::PosInf, Rat(0)); }
  static ExtValue of(Rat r) { return ExtValue(Kind::Finite, r); }
  static ExtValue of_int(long long n) { return ExtValue(Kind::Finite, Rat(n)); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  const Rat& rat() const { return val_; }

  bool operator==(const ExtValue& o) const;
  bool operator<(const ExtValue& o) const;
  bool operator<=(const ExtValue& o) const { return *this == o || *this < o; }

  std::string str() const;
  // Accepts "-inf", "inf", "p", "p/q"; nullopt on malformed input.
  static std::optional<ExtValue> parse(const std::string& s);

 private:
  ExtValue(Kind k, Rat v) : kind_(k), val_(v) {}
  Kind kind_;
  Rat val_;
};

ExtValue max_value(const ExtValue& a, const ExtValue& b);
ExtValue min_value(const ExtValue& a, const ExtValue& b);

// Weak order on a finite set of named variables: an ordered partition into
// blocks of equal value, optionally pinning the first block to -inf and/or
// the last to +inf.  Blocks are kept sorted internally, so equality of two
// OrderTypes is structural equality.
struct OrderType {
  std::vector<std::vector<std::string>> blocks;
  bool neg_pinned = false;
  bool pos_pinned = false;

  int block_of(const std::string& var) const;  // -1 when absent
  bool defines(const std::string& var) const { return block_of(var) >= 0; }
  bool less(const std::string& a, const std::string& b) const;
  bool eq(const std::string& a, const std::string& b) const;
  void canonicalize();  // sorts names inside each block
  std::string str() const;

  bool operator==(const OrderType& o) const = default;
  bool operator<(const OrderType& o) const;  // arbitrary total order, for maps
};

// Terms and atoms of order constraint systems handed to realize().
struct OrdTerm {
  enum class Kind { Var, NegInf, PosInf };
  Kind kind = Kind::Var;
  std::string name;

  static OrdTerm var(std::string n) { return {Kind::Var, std::move(n)}; }
  static OrdTerm neg_inf() { return {Kind::NegInf, {}}; }
  static OrdTerm pos_inf() { return {Kind::PosInf, {}}; }
};

struct OrdAtom {
  OrdTerm lhs;
  bool strict = true;  // true: lhs < rhs, false: lhs = rhs
  OrdTerm rhs;

  static OrdAtom lt(OrdTerm a, OrdTerm b) { return {std::move(a), true, std::move(b)}; }
  static OrdAtom eq(OrdTerm a, OrdTerm b) { return {std::move(a), false, std::move(b)}; }
};

// Satisfying assignment for a constraint set, or nullopt if none exists.
// Canonical: finite variables receive the integers 0..k, distinct classes
// receiving distinct integers in a deterministic topological order.
std::optional<std::map<std::string, ExtValue>> realize(const std::vector<OrdAtom>& atoms);

// As realize(), but the anchored variables are forced to their given values
// and the remaining classes are placed around them by midpoint insertion.
// Returns nullopt if the constraints plus anchors are unsatisfiable.
std::optional<std::map<std::string, ExtValue>> realize_with_anchors(
    const std::vector<OrdAtom>& atoms, const std::map<std::string, ExtValue>& anchors);

// Order type of a concrete assignment: blocks ordered by value, first/last
// pinned when the value is -inf/+inf.
OrderType order_type_of(const std::map<std::string, ExtValue>& assignment);

// ---- indexed fast path ----------------------------------------------------
//
// Hot loops (type-triple consistency, game move expansion) run over small
// integer-indexed systems.  Variable ids are 0..nvars-1; the two pseudo-ids
// below denote the infinities.

constexpr int kNegInfId = -1;
constexpr int kPosInfId = -2;

struct IdxAtom {
  int lhs = 0;
  int rhs = 0;
  bool strict = true;

  static IdxAtom lt(int a, int b) { return {a, b, true}; }
  static IdxAtom eq(int a, int b) { return {a, b, false}; }
};

// Reusable scratch space; one instance per thread.
class RealizeScratch {
 public:
  // Satisfiability of the indexed system.
  bool satisfiable(int nvars, const std::vector<IdxAtom>& atoms);
  // Full solve; per-variable values in canonical integer form.
  std::optional<std::vector<ExtValue>> solve(int nvars, const std::vector<IdxAtom>& atoms);

 private:
  bool run(int nvars, const std::vector<IdxAtom>& atoms, bool want_values,
           std::vector<ExtValue>* out);
  int find(int x);
  std::vector<int> uf_;
  std::vector<int> indeg_;
  std::vector<int> level_;
  std::vector<int> order_;
  std::vector<std::pair<int, int>> edges_;
};

}  // namespace ordalia
