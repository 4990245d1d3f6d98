#include "ordalia/ord.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ordalia {

namespace {

using i128 = __int128;

long long checked_ll(i128 v, const char* what) {
  if (v > i128(INT64_MAX) || v < i128(INT64_MIN))
    throw std::overflow_error(std::string("rational overflow in ") + what);
  return (long long)v;
}

}  // namespace

Rat::Rat(long long n, long long d) : num_(n), den_(d) {
  if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

static Rat make_rat_128(i128 n, i128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  i128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  return Rat(checked_ll(n, "normalize"), checked_ll(d, "normalize"));
}

Rat Rat::operator+(const Rat& o) const {
  return make_rat_128(i128(num_) * o.den_ + i128(o.num_) * den_, i128(den_) * o.den_);
}

Rat Rat::operator-(const Rat& o) const {
  return make_rat_128(i128(num_) * o.den_ - i128(o.num_) * den_, i128(den_) * o.den_);
}

Rat Rat::operator*(const Rat& o) const {
  return make_rat_128(i128(num_) * o.num_, i128(den_) * o.den_);
}

Rat Rat::midpoint(const Rat& a, const Rat& b) {
  return make_rat_128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                      i128(2) * a.den_ * b.den_);
}

bool Rat::operator<(const Rat& o) const {
  return i128(num_) * o.den_ < i128(o.num_) * den_;
}

std::string Rat::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

bool ExtValue::operator==(const ExtValue& o) const {
  if (kind_ != o.kind_) return false;
  if (kind_ != Kind::Finite) return true;
  return val_ == o.val_;
}

bool ExtValue::operator<(const ExtValue& o) const {
  if (kind_ == o.kind_) return kind_ == Kind::Finite && val_ < o.val_;
  if (kind_ == Kind::NegInf) return true;
  if (o.kind_ == Kind::PosInf) return true;
  return false;
}

std::string ExtValue::str() const {
  switch (kind_) {
    case Kind::NegInf: return "-inf";
    case Kind::PosInf: return "inf";
    default: return val_.str();
  }
}

std::optional<ExtValue> ExtValue::parse(const std::string& s) {
  if (s == "-inf") return neg_inf();
  if (s == "inf" || s == "+inf") return pos_inf();
  auto parse_ll = [](const std::string& t, long long& out) {
    if (t.empty()) return false;
    size_t pos = 0;
    try {
      out = std::stoll(t, &pos);
    } catch (...) {
      return false;
    }
    return pos == t.size();
  };
  auto slash = s.find('/');
  long long n = 0, d = 1;
  if (slash == std::string::npos) {
    if (!parse_ll(s, n)) return std::nullopt;
  } else {
    if (!parse_ll(s.substr(0, slash), n) || !parse_ll(s.substr(slash + 1), d) || d == 0)
      return std::nullopt;
  }
  return of(Rat(n, d));
}

ExtValue max_value(const ExtValue& a, const ExtValue& b) { return a < b ? b : a; }
ExtValue min_value(const ExtValue& a, const ExtValue& b) { return a < b ? a : b; }

int OrderType::block_of(const std::string& var) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    for (const auto& v : blocks[i])
      if (v == var) return (int)i;
  return -1;
}

bool OrderType::less(const std::string& a, const std::string& b) const {
  int ia = block_of(a), ib = block_of(b);
  return ia >= 0 && ib >= 0 && ia < ib;
}

bool OrderType::eq(const std::string& a, const std::string& b) const {
  int ia = block_of(a), ib = block_of(b);
  return ia >= 0 && ia == ib;
}

void OrderType::canonicalize() {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
}

std::string OrderType::str() const {
  std::string out;
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (i) out += " < ";
    out += "[";
    if (i == 0 && neg_pinned) out += "-inf: ";
    if (i + 1 == blocks.size() && pos_pinned) out += "+inf: ";
    for (size_t j = 0; j < blocks[i].size(); ++j) {
      if (j) out += " ";
      out += blocks[i][j];
    }
    out += "]";
  }
  return out;
}

bool OrderType::operator<(const OrderType& o) const {
  if (neg_pinned != o.neg_pinned) return neg_pinned < o.neg_pinned;
  if (pos_pinned != o.pos_pinned) return pos_pinned < o.pos_pinned;
  return blocks < o.blocks;
}

// ---- indexed realize -------------------------------------------------------

int RealizeScratch::find(int x) {
  while (uf_[x] != x) {
    uf_[x] = uf_[uf_[x]];
    x = uf_[x];
  }
  return x;
}

bool RealizeScratch::satisfiable(int nvars, const std::vector<IdxAtom>& atoms) {
  return run(nvars, atoms, false, nullptr);
}

std::optional<std::vector<ExtValue>> RealizeScratch::solve(int nvars,
                                                           const std::vector<IdxAtom>& atoms) {
  std::vector<ExtValue> out;
  if (!run(nvars, atoms, true, &out)) return std::nullopt;
  return out;
}

bool RealizeScratch::run(int nvars, const std::vector<IdxAtom>& atoms, bool want_values,
                         std::vector<ExtValue>* out) {
  const int NEG = nvars, POS = nvars + 1, total = nvars + 2;
  uf_.resize(total);
  for (int i = 0; i < total; ++i) uf_[i] = i;
  auto node = [&](int id) { return id == kNegInfId ? NEG : id == kPosInfId ? POS : id; };

  for (const auto& a : atoms) {
    if (a.strict) continue;
    int x = find(node(a.lhs)), y = find(node(a.rhs));
    if (x != y) uf_[std::max(x, y)] = std::min(x, y);
  }
  const int negr = find(NEG), posr = find(POS);
  if (negr == posr) return false;

  edges_.clear();
  for (const auto& a : atoms) {
    if (!a.strict) continue;
    int x = find(node(a.lhs)), y = find(node(a.rhs));
    if (x == y) return false;
    if (y == negr || x == posr) return false;  // below -inf / above +inf
    if (x == negr || y == posr) continue;      // always satisfiable
    edges_.push_back({x, y});
  }

  // Kahn over the finite classes; any leftover node sits on a strict cycle.
  level_.assign(total, -1);
  order_.clear();
  for (int i = 0; i < nvars; ++i) {
    int r = find(i);
    if (r != negr && r != posr && level_[r] < 0) {
      level_[r] = 0;
      order_.push_back(r);
    }
  }
  std::sort(order_.begin(), order_.end());
  indeg_.assign(total, 0);
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (auto& e : edges_) indeg_[e.second]++;

  // Deterministic: repeatedly take the smallest representative of indegree 0.
  std::vector<int> pending = order_;
  int assigned = 0;
  level_.assign(total, -1);
  while (true) {
    int pick = -1;
    for (int r : pending)
      if (level_[r] < 0 && indeg_[r] == 0) {
        pick = r;
        break;
      }
    if (pick < 0) break;
    level_[pick] = assigned++;
    for (auto& e : edges_)
      if (e.first == pick) indeg_[e.second]--;
  }
  if (assigned != (int)order_.size()) return false;

  if (want_values) {
    out->assign(nvars, ExtValue::of_int(0));
    for (int i = 0; i < nvars; ++i) {
      int r = find(i);
      if (r == negr)
        (*out)[i] = ExtValue::neg_inf();
      else if (r == posr)
        (*out)[i] = ExtValue::pos_inf();
      else
        (*out)[i] = ExtValue::of_int(level_[r]);
    }
  }
  return true;
}

// ---- string-keyed realize --------------------------------------------------

namespace {

struct NamedSystem {
  std::vector<std::string> vars;
  std::map<std::string, int> ids;
  std::vector<IdxAtom> atoms;

  int id_of_term(const OrdTerm& t) {
    if (t.kind == OrdTerm::Kind::NegInf) return kNegInfId;
    if (t.kind == OrdTerm::Kind::PosInf) return kPosInfId;
    auto it = ids.find(t.name);
    return it->second;
  }
};

NamedSystem index_atoms(const std::vector<OrdAtom>& atoms,
                        const std::vector<std::string>& extra_vars) {
  NamedSystem sys;
  std::set<std::string> names(extra_vars.begin(), extra_vars.end());
  for (const auto& a : atoms) {
    if (a.lhs.kind == OrdTerm::Kind::Var) names.insert(a.lhs.name);
    if (a.rhs.kind == OrdTerm::Kind::Var) names.insert(a.rhs.name);
  }
  sys.vars.assign(names.begin(), names.end());
  for (size_t i = 0; i < sys.vars.size(); ++i) sys.ids[sys.vars[i]] = (int)i;
  for (const auto& a : atoms)
    sys.atoms.push_back({sys.id_of_term(a.lhs), sys.id_of_term(a.rhs), a.strict});
  return sys;
}

}  // namespace

std::optional<std::map<std::string, ExtValue>> realize(const std::vector<OrdAtom>& atoms) {
  NamedSystem sys = index_atoms(atoms, {});
  RealizeScratch scratch;
  auto vals = scratch.solve((int)sys.vars.size(), sys.atoms);
  if (!vals) return std::nullopt;
  std::map<std::string, ExtValue> out;
  for (size_t i = 0; i < sys.vars.size(); ++i) out[sys.vars[i]] = (*vals)[i];
  return out;
}

std::optional<std::map<std::string, ExtValue>> realize_with_anchors(
    const std::vector<OrdAtom>& atoms, const std::map<std::string, ExtValue>& anchors) {
  std::vector<OrdAtom> all = atoms;
  std::vector<std::pair<std::string, Rat>> finite;
  std::vector<std::string> extra;
  for (const auto& [name, val] : anchors) {
    extra.push_back(name);
    if (val.is_neg_inf())
      all.push_back(OrdAtom::eq(OrdTerm::var(name), OrdTerm::neg_inf()));
    else if (val.is_pos_inf())
      all.push_back(OrdAtom::eq(OrdTerm::var(name), OrdTerm::pos_inf()));
    else
      finite.push_back({name, val.rat()});
  }
  // Anchor-to-anchor order is part of the system, so the solver levels agree
  // with the target values.
  for (size_t i = 0; i < finite.size(); ++i)
    for (size_t j = i + 1; j < finite.size(); ++j) {
      if (finite[i].second == finite[j].second)
        all.push_back(OrdAtom::eq(OrdTerm::var(finite[i].first), OrdTerm::var(finite[j].first)));
      else if (finite[i].second < finite[j].second)
        all.push_back(OrdAtom::lt(OrdTerm::var(finite[i].first), OrdTerm::var(finite[j].first)));
      else
        all.push_back(OrdAtom::lt(OrdTerm::var(finite[j].first), OrdTerm::var(finite[i].first)));
    }

  NamedSystem sys = index_atoms(all, extra);
  RealizeScratch scratch;
  auto vals = scratch.solve((int)sys.vars.size(), sys.atoms);
  if (!vals) return std::nullopt;

  // Integer levels -> values: anchored levels take their target, the rest are
  // spread by even subdivision between neighbours.
  std::map<long long, std::optional<Rat>> targets;  // level -> anchor value
  for (size_t i = 0; i < sys.vars.size(); ++i) {
    const auto& v = (*vals)[i];
    if (v.is_finite()) targets.emplace(v.rat().num(), std::nullopt);
  }
  for (const auto& [name, r] : finite) {
    const auto& v = (*vals)[sys.ids[name]];
    if (!v.is_finite()) return std::nullopt;  // anchored onto an infinity
    targets[v.rat().num()] = r;
  }

  std::vector<long long> levels;
  std::vector<std::optional<Rat>> anchor_at;
  for (auto& [lvl, t] : targets) {
    levels.push_back(lvl);
    anchor_at.push_back(t);
  }
  int n = (int)levels.size();
  std::vector<Rat> value_at(n, Rat(0));
  std::vector<int> anchor_idx;
  for (int i = 0; i < n; ++i)
    if (anchor_at[i]) anchor_idx.push_back(i);
  if (anchor_idx.empty()) {
    for (int i = 0; i < n; ++i) value_at[i] = Rat(i);
  } else {
    for (int k = 0; k < (int)anchor_idx.size(); ++k) value_at[anchor_idx[k]] = *anchor_at[anchor_idx[k]];
    int first = anchor_idx.front(), last = anchor_idx.back();
    for (int i = first - 1; i >= 0; --i) value_at[i] = value_at[i + 1] - Rat(1);
    for (int i = last + 1; i < n; ++i) value_at[i] = value_at[i - 1] + Rat(1);
    for (size_t k = 0; k + 1 < anchor_idx.size(); ++k) {
      int a = anchor_idx[k], b = anchor_idx[k + 1];
      int gap = b - a;
      for (int i = a + 1; i < b; ++i)
        value_at[i] = value_at[a] + (value_at[b] - value_at[a]) * Rat(i - a, gap);
    }
  }
  std::map<long long, Rat> remap;
  for (int i = 0; i < n; ++i) remap.emplace(levels[i], value_at[i]);

  std::map<std::string, ExtValue> out;
  for (size_t i = 0; i < sys.vars.size(); ++i) {
    const auto& v = (*vals)[i];
    out[sys.vars[i]] = v.is_finite() ? ExtValue::of(remap.at(v.rat().num())) : v;
  }
  return out;
}

OrderType order_type_of(const std::map<std::string, ExtValue>& assignment) {
  std::map<ExtValue, std::vector<std::string>> groups;
  for (const auto& [name, val] : assignment) groups[val].push_back(name);
  OrderType ot;
  for (auto& [val, names] : groups) {
    if (val.is_neg_inf()) ot.neg_pinned = true;
    if (val.is_pos_inf()) ot.pos_pinned = true;
    ot.blocks.push_back(names);
  }
  ot.canonicalize();
  return ot;
}

}  // namespace ordalia
