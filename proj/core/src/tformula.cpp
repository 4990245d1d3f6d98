#include "ordalia/tformula.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace ordalia {

namespace {

TF mk(TFormula f) { return std::make_shared<const TFormula>(std::move(f)); }

}  // namespace

TF tf_true() {
  static const TF t = mk({});
  return t;
}

TF tf_false() {
  static const TF f = [] {
    TFormula x;
    x.kind = TFormula::Kind::False;
    return mk(std::move(x));
  }();
  return f;
}

TF tf_label(NodePos pos, int letter) {
  TFormula x;
  x.kind = TFormula::Kind::Label;
  x.pos = pos;
  x.idx = letter;
  return mk(std::move(x));
}

TF tf_state(NodePos pos, int q) {
  TFormula x;
  x.kind = TFormula::Kind::State;
  x.pos = pos;
  x.idx = q;
  return mk(std::move(x));
}

TF tf_lt(TTerm a, TTerm b) {
  TFormula x;
  x.kind = TFormula::Kind::Cmp;
  x.lhs = a;
  x.rhs = b;
  x.strict = true;
  return mk(std::move(x));
}

TF tf_eq(TTerm a, TTerm b) {
  TFormula x;
  x.kind = TFormula::Kind::Cmp;
  x.lhs = a;
  x.rhs = b;
  x.strict = false;
  return mk(std::move(x));
}

TF tf_not(TF f) {
  if (f->kind == TFormula::Kind::True) return tf_false();
  if (f->kind == TFormula::Kind::False) return tf_true();
  if (f->kind == TFormula::Kind::Not) return f->kids[0];
  TFormula x;
  x.kind = TFormula::Kind::Not;
  x.kids = {std::move(f)};
  return mk(std::move(x));
}

TF tf_and(std::vector<TF> fs) {
  std::vector<TF> flat;
  for (auto& f : fs) {
    if (f->kind == TFormula::Kind::False) return tf_false();
    if (f->kind == TFormula::Kind::True) continue;
    if (f->kind == TFormula::Kind::And) {
      flat.insert(flat.end(), f->kids.begin(), f->kids.end());
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (flat.empty()) return tf_true();
  if (flat.size() == 1) return flat[0];
  TFormula x;
  x.kind = TFormula::Kind::And;
  x.kids = std::move(flat);
  return mk(std::move(x));
}

TF tf_or(std::vector<TF> fs) {
  std::vector<TF> flat;
  for (auto& f : fs) {
    if (f->kind == TFormula::Kind::True) return tf_true();
    if (f->kind == TFormula::Kind::False) continue;
    if (f->kind == TFormula::Kind::Or) {
      flat.insert(flat.end(), f->kids.begin(), f->kids.end());
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (flat.empty()) return tf_false();
  if (flat.size() == 1) return flat[0];
  TFormula x;
  x.kind = TFormula::Kind::Or;
  x.kids = std::move(flat);
  return mk(std::move(x));
}

TF tf_implies(TF a, TF b) { return tf_or({tf_not(std::move(a)), std::move(b)}); }

ExtValue tf_term_value(const TTerm& t, const TFEnv& env) {
  switch (t.kind) {
    case TTerm::Kind::Const:
      return t.value;
    case TTerm::Kind::Reg:
      return env.reg_value(t.pos, t.reg);
    case TTerm::Kind::Sup:
      if (!env.sup_value) throw std::logic_error("sup term in extrema-free context");
      return env.sup_value(t.pos, t.reg);
    case TTerm::Kind::Inf:
      if (!env.inf_value) throw std::logic_error("inf term in extrema-free context");
      return env.inf_value(t.pos, t.reg);
  }
  throw std::logic_error("bad term");
}

bool tf_eval(const TF& f, const TFEnv& env) {
  switch (f->kind) {
    case TFormula::Kind::True:
      return true;
    case TFormula::Kind::False:
      return false;
    case TFormula::Kind::Label:
      return env.label[static_cast<int>(f->pos)] == f->idx;
    case TFormula::Kind::State:
      return env.state[static_cast<int>(f->pos)] == f->idx;
    case TFormula::Kind::Cmp: {
      ExtValue a = tf_term_value(f->lhs, env);
      ExtValue b = tf_term_value(f->rhs, env);
      return f->strict ? a < b : a == b;
    }
    case TFormula::Kind::Not:
      return !tf_eval(f->kids[0], env);
    case TFormula::Kind::And:
      for (const auto& k : f->kids)
        if (!tf_eval(k, env)) return false;
      return true;
    case TFormula::Kind::Or:
      for (const auto& k : f->kids)
        if (tf_eval(k, env)) return true;
      return false;
  }
  throw std::logic_error("bad formula");
}

bool tf_mentions_extrema(const TF& f) {
  if (f->kind == TFormula::Kind::Cmp) {
    auto ext = [](const TTerm& t) {
      return t.kind == TTerm::Kind::Sup || t.kind == TTerm::Kind::Inf;
    };
    return ext(f->lhs) || ext(f->rhs);
  }
  for (const auto& k : f->kids)
    if (tf_mentions_extrema(k)) return true;
  return false;
}

namespace {

bool same_cmp(const TFormula& a, const TFormula& b) {
  return a.strict == b.strict && a.lhs == b.lhs && a.rhs == b.rhs;
}

void collect_cmps(const TF& f, std::vector<const TFormula*>& out) {
  if (f->kind == TFormula::Kind::Cmp) {
    for (const auto* p : out)
      if (same_cmp(*p, *f)) return;
    out.push_back(f.get());
    return;
  }
  for (const auto& k : f->kids) collect_cmps(k, out);
}

void collect_consts(const TF& f, std::vector<ExtValue>& out) {
  if (f->kind == TFormula::Kind::Cmp) {
    for (const TTerm* t : {&f->lhs, &f->rhs}) {
      if (t->kind != TTerm::Kind::Const) continue;
      if (std::find(out.begin(), out.end(), t->value) == out.end())
        out.push_back(t->value);
    }
    return;
  }
  for (const auto& k : f->kids) collect_consts(k, out);
}

}  // namespace

std::vector<const TFormula*> tf_cmp_atoms(const TF& f) {
  std::vector<const TFormula*> out;
  collect_cmps(f, out);
  return out;
}

std::vector<ExtValue> tf_constants(const TF& f) {
  std::vector<ExtValue> out;
  collect_consts(f, out);
  std::sort(out.begin(), out.end(), [](const ExtValue& a, const ExtValue& b) {
    return a < b;
  });
  return out;
}

namespace {

std::string term_str(const TTerm& t, const std::vector<std::string>& regs) {
  switch (t.kind) {
    case TTerm::Kind::Const:
      return t.value.str();
    case TTerm::Kind::Reg:
      return std::string(pos_prefix(t.pos)) + regs.at(t.reg);
    case TTerm::Kind::Sup:
      return "sup(" + std::string(pos_prefix(t.pos)) + regs.at(t.reg) + ")";
    case TTerm::Kind::Inf:
      return "inf(" + std::string(pos_prefix(t.pos)) + regs.at(t.reg) + ")";
  }
  return "?";
}

// Precedence: or < and < not < atom.
std::string render(const TF& f, const std::vector<std::string>& alphabet,
                   const std::vector<std::string>& regs,
                   const std::vector<std::string>& states, int parent_prec) {
  auto wrap = [&](int prec, std::string s) {
    if (prec < parent_prec) return "(" + std::move(s) + ")";
    return s;
  };
  switch (f->kind) {
    case TFormula::Kind::True:
      return "true";
    case TFormula::Kind::False:
      return "false";
    case TFormula::Kind::Label:
      return "lbl(" + std::string(pos_prefix(f->pos)) + alphabet.at(f->idx) + ")";
    case TFormula::Kind::State:
      return "st(" + std::string(pos_prefix(f->pos)) + states.at(f->idx) + ")";
    case TFormula::Kind::Cmp:
      return term_str(f->lhs, regs) + (f->strict ? " < " : " = ") +
             term_str(f->rhs, regs);
    case TFormula::Kind::Not:
      return "!" + render(f->kids[0], alphabet, regs, states, 3);
    case TFormula::Kind::And: {
      std::string s;
      for (size_t i = 0; i < f->kids.size(); ++i) {
        if (i) s += " & ";
        s += render(f->kids[i], alphabet, regs, states, 2);
      }
      return wrap(1, std::move(s));
    }
    case TFormula::Kind::Or: {
      std::string s;
      for (size_t i = 0; i < f->kids.size(); ++i) {
        if (i) s += " | ";
        s += render(f->kids[i], alphabet, regs, states, 1);
      }
      return wrap(0, std::move(s));
    }
  }
  return "?";
}

}  // namespace

std::string tf_str(const TF& f, const std::vector<std::string>& alphabet,
                   const std::vector<std::string>& registers,
                   const std::vector<std::string>& states) {
  return render(f, alphabet, registers, states, 0);
}

}  // namespace ordalia
