#include "ordalia/finlang.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <optional>
#include <stdexcept>

namespace ordalia {

int Nfa::add_state() {
  accepting.push_back(false);
  arcs.emplace_back();
  eps.emplace_back();
  return nstates++;
}

void Nfa::add_arc(int src, int letter, int dst) { arcs[src].push_back({letter, dst}); }
void Nfa::add_eps(int src, int dst) { eps[src].push_back(dst); }

namespace {

void eps_close(const Nfa& n, std::vector<int>& set) {
  std::vector<bool> in(n.nstates, false);
  std::vector<int> stack = set;
  for (int s : set) in[s] = true;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int t : n.eps[s])
      if (!in[t]) {
        in[t] = true;
        set.push_back(t);
        stack.push_back(t);
      }
  }
  std::sort(set.begin(), set.end());
}

std::vector<int> subset_move(const Nfa& n, const std::vector<int>& set, int letter) {
  std::vector<int> out;
  for (int s : set)
    for (auto [l, t] : n.arcs[s])
      if (l == letter) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  eps_close(n, out);
  return out;
}

}  // namespace

bool Nfa::accepts(const std::vector<int>& word) const {
  std::vector<int> cur = initials;
  std::sort(cur.begin(), cur.end());
  cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
  eps_close(*this, cur);
  for (int letter : word) cur = subset_move(*this, cur, letter);
  for (int s : cur)
    if (accepting[s]) return true;
  return false;
}

Dfa::Dfa(std::vector<std::string> alphabet, int nstates, int initial, std::vector<int> delta,
         std::vector<bool> accepting)
    : alphabet_(std::move(alphabet)),
      nstates_(nstates),
      initial_(initial),
      delta_(std::move(delta)),
      accepting_(std::move(accepting)) {
  assert((int)delta_.size() == nstates_ * (int)alphabet_.size());
  assert((int)accepting_.size() == nstates_);
  assert(initial_ >= 0 && initial_ < nstates_);
}

int Dfa::run(int q, const std::vector<int>& word) const {
  for (int letter : word) q = step(q, letter);
  return q;
}

int Dfa::letter_index(const std::string& s) const {
  for (size_t i = 0; i < alphabet_.size(); ++i)
    if (alphabet_[i] == s) return (int)i;
  return -1;
}

bool Dfa::accepts(const std::vector<int>& word) const { return accepting_[run(initial_, word)]; }
bool Dfa::accepts_from(int q, const std::vector<int>& word) const { return accepting_[run(q, word)]; }

Dfa Dfa::with_initial(int q) const {
  Dfa out = *this;
  assert(q >= 0 && q < nstates_);
  out.initial_ = q;
  return out;
}

// ---- regular expressions ---------------------------------------------------

namespace {

struct Token {
  enum Kind { Sym, Plus, Star, LParen, RParen, Eps, Empty, End };
  Kind kind;
  int letter = -1;
  size_t pos = 0;
};

std::vector<Token> lex(const std::string& text, const std::vector<std::string>& alphabet) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '+' || c == '*' || c == '(' || c == ')') {
      Token::Kind k = c == '+' ? Token::Plus : c == '*' ? Token::Star
                                : c == '('  ? Token::LParen
                                            : Token::RParen;
      out.push_back({k, -1, i});
      ++i;
      continue;
    }
    // Longest alphabet symbol starting here; keywords only when no symbol fits.
    int best = -1;
    size_t best_len = 0;
    for (size_t s = 0; s < alphabet.size(); ++s) {
      const std::string& sym = alphabet[s];
      if (sym.size() > best_len && text.compare(i, sym.size(), sym) == 0) {
        best = (int)s;
        best_len = sym.size();
      }
    }
    if (best >= 0) {
      out.push_back({Token::Sym, best, i});
      i += best_len;
      continue;
    }
    if (text.compare(i, 5, "empty") == 0) {
      out.push_back({Token::Empty, -1, i});
      i += 5;
      continue;
    }
    if (text.compare(i, 3, "eps") == 0) {
      out.push_back({Token::Eps, -1, i});
      i += 3;
      continue;
    }
    throw std::invalid_argument("regex: no alphabet symbol matches at position " +
                                std::to_string(i) + " in '" + text + "'");
  }
  out.push_back({Token::End, -1, text.size()});
  return out;
}

// Thompson fragments: single start, single accept, glued with eps arcs.
struct Frag {
  int start, accept;
};

class RegexParser {
 public:
  RegexParser(const std::string& text, const std::vector<std::string>& alphabet)
      : toks_(lex(text, alphabet)) {
    nfa_.alphabet = alphabet;
  }

  Nfa parse() {
    Frag f = expr();
    if (peek().kind != Token::End)
      throw std::invalid_argument("regex: unexpected token at position " +
                                  std::to_string(peek().pos));
    nfa_.initials = {f.start};
    nfa_.accepting[f.accept] = true;
    return std::move(nfa_);
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  Token take() { return toks_[i_++]; }

  Frag expr() {
    Frag f = term();
    while (peek().kind == Token::Plus) {
      take();
      Frag g = term();
      Frag u = {nfa_.add_state(), nfa_.add_state()};
      nfa_.add_eps(u.start, f.start);
      nfa_.add_eps(u.start, g.start);
      nfa_.add_eps(f.accept, u.accept);
      nfa_.add_eps(g.accept, u.accept);
      f = u;
    }
    return f;
  }

  static bool starts_factor(Token::Kind k) {
    return k == Token::Sym || k == Token::LParen || k == Token::Eps || k == Token::Empty;
  }

  Frag term() {
    std::optional<Frag> acc;
    while (starts_factor(peek().kind)) {
      Frag f = factor();
      if (acc) {
        nfa_.add_eps(acc->accept, f.start);
        acc->accept = f.accept;
      } else {
        acc = f;
      }
    }
    if (!acc) return eps_frag();  // empty term, e.g. `()`
    return *acc;
  }

  Frag factor() {
    Frag f = base();
    while (peek().kind == Token::Star) {
      take();
      Frag s = {nfa_.add_state(), nfa_.add_state()};
      nfa_.add_eps(s.start, s.accept);
      nfa_.add_eps(s.start, f.start);
      nfa_.add_eps(f.accept, s.accept);
      nfa_.add_eps(f.accept, f.start);
      f = s;
    }
    return f;
  }

  Frag base() {
    Token t = take();
    switch (t.kind) {
      case Token::LParen: {
        Frag f = expr();
        if (take().kind != Token::RParen)
          throw std::invalid_argument("regex: missing ')' for '(' at position " +
                                      std::to_string(t.pos));
        return f;
      }
      case Token::Sym: {
        Frag f = {nfa_.add_state(), nfa_.add_state()};
        nfa_.add_arc(f.start, t.letter, f.accept);
        return f;
      }
      case Token::Eps:
        return eps_frag();
      case Token::Empty:
        return {nfa_.add_state(), nfa_.add_state()};
      default:
        throw std::invalid_argument("regex: unexpected token at position " +
                                    std::to_string(t.pos));
    }
  }

  Frag eps_frag() {
    Frag f = {nfa_.add_state(), nfa_.add_state()};
    nfa_.add_eps(f.start, f.accept);
    return f;
  }

  Nfa nfa_;
  std::vector<Token> toks_;
  size_t i_ = 0;
};

}  // namespace

Nfa parse_regex(const std::string& text, const std::vector<std::string>& alphabet) {
  return RegexParser(text, alphabet).parse();
}

Dfa determinize(const Nfa& n) {
  const int nl = (int)n.alphabet.size();
  std::vector<int> start = n.initials;
  std::sort(start.begin(), start.end());
  start.erase(std::unique(start.begin(), start.end()), start.end());
  eps_close(n, start);

  std::map<std::vector<int>, int> id;
  std::vector<std::vector<int>> subsets;
  id[start] = 0;
  subsets.push_back(start);
  std::vector<int> delta;
  for (size_t q = 0; q < subsets.size(); ++q) {
    for (int l = 0; l < nl; ++l) {
      std::vector<int> img = subset_move(n, subsets[q], l);
      auto [it, fresh] = id.emplace(img, (int)subsets.size());
      if (fresh) subsets.push_back(img);
      delta.push_back(it->second);
    }
  }
  std::vector<bool> acc(subsets.size(), false);
  for (size_t q = 0; q < subsets.size(); ++q)
    for (int s : subsets[q])
      if (n.accepting[s]) acc[q] = true;
  return Dfa(n.alphabet, (int)subsets.size(), 0, std::move(delta), std::move(acc));
}

Dfa residual(const Dfa& dfa, const std::string& letter) {
  int l = dfa.letter_index(letter);
  if (l < 0) throw std::invalid_argument("residual: unknown letter '" + letter + "'");
  return dfa.with_initial(dfa.step(dfa.initial(), l));
}

Dfa right_quotient(const Dfa& dfa, const std::string& letter) {
  int l = dfa.letter_index(letter);
  if (l < 0) throw std::invalid_argument("right_quotient: unknown letter '" + letter + "'");
  const int nl = dfa.nletters();
  std::vector<int> delta(dfa.nstates() * nl);
  std::vector<bool> acc(dfa.nstates());
  for (int q = 0; q < dfa.nstates(); ++q) {
    for (int k = 0; k < nl; ++k) delta[q * nl + k] = dfa.step(q, k);
    acc[q] = dfa.accepting(dfa.step(q, l));
  }
  return Dfa(dfa.alphabet(), dfa.nstates(), dfa.initial(), std::move(delta), std::move(acc));
}

bool language_empty(const Dfa& dfa) {
  std::vector<bool> seen(dfa.nstates(), false);
  std::vector<int> stack = {dfa.initial()};
  seen[dfa.initial()] = true;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    if (dfa.accepting(q)) return false;
    for (int l = 0; l < dfa.nletters(); ++l) {
      int t = dfa.step(q, l);
      if (!seen[t]) {
        seen[t] = true;
        stack.push_back(t);
      }
    }
  }
  return true;
}

bool language_universal(const Dfa& dfa) {
  std::vector<bool> seen(dfa.nstates(), false);
  std::vector<int> stack = {dfa.initial()};
  seen[dfa.initial()] = true;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    if (!dfa.accepting(q)) return false;
    for (int l = 0; l < dfa.nletters(); ++l) {
      int t = dfa.step(q, l);
      if (!seen[t]) {
        seen[t] = true;
        stack.push_back(t);
      }
    }
  }
  return true;
}

bool language_equivalent(const Dfa& a, const Dfa& b) {
  assert(a.alphabet() == b.alphabet());
  std::map<std::pair<int, int>, bool> seen;
  std::vector<std::pair<int, int>> stack = {{a.initial(), b.initial()}};
  seen[stack[0]] = true;
  while (!stack.empty()) {
    auto [p, q] = stack.back();
    stack.pop_back();
    if (a.accepting(p) != b.accepting(q)) return false;
    for (int l = 0; l < a.nletters(); ++l) {
      std::pair<int, int> t = {a.step(p, l), b.step(q, l)};
      if (!seen.count(t)) {
        seen[t] = true;
        stack.push_back(t);
      }
    }
  }
  return true;
}

std::vector<int> initial_tapes(const Dfa& dfa) {
  std::vector<int> out(dfa.nstates());
  for (int i = 0; i < dfa.nstates(); ++i) out[i] = i;
  return out;
}

std::vector<int> tape_step(const Dfa& dfa, const std::vector<int>& tapes, int letter) {
  const int m = dfa.nstates();
  assert((int)tapes.size() == m);
  std::vector<int> out(m, -1);
  std::vector<bool> used(m, false);
  for (int i = 0; i < m; ++i) {
    int s = dfa.step(tapes[i], letter);
    if (!used[s]) {
      used[s] = true;
      out[i] = s;
    }
  }
  std::vector<int> unused;
  for (int s = 0; s < m; ++s)
    if (!used[s]) unused.push_back(s);
  size_t k = 0;
  for (int i = 0; i < m; ++i)
    if (out[i] < 0) out[i] = unused[k++];
  return out;
}

}  // namespace ordalia
