#pragma once

// Finite automata over finite alphabets: regular-expression parsing,
// determinization, residual languages, and the run-tree tape construction.
// Alphabet letters are arbitrary strings; words are sequences of letter
// indices into the declared alphabet.

#include <string>
#include <vector>

namespace ordalia {

struct Nfa {
  std::vector<std::string> alphabet;
  int nstates = 0;
  std::vector<int> initials;
  std::vector<bool> accepting;
  std::vector<std::vector<std::pair<int, int>>> arcs;  // per state: (letter, dst)
  std::vector<std::vector<int>> eps;                   // per state: dst

  int add_state();
  void add_arc(int src, int letter, int dst);
  void add_eps(int src, int dst);
  bool accepts(const std::vector<int>& word) const;  // subset simulation
};

// Deterministic, complete automaton.  States are 0..nstates-1; determinize()
// numbers them canonically (breadth-first over subsets, letters in declared
// order), which is also the fixed state order used to refill tapes.
class Dfa {
 public:
  Dfa(std::vector<std::string> alphabet, int nstates, int initial, std::vector<int> delta,
      std::vector<bool> accepting);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  int nletters() const { return (int)alphabet_.size(); }
  int nstates() const { return nstates_; }
  int initial() const { return initial_; }
  bool accepting(int q) const { return accepting_[q]; }
  int step(int q, int letter) const { return delta_[q * (int)alphabet_.size() + letter]; }
  int run(int q, const std::vector<int>& word) const;
  int letter_index(const std::string& s) const;  // -1 when unknown
  bool accepts(const std::vector<int>& word) const;
  bool accepts_from(int q, const std::vector<int>& word) const;

  Dfa with_initial(int q) const;

 private:
  std::vector<std::string> alphabet_;
  int nstates_ = 0;
  int initial_ = 0;
  std::vector<int> delta_;  // nstates x nletters, row-major
  std::vector<bool> accepting_;
};

// Parses a regular expression over the declared alphabet.  Grammar: union
// `+`, concatenation by juxtaposition, Kleene star `*`, grouping `()`.  The
// empty group denotes the empty word; the keywords `eps` and `empty` (unless
// shadowed by an alphabet symbol) denote {eps} and the empty language.
// Symbols are matched longest-first and may not contain `+*()` or blanks.
// Throws std::invalid_argument on malformed input.
Nfa parse_regex(const std::string& text, const std::vector<std::string>& alphabet);

Dfa determinize(const Nfa& nfa);

// Language { x | letter x in L(dfa) }, realized by moving the initial state,
// so all residuals of one automaton range over its own state set.  Unknown
// letters are an input error (std::invalid_argument).
Dfa residual(const Dfa& dfa, const std::string& letter);

// Language { x | x letter in L(dfa) }: same transitions, accepting states
// are those stepping into an accepting state on the letter.
Dfa right_quotient(const Dfa& dfa, const std::string& letter);

bool language_empty(const Dfa& dfa);
bool language_universal(const Dfa& dfa);
bool language_equivalent(const Dfa& a, const Dfa& b);  // alphabets must agree

// Run-tree tapes: a tape vector is a permutation of the full state set, tape
// i carrying state tapes[i].  The root annotation lists states in increasing
// order; a step applies the transition function to every tape, keeps the
// smallest-index copy of every duplicated state, and refills the freed tapes
// with the unused states, both in increasing order.
std::vector<int> initial_tapes(const Dfa& dfa);
std::vector<int> tape_step(const Dfa& dfa, const std::vector<int>& tapes, int letter);

}  // namespace ordalia
