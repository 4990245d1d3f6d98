#include "ordalia/regtree.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

namespace ordalia {

std::optional<std::string> RegularDataTree::validate() const {
  int n = nstates();
  if (n == 0) return "no states";
  auto bad = [&](const char* what, size_t got) {
    return std::string(what) + " count " + std::to_string(got) +
           " does not match " + std::to_string(n) + " states";
  };
  if (regs.size() != static_cast<size_t>(n)) return bad("register-row", regs.size());
  if (left.size() != static_cast<size_t>(n)) return bad("left-successor", left.size());
  if (right.size() != static_cast<size_t>(n)) return bad("right-successor", right.size());
  if (astate.size() != static_cast<size_t>(n)) return bad("annotation", astate.size());
  if (state_names.size() != static_cast<size_t>(n))
    return bad("state-name", state_names.size());
  if (root < 0 || root >= n) return "root out of range";
  for (int s = 0; s < n; ++s) {
    if (label[s] < 0 || label[s] >= static_cast<int>(alphabet.size()))
      return "state " + state_names[s] + ": label out of range";
    if (regs[s].size() != registers.size())
      return "state " + state_names[s] + ": register row incomplete";
    if (left[s] < 0 || left[s] >= n || right[s] < 0 || right[s] >= n)
      return "state " + state_names[s] + ": successor out of range";
  }
  return std::nullopt;
}

std::vector<int> unfold_prefix(const RegularDataTree& t, int depth) {
  if (depth < 0) throw std::invalid_argument("unfold_prefix: negative depth");
  size_t n = (size_t{2} << depth) - 1;
  std::vector<int> out(n);
  out[0] = t.root;
  for (size_t i = 0; 2 * i + 2 < n; ++i) {
    out[2 * i + 1] = t.left[out[i]];
    out[2 * i + 2] = t.right[out[i]];
  }
  return out;
}

std::pair<ExtValue, ExtValue> regular_extrema(const RegularDataTree& t,
                                              int state, int reg,
                                              const Dfa& dfa) {
  // Reachable (tree-state, dfa-state) pairs; the dfa consumes a node's label
  // on the way to its children, so arrival state accepting <=> path word in L.
  std::vector<int> lmap(t.alphabet.size());
  for (size_t i = 0; i < t.alphabet.size(); ++i)
    lmap[i] = dfa.letter_index(t.alphabet[i]);
  std::set<std::pair<int, int>> seen;
  std::deque<std::pair<int, int>> queue;
  auto push = [&](int s, int q) {
    if (seen.insert({s, q}).second) queue.push_back({s, q});
  };
  push(state, dfa.initial());
  bool any = false;
  ExtValue lo, hi;
  while (!queue.empty()) {
    auto [s, q] = queue.front();
    queue.pop_front();
    if (dfa.accepting(q)) {
      const ExtValue& v = t.regs[s][reg];
      if (!any) {
        lo = hi = v;
        any = true;
      } else {
        lo = min_value(lo, v);
        hi = max_value(hi, v);
      }
    }
    int q2 = dfa.step(q, lmap[t.label[s]]);
    push(t.left[s], q2);
    push(t.right[s], q2);
  }
  if (!any) return {ExtValue::neg_inf(), ExtValue::pos_inf()};
  return {hi, lo};
}

namespace {

// States in breadth-first order from the root; the transition formula only
// sees the (state, left, right) triple, which the presentation state fixes.
std::vector<int> reachable_states(const RegularDataTree& t) {
  std::vector<int> order;
  std::vector<char> seen(t.nstates(), 0);
  std::deque<int> queue{t.root};
  seen[t.root] = 1;
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    order.push_back(s);
    for (int c : {t.left[s], t.right[s]}) {
      if (!seen[c]) {
        seen[c] = 1;
        queue.push_back(c);
      }
    }
  }
  return order;
}

// Whether some reachable cycle has odd maximum rank: for each odd rank c,
// restrict to states of rank <= c and look for a cycle through a rank-c
// state.  Any infinite branch's limsup is the maximum of some such cycle.
std::optional<std::string> parity_violation(const RegularDataTree& t,
                                            const std::vector<int>& order,
                                            const std::vector<int>& rank) {
  std::set<int> ranks;
  for (int s : order) ranks.insert(rank[t.astate[s]]);
  for (int c : ranks) {
    if (c % 2 == 0) continue;
    std::vector<char> in(t.nstates(), 0);
    for (int s : order)
      if (rank[t.astate[s]] <= c) in[s] = 1;
    for (int s : order) {
      if (rank[t.astate[s]] != c) continue;
      // DFS within the restriction, looking for a way back to s.
      std::vector<char> seen(t.nstates(), 0);
      std::deque<int> stack{s};
      bool back = false;
      while (!stack.empty() && !back) {
        int u = stack.back();
        stack.pop_back();
        for (int v : {t.left[u], t.right[u]}) {
          if (!in[v]) continue;
          if (v == s) {
            back = true;
            break;
          }
          if (!seen[v]) {
            seen[v] = 1;
            stack.push_back(v);
          }
        }
      }
      if (back)
        return "state " + t.state_names[s] + ": odd rank " + std::to_string(c) +
               " recurs on a cycle";
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_run_impl(
    const std::vector<std::string>& alphabet,
    const std::vector<std::string>& registers,
    const std::vector<std::string>& state_names, const std::vector<int>& roots,
    const std::vector<int>& rank, const TF& delta, const Nfa* languages,
    const RegularDataTree& t) {
  if (auto err = t.validate()) return "malformed presentation: " + *err;
  if (t.alphabet != alphabet) return "alphabet mismatch";
  if (t.registers != registers) return "register mismatch";
  std::vector<int> order = reachable_states(t);
  for (int s : order) {
    if (t.astate[s] < 0 || t.astate[s] >= static_cast<int>(state_names.size()))
      return "state " + t.state_names[s] + ": missing state annotation";
  }
  if (std::find(roots.begin(), roots.end(), t.astate[t.root]) == roots.end())
    return "root state " + state_names[t.astate[t.root]] + " not accepting";

  bool uses_extrema = tf_mentions_extrema(delta);
  std::vector<Dfa> dfas;
  if (uses_extrema) {
    if (!languages) return "extremum terms but no register languages";
    for (size_t r = 0; r < registers.size(); ++r)
      dfas.push_back(determinize(languages[r]));
  }
  // Extrema are per (presentation state, register); memoized on demand.
  std::map<std::pair<int, int>, std::pair<ExtValue, ExtValue>> ext_memo;
  auto extrema_at = [&](int s, int reg) {
    auto it = ext_memo.find({s, reg});
    if (it == ext_memo.end())
      it = ext_memo.emplace(std::pair{s, reg}, regular_extrema(t, s, reg, dfas[reg]))
               .first;
    return it->second;
  };

  for (int s : order) {
    int child[3] = {s, t.left[s], t.right[s]};
    TFEnv env;
    for (int p = 0; p < 3; ++p) {
      env.label[p] = t.label[child[p]];
      env.state[p] = t.astate[child[p]];
    }
    env.reg_value = [&](NodePos p, int r) {
      return t.regs[child[static_cast<int>(p)]][r];
    };
    if (uses_extrema) {
      env.sup_value = [&](NodePos p, int r) {
        return extrema_at(child[static_cast<int>(p)], r).first;
      };
      env.inf_value = [&](NodePos p, int r) {
        return extrema_at(child[static_cast<int>(p)], r).second;
      };
    }
    if (!tf_eval(delta, env))
      return "state " + t.state_names[s] + ": transition formula fails (children " +
             t.state_names[t.left[s]] + ", " + t.state_names[t.right[s]] + ")";
  }
  return parity_violation(t, order, rank);
}

}  // namespace

std::optional<std::string> check_run(const Trasi& a, const RegularDataTree& t) {
  return check_run_impl(a.alphabet, a.registers, a.states, a.roots, a.rank,
                        a.delta, a.languages.data(), t);
}

std::optional<std::string> check_run(const TreeRegisterAutomaton& a,
                                     const RegularDataTree& t) {
  return check_run_impl(a.alphabet, a.registers, a.states, a.roots, a.rank,
                        a.delta, nullptr, t);
}

}  // namespace ordalia
