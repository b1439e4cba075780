#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "seqcalc/tr.hpp"

namespace seqcalc {

// Low-memory decision procedure: depth-first traversal of the implicit
// and/or tree over sequents, holding only the current branch.  Children
// are recomputed from a frame's sequent and a cursor, never stored, so
// the working set is the branch itself.  Conjunctive stages (inversions)
// short-circuit on a failing child, disjunctive stages (branching) on a
// succeeding one.

struct PspaceStats {
  bool derivable = false;
  long long nodes_visited = 0;
  int max_branch_length = 0;
  long long max_branch_size = 0;  // peak of the sum of #S over the branch
};

namespace detail {

struct PspaceRun {
  Mode mode;
  Signature sig;
  std::set<int> fixed_vars;
  PspaceStats stats;
  std::vector<const Sequent*> branch;
  std::vector<Sequent> branch_keys;  // canonical sequents, loop detection
  long long branch_size = 0;

  // Eigenvariables are reused across sibling subtrees: the smallest
  // indices absent from the current branch.  The verdict is invariant
  // under renaming, and the branch stays polynomially small.
  TrContext branch_ctx() {
    TrContext ctx;
    ctx.mode = mode;
    ctx.sig = &sig;
    return ctx;
  }

  EigenvariableLedger branch_ledger() {
    EigenvariableLedger led;
    led.reserve_at_least(1);  // index 0 stays reserved as the seed variable
    for (const Sequent* s : branch)
      for (int v : free_vars(*s)) led.avoid.insert(v);
    return led;
  }

  // The i-th child of s, recomputed on demand.  Empty optional past the
  // last child.  `conjunctive` is set from s's stage.
  std::optional<Sequent> nth_child(const Sequent& s, size_t i,
                                   bool& conjunctive) {
    EigenvariableLedger led = branch_ledger();
    TrContext ctx = branch_ctx();
    ctx.ledger = &led;
    if (auto pick = pick_invertible(s, ctx)) {
      conjunctive = true;
      Inversion inv = apply_inversion(s, pick->first, pick->second, ctx);
      if (i >= inv.uppers.size()) return std::nullopt;
      return inv.uppers[i];
    }
    conjunctive = false;
    Branching br = branch_rule(s, ctx);
    assert(!br.continued);
    if (i >= br.uppers.size()) return std::nullopt;
    return br.uppers[i].seq;
  }

  int eval(const Sequent& s) {
    branch.push_back(&s);
    branch_size += sequent_size(s);
    ++stats.nodes_visited;
    stats.max_branch_length =
        std::max(stats.max_branch_length, static_cast<int>(branch.size()));
    stats.max_branch_size = std::max(stats.max_branch_size, branch_size);
    int result;
    TrContext ctx = branch_ctx();
    if (is_axiom(s)) {
      result = 1;
    } else if (is_fully_analyzed(s, ctx)) {
      result = 0;
    } else if (Sequent key = canonical_key(s, fixed_vars);
               std::find(branch_keys.begin(), branch_keys.end(), key) !=
               branch_keys.end()) {
      // A sequent repeated along the branch is underivable here: a minimal
      // derivation never revisits a position (same cut as the tree search).
      result = 0;
    } else {
      branch_keys.push_back(std::move(key));
      bool conjunctive = true;
      result = -1;
      for (size_t i = 0;; ++i) {
        auto c = nth_child(s, i, conjunctive);
        if (!c) break;
        int v = eval(*c);
        result = result < 0 ? v : conjunctive ? std::min(result, v)
                                              : std::max(result, v);
        if (conjunctive ? result == 0 : result == 1) break;
      }
      assert(result >= 0 && "interior node has at least one child");
      branch_keys.pop_back();
    }
    branch_size -= sequent_size(s);
    branch.pop_back();
    return result;
  }
};

}  // namespace detail

inline PspaceStats decide_low_memory(const Sequent& input, Mode mode) {
  assert(mode != Mode::Full);
  detail::PspaceRun run;
  run.mode = mode;
  Sequent s0 = mark_all(input);
  run.sig = signature_of(s0);
  run.fixed_vars = free_vars(s0);
  run.fixed_vars.insert(0);
  run.stats.derivable = run.eval(s0) == 1;
  return run.stats;
}

}  // namespace seqcalc
