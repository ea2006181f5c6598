#include "hyrec/independence.hh"

#include <algorithm>

namespace hyrec {

namespace {

// frame flags: OPEN = dependents still allowed, LOCKED = independent-only
// suffix entered, DEAD = no valid split; the i bit tracks all-independent
enum FState { kOpenPure = 0, kOpenMixed = 1, kLocked = 2, kDead = 3 };

bool is_indep(const IndependenceSpec& spec, const VPAlphabet& sigma, LetterId a) {
  if (sigma.kind(a) != LetterKind::Internal) return true;  // calls/returns commute
  return spec.independent_internals.count(a) != 0;
}

}  // namespace

Vpa max_tail_independent_vpa(AlphabetRef sigma, const IndependenceSpec& spec) {
  Vpa out(sigma);
  const char* names[] = {"open.pure", "open.mixed", "locked", "dead"};
  for (int i = 0; i < 4; ++i) out.add_state(names[i]);
  std::vector<StackSym> sym(4);
  for (int i = 0; i < 4; ++i) sym[i] = out.intern_stack_sym(std::string("@") + names[i]);
  out.set_initial(kOpenPure);
  out.set_final(kOpenPure);
  out.set_final(kOpenMixed);
  out.set_final(kLocked);

  auto pure = [](int q) { return q == kOpenPure; };
  for (LetterId a = 0; a < sigma->size(); ++a) {
    if (sigma->component(a) != spec.component) continue;
    switch (sigma->kind(a)) {
      case LetterKind::Internal: {
        bool ind = is_indep(spec, *sigma, a);
        // pure stays pure only on independents; a dependent letter is fine
        // while open but fatal once locked
        out.add_int(kOpenPure, a, ind ? kOpenPure : kOpenMixed);
        out.add_int(kOpenMixed, a, kOpenMixed);
        out.add_int(kLocked, a, ind ? kLocked : kDead);
        out.add_int(kDead, a, kDead);
        if (!ind) {
          // re-route the dependent transition out of open.pure
        }
        break;
      }
      case LetterKind::Call:
        for (int q = 0; q < 4; ++q) out.add_call(q, a, kOpenPure, sym[q]);
        break;
      case LetterKind::Return:
        for (int q = 0; q < 4; ++q) {      // q = body state at the return
          for (int p = 0; p < 4; ++p) {    // p = state below (before the call)
            int body = q;
            int below = p;
            int next;
            bool body_pure = pure(body);
            bool body_ok = body != kDead;
            if (below == kDead || !body_ok) {
              next = kDead;
            } else if (below == kLocked) {
              next = body_pure ? kLocked : kDead;
            } else {
              // below is open: an all-independent block keeps it open, any
              // other derivable block forces the locked suffix
              int open_kind = (below == kOpenPure && body_pure) ? kOpenPure : kOpenMixed;
              next = body_pure ? open_kind : kLocked;
            }
            out.add_ret(q, a, sym[p], next);
          }
          out.add_ret(q, a, 0, kDead);  // pending return: not well-matched
        }
        break;
    }
  }
  out.set_complete_flag(false);  // complete over the component's own letters only
  return out;
}

Vpa max_head_independent_vpa(AlphabetRef sigma, const IndependenceSpec& spec) {
  AlphabetRef rev = sigma->reversed();
  IndependenceSpec rspec = spec;
  Vpa tail = max_tail_independent_vpa(rev, rspec);
  return vpa_reverse(tail, sigma);
}

namespace {

// P restricted to the component's letters, intersected with the complement of
// the max automaton (deterministic and complete over those letters after
// rerouting every hole to dead); emptiness decides independence
bool independent_impl(const Vpa& component, const IndependenceSpec& spec, bool head) {
  AlphabetRef sigma = component.alphabet();
  const Vpa* comp = &component;
  Vpa reversed_comp(sigma);
  AlphabetRef use_sigma = sigma;
  if (head) {
    use_sigma = sigma->reversed();
    reversed_comp = vpa_reverse(component, use_sigma);
    comp = &reversed_comp;
  }
  Vpa max = max_tail_independent_vpa(use_sigma, spec);
  // complement within well-matched words over the component: flip finals to
  // the dead state only; max is deterministic and complete on its component
  Vpa flipped = max;
  Vpa bad(use_sigma);
  for (State q = 0; q < max.num_states(); ++q) bad.add_state(max.state_name(q));
  for (StackSym g = 1; g < max.num_stack_syms(); ++g) bad.intern_stack_sym(max.stack_sym_name(g));
  for (State q : max.initials()) bad.set_initial(q);
  bad.set_final(3);  // dead
  for (const auto& t : max.ints()) bad.add_int(t.from, t.letter, t.to);
  for (const auto& t : max.calls()) bad.add_call(t.from, t.letter, t.to, t.push);
  for (const auto& t : max.rets()) bad.add_ret(t.from, t.letter, t.pop, t.to);
  Vpa inter = vpa_intersect(*comp, bad);
  return inter.empty_language();
}

}  // namespace

bool is_tail_independent(const Vpa& component, const IndependenceSpec& spec) {
  return independent_impl(component, spec, false);
}

bool is_head_independent(const Vpa& component, const IndependenceSpec& spec) {
  return independent_impl(component, spec, true);
}

bool tail_independent_by_split(const VPAlphabet& sigma, const Word& run,
                               const IndependenceSpec& spec) {
  MatchingRelation match = matching_of(sigma, run);
  const int n = static_cast<int>(run.size());
  auto indep_at = [&](int i) { return is_indep(spec, sigma, run[i]); };
  // all letters strictly inside a matched pair (k,l) independent?
  auto span_indep = [&](int k, int l) {
    for (int i = k + 1; i < l; ++i)
      if (!indep_at(i)) return false;
    return true;
  };
  for (int split = 0; split <= n; ++split) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (i >= split && !indep_at(i)) ok = false;
    }
    if (!ok) continue;
    for (int i = 0; i < n && ok; ++i) {
      int j = match.match[i];
      if (sigma.kind(run[i]) == LetterKind::Call) {
        if (j < 0) {
          ok = false;  // pending call: not a complete run
          continue;
        }
        bool exempt = span_indep(i, j);
        if (i >= split && !exempt) ok = false;  // call in the tail
      } else if (sigma.kind(run[i]) == LetterKind::Return) {
        if (j < 0 || j > i) {
          ok = false;
          continue;
        }
        bool exempt = span_indep(j, i);
        if (i < split && !exempt) ok = false;  // return in the head
      }
    }
    if (ok) return true;
  }
  return false;
}

SoundnessReport wn_shuffle_soundness_report(const std::vector<const Vpa*>& components,
                                            const std::vector<IndependenceSpec>& specs,
                                            int witness_len) {
  SoundnessReport rep;
  const int n = static_cast<int>(components.size());
  std::vector<bool> tail(n), head(n);
  for (int i = 0; i < n; ++i) {
    tail[i] = is_tail_independent(*components[i], specs[i]);
    head[i] = is_head_independent(*components[i], specs[i]);
  }
  bool all_tail = std::all_of(tail.begin(), tail.end(), [](bool b) { return b; });
  bool all_head = std::all_of(head.begin(), head.end(), [](bool b) { return b; });
  rep.sound = all_tail || all_head;
  rep.direction = all_tail ? "tail" : all_head ? "head" : "none";
  if (!rep.sound) {
    for (int i = 0; i < n; ++i) {
      if (tail[i]) continue;
      for (const Word& w :
           vpa_enumerate(*components[i], witness_len, /*require_empty_stack=*/true)) {
        if (!tail_independent_by_split(*components[i]->alphabet(), w, specs[i])) {
          rep.witnesses.push_back({specs[i].component, w});
          break;
        }
      }
    }
  }
  return rep;
}

}  // namespace hyrec
