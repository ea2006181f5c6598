#include <doctest.h>

#include "hyrec/independence.hh"
#include "support/testlang.hh"

using namespace hyrec;
using namespace hyrec::test;

namespace {

// one-component alphabet with one call/return pair and two internals a, b
AlphabetRef one_comp() {
  auto s = std::make_shared<VPAlphabet>();
  s->add("c", LetterKind::Call, 1);
  s->add("r", LetterKind::Return, 1);
  s->add("a", LetterKind::Internal, 1);
  s->add("b", LetterKind::Internal, 1);
  return s;
}

Vpa singleton_vpa(AlphabetRef sigma, const Word& w) {
  Vpa a(sigma);
  for (size_t i = 0; i <= w.size(); ++i) a.add_state("s" + std::to_string(i));
  a.set_initial(0);
  a.set_final(static_cast<int>(w.size()));
  std::vector<StackSym> stack;
  int next_sym = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    switch (sigma->kind(w[i])) {
      case LetterKind::Internal:
        a.add_int(i, w[i], i + 1);
        break;
      case LetterKind::Call: {
        StackSym g = a.intern_stack_sym("g" + std::to_string(next_sym++));
        stack.push_back(g);
        a.add_call(i, w[i], i + 1, g);
        break;
      }
      case LetterKind::Return:
        a.add_ret(i, w[i], stack.back(), i + 1);
        stack.pop_back();
        break;
    }
  }
  return a;
}

}  // namespace

TEST_CASE("max tail-independent language: the three spec vectors") {
  auto sigma = one_comp();
  IndependenceSpec dep_all{1, {}};  // a, b dependent
  Vpa max = max_tail_independent_vpa(sigma, dep_all);
  // c a r accepted: split u = "c a", v = "r"
  CHECK(vpa_accepts(max, W(*sigma, "car"), true));
  CHECK(tail_independent_by_split(*sigma, W(*sigma, "car"), dep_all));
  // c a r b rejected: no valid split
  CHECK(!vpa_accepts(max, W(*sigma, "carb"), true));
  CHECK(!tail_independent_by_split(*sigma, W(*sigma, "carb"), dep_all));
  // all letters independent: universal well-matched language
  IndependenceSpec indep_all{1, {sigma->id_of("a"), sigma->id_of("b")}};
  Vpa all = max_tail_independent_vpa(sigma, indep_all);
  std::mt19937_64 rng(73);
  std::uniform_int_distribution<int> len_d(0, 8), l_d(0, sigma->size() - 1);
  for (int i = 0; i < 300; ++i) {
    Word w;
    int n = len_d(rng);
    for (int j = 0; j < n; ++j) w.push_back(l_d(rng));
    if (is_well_matched(*sigma, w)) CHECK(vpa_accepts(all, w, true));
  }
}

TEST_CASE("bounded split search agrees with the automaton") {
  auto sigma = one_comp();
  std::mt19937_64 rng(79);
  std::uniform_int_distribution<int> len_d(0, 10), l_d(0, sigma->size() - 1), coin(0, 1);
  int checked = 0;
  for (int i = 0; i < 3000 && checked < 300; ++i) {
    IndependenceSpec spec{1, {}};
    if (coin(rng)) spec.independent_internals.insert(sigma->id_of("a"));
    if (coin(rng)) spec.independent_internals.insert(sigma->id_of("b"));
    Word w;
    int n = len_d(rng);
    for (int j = 0; j < n; ++j) w.push_back(l_d(rng));
    if (!is_well_matched(*sigma, w)) continue;
    checked++;
    Vpa max = max_tail_independent_vpa(sigma, spec);
    CHECK(vpa_accepts(max, w, true) == tail_independent_by_split(*sigma, w, spec));
  }
  CHECK(checked >= 300);
}

TEST_CASE("decision procedure on component automata") {
  auto sigma = one_comp();
  IndependenceSpec ab_indep{1, {sigma->id_of("a"), sigma->id_of("b")}};
  IndependenceSpec a_indep{1, {sigma->id_of("a")}};
  IndependenceSpec none{1, {}};

  // tail recursion: c (c ... r) r with the dependent b before the call
  Vpa tailrec = singleton_vpa(sigma, W(*sigma, "bccrr"));
  CHECK(is_tail_independent(tailrec, none));
  // dependent after the return: b after r
  Vpa after = singleton_vpa(sigma, W(*sigma, "crb"));
  CHECK(!is_tail_independent(after, none));
  CHECK(is_tail_independent(after, ab_indep));  // vacuous when nothing depends
  CHECK(is_head_independent(after, none));      // mirror image
  // div-like run: c a c a r b r with b dependent fails
  Vpa divish = singleton_vpa(sigma, W(*sigma, "cacarbrb"));
  CHECK(!is_tail_independent(divish, a_indep));
}

TEST_CASE("head variant equals tail on the reversed word") {
  auto sigma = one_comp();
  std::mt19937_64 rng(83);
  std::uniform_int_distribution<int> len_d(2, 8), l_d(0, sigma->size() - 1);
  int checked = 0;
  for (int i = 0; i < 2000 && checked < 150; ++i) {
    Word w;
    int n = len_d(rng);
    for (int j = 0; j < n; ++j) w.push_back(l_d(rng));
    if (!is_well_matched(*sigma, w)) continue;
    checked++;
    IndependenceSpec spec{1, {sigma->id_of("a")}};
    Vpa single = singleton_vpa(sigma, w);
    bool head = is_head_independent(single, spec);
    Word rev = w;
    std::reverse(rev.begin(), rev.end());
    // reversed word over the kind-swapped alphabet, tail-checked
    auto rsigma = sigma->reversed();
    Vpa rsingle = singleton_vpa(rsigma, rev);
    bool tail_of_rev = is_tail_independent(rsingle, spec);
    CHECK(head == tail_of_rev);
  }
  CHECK(checked >= 150);
}

TEST_CASE("soundness report across components") {
  auto s = std::make_shared<VPAlphabet>();
  s->add("c", LetterKind::Call, 1);
  s->add("r", LetterKind::Return, 1);
  s->add("a", LetterKind::Internal, 1);
  s->add("c'", LetterKind::Call, 2);
  s->add("r'", LetterKind::Return, 2);
  s->add("b", LetterKind::Internal, 2);
  AlphabetRef sigma = s;
  // both components tail-independent (dependent a before the call)
  Vpa p1 = singleton_vpa(sigma, W(*sigma, "acr"));
  Vpa p2(sigma);
  {
    Vpa tmp(sigma);
    tmp.add_state("t0");
    tmp.add_state("t1");
    tmp.add_state("t2");
    tmp.add_state("t3");
    tmp.set_initial(0);
    tmp.set_final(3);
    StackSym g = tmp.intern_stack_sym("g");
    tmp.add_int(0, sigma->id_of("b"), 1);
    tmp.add_call(1, sigma->id_of("c'"), 2, g);
    tmp.add_ret(2, sigma->id_of("r'"), g, 3);
    p2 = tmp;
  }
  std::vector<IndependenceSpec> specs{{1, {}}, {2, {}}};
  SoundnessReport rep = wn_shuffle_soundness_report({&p1, &p2}, specs);
  CHECK(rep.sound);
  CHECK(rep.direction == "tail");
  // mixed: one only-tail, one only-head
  Vpa only_tail = singleton_vpa(sigma, W(*sigma, "acr"));  // dep before call
  Vpa only_head(sigma);
  {
    Vpa tmp(sigma);
    for (int i = 0; i < 4; ++i) tmp.add_state("h" + std::to_string(i));
    tmp.set_initial(0);
    tmp.set_final(3);
    StackSym g = tmp.intern_stack_sym("g");
    tmp.add_call(0, sigma->id_of("c'"), 1, g);
    tmp.add_ret(1, sigma->id_of("r'"), g, 2);
    tmp.add_int(2, sigma->id_of("b"), 3);  // dependent after the return
    only_head = tmp;
  }
  SoundnessReport mixed = wn_shuffle_soundness_report({&only_tail, &only_head}, specs);
  CHECK(!mixed.sound);
  CHECK(mixed.direction == "none");
  REQUIRE(!mixed.witnesses.empty());
  for (const auto& [comp, w] : mixed.witnesses) {
    CHECK(comp == 2);
    CHECK(!tail_independent_by_split(*sigma, w, specs[1]));
  }
}
