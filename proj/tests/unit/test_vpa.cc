#include <doctest.h>
#include <deque>

#include "hyrec/oracle.hh"
#include "support/testlang.hh"

using namespace hyrec;
using namespace hyrec::test;

namespace {

// breadth-first configuration simulator, independent of vpa_accepts' set walk
bool accepts_bfs(const Vpa& a, const Word& w, bool empty_stack) {
  struct Cfg {
    State q;
    std::vector<StackSym> st;
    size_t pos;
  };
  std::deque<Cfg> todo;
  for (State q : a.initials()) todo.push_back({q, {}, 0});
  std::set<std::tuple<State, std::vector<StackSym>, size_t>> seen;
  while (!todo.empty()) {
    Cfg c = todo.front();
    todo.pop_front();
    if (!seen.insert({c.q, c.st, c.pos}).second) continue;
    if (c.pos == w.size()) {
      if (a.is_final(c.q) && (!empty_stack || c.st.empty())) return true;
      continue;
    }
    LetterId l = w[c.pos];
    switch (a.alphabet()->kind(l)) {
      case LetterKind::Internal:
        for (const auto& t : a.ints_from(c.q, l)) todo.push_back({t.to, c.st, c.pos + 1});
        break;
      case LetterKind::Call:
        for (const auto& t : a.calls_from(c.q, l)) {
          auto st = c.st;
          st.push_back(t.push);
          todo.push_back({t.to, st, c.pos + 1});
        }
        break;
      case LetterKind::Return: {
        StackSym top = c.st.empty() ? 0 : c.st.back();
        for (const auto& t : a.rets_from(c.q, l, top)) {
          auto st = c.st;
          if (!st.empty()) st.pop_back();
          todo.push_back({t.to, st, c.pos + 1});
        }
        break;
      }
    }
  }
  return false;
}

Vpa random_vpa(std::mt19937_64& rng, AlphabetRef sigma, int states, int density) {
  Vpa a(sigma);
  for (int i = 0; i < states; ++i) a.add_state("q" + std::to_string(i));
  StackSym g1 = a.intern_stack_sym("g1");
  StackSym g2 = a.intern_stack_sym("g2");
  std::uniform_int_distribution<int> q_d(0, states - 1);
  std::uniform_int_distribution<int> sym_d(0, 1);
  std::uniform_int_distribution<int> l_d(0, sigma->size() - 1);
  for (int i = 0; i < density; ++i) {
    LetterId l = l_d(rng);
    switch (sigma->kind(l)) {
      case LetterKind::Internal: a.add_int(q_d(rng), l, q_d(rng)); break;
      case LetterKind::Call: a.add_call(q_d(rng), l, q_d(rng), sym_d(rng) ? g1 : g2); break;
      case LetterKind::Return: a.add_ret(q_d(rng), l, sym_d(rng) ? g1 : g2, q_d(rng)); break;
    }
  }
  a.set_initial(0);
  a.set_final(q_d(rng));
  return a;
}

}  // namespace

TEST_CASE("acceptance cross-checked against a configuration-set simulator") {
  std::mt19937_64 rng(11);
  auto sigma = paren_alphabet_with_ints();
  std::uniform_int_distribution<int> len_d(0, 8);
  std::uniform_int_distribution<int> l_d(0, sigma->size() - 1);
  for (int round = 0; round < 40; ++round) {
    Vpa a = random_vpa(rng, sigma, 4, 14);
    for (int i = 0; i < 50; ++i) {
      Word w;
      int len = len_d(rng);
      for (int j = 0; j < len; ++j) w.push_back(l_d(rng));
      CHECK(vpa_accepts(a, w) == accepts_bfs(a, w, false));
      CHECK(vpa_accepts(a, w, true) == accepts_bfs(a, w, true));
    }
  }
}

TEST_CASE("completion is language-preserving and idempotent") {
  std::mt19937_64 rng(13);
  auto sigma = paren_alphabet_with_ints();
  for (int round = 0; round < 15; ++round) {
    Vpa a = random_vpa(rng, sigma, 3, 10);
    Vpa c = vpa_complete(a);
    CHECK(c.check_complete());
    CHECK(vpa_enumerate(a, 6) == vpa_enumerate(c, 6));
    Vpa c2 = vpa_complete(c);
    CHECK(c2.num_states() == c.num_states());
  }
  // single state, no transitions
  Vpa lone(sigma);
  lone.add_state("q0");
  lone.set_initial(0);
  lone.set_final(0);
  Vpa done = vpa_complete(lone);
  CHECK(done.num_states() == 2);
  CHECK(vpa_accepts(done, {}));
  CHECK(!vpa_accepts(done, W(*sigma, "(")));
}

TEST_CASE("intersection equals membership conjunction on bounded words") {
  std::mt19937_64 rng(17);
  auto sigma = paren_alphabet_with_ints();
  for (int round = 0; round < 12; ++round) {
    Vpa a = random_vpa(rng, sigma, 3, 12);
    Vpa b = random_vpa(rng, sigma, 3, 12);
    Vpa ab = vpa_intersect(a, b);
    auto la = vpa_enumerate(a, 6);
    auto lb = vpa_enumerate(b, 6);
    std::set<Word> expect;
    for (const auto& w : la)
      if (lb.count(w)) expect.insert(w);
    CHECK(vpa_enumerate(ab, 6) == expect);
  }
  // A cap A = A; A cap empty = empty
  Vpa a = random_vpa(rng, sigma, 3, 12);
  CHECK(vpa_enumerate(vpa_intersect(a, a), 6) == vpa_enumerate(a, 6));
  Vpa none(sigma);
  none.add_state("q0");
  none.set_initial(0);
  Vpa sink = vpa_complete(none);  // accepts nothing
  CHECK(vpa_enumerate(vpa_intersect(a, sink), 6).empty());
}

TEST_CASE("well-nested shuffle equals the filtered interleavings") {
  auto sigma = paren_alphabet();
  Vpa d1 = vpg_to_vpa(dyck_vpg(sigma, 1));
  Vpa d2 = vpg_to_vpa(dyck_vpg(sigma, 2));
  Vpa sh = wn_shuffle({&d1, &d2});
  // ill-nested word rejected
  CHECK(!vpa_accepts(sh, W(*sigma, "([)]"), true));
  CHECK(vpa_accepts(sh, W(*sigma, "([])"), true));
  // bounded equality with the projection-filter definition
  auto l1 = vpg_enumerate(dyck_vpg(sigma, 1), 6);
  auto l2 = vpg_enumerate(dyck_vpg(sigma, 2), 6);
  std::set<Word> expect;
  for (const auto& u : l1)
    for (const auto& v : l2) {
      if (u.size() + v.size() > 6) continue;
      std::vector<Word> ws{u, v};
      for (const auto& w : enumerate_shuffle(ws))
        if (is_well_nested(*sigma, w)) expect.insert(w);
    }
  CHECK(vpa_enumerate(sh, 6, true) == expect);
  // concatenation is contained in the well-nested shuffle
  for (const auto& u : l1)
    for (const auto& v : l2) {
      if (u.size() + v.size() > 6) continue;
      Word uv = u;
      uv.insert(uv.end(), v.begin(), v.end());
      CHECK(expect.count(uv));
    }
}

TEST_CASE("shuffle of overlapping components is rejected") {
  auto sigma = paren_alphabet();
  Vpa d1 = vpg_to_vpa(dyck_vpg(sigma, 1));
  CHECK_THROWS(wn_shuffle({&d1, &d1}));
}

TEST_CASE("well-nested shuffle is associative at bounded language level") {
  auto s = std::make_shared<VPAlphabet>();
  s->add("(", LetterKind::Call, 1);
  s->add(")", LetterKind::Return, 1);
  s->add("[", LetterKind::Call, 2);
  s->add("]", LetterKind::Return, 2);
  s->add("{", LetterKind::Call, 3);
  s->add("}", LetterKind::Return, 3);
  AlphabetRef sigma = s;
  Vpa d1 = vpg_to_vpa(dyck_vpg(sigma, 1));
  Vpa d2 = vpg_to_vpa(dyck_vpg(sigma, 2));
  Vpa d3 = vpg_to_vpa(dyck_vpg(sigma, 3));
  Vpa left = wn_shuffle({&d1, &d2});
  Vpa l = wn_shuffle({&left, &d3});
  Vpa right = wn_shuffle({&d2, &d3});
  Vpa r = wn_shuffle({&d1, &right});
  CHECK(vpa_enumerate(l, 6, true) == vpa_enumerate(r, 6, true));
}

TEST_CASE("reversal reverses the bounded language") {
  std::mt19937_64 rng(23);
  auto sigma = paren_alphabet_with_ints();
  auto rsigma = sigma->reversed();
  for (int round = 0; round < 10; ++round) {
    Vpg g = random_component_vpg(rng, sigma, 1, 3);
    Vpa a = vpg_to_vpa(g);
    Vpa r = vpa_reverse(a, rsigma);
    std::set<Word> expect;
    for (Word w : vpa_enumerate(a, 8, true)) {
      std::reverse(w.begin(), w.end());
      expect.insert(w);
    }
    CHECK(vpa_enumerate(r, 8, true) == expect);
  }
}

TEST_CASE("normalization preserves language and homogenizes states") {
  std::mt19937_64 rng(29);
  auto sigma = paren_alphabet_with_ints();
  for (int round = 0; round < 15; ++round) {
    Vpa a = random_vpa(rng, sigma, 4, 16);
    Vpa n = vpa_normalize(a);
    CHECK(vpa_enumerate(a, 6) == vpa_enumerate(n, 6));
    for (State q = 0; q < n.num_states(); ++q) {
      std::set<LetterKind> kinds;
      for (LetterId l : n.outgoing_letters(q)) kinds.insert(sigma->kind(l));
      CHECK(kinds.size() <= 1);
      if (n.is_final(q)) CHECK(n.outgoing_letters(q).empty());
    }
  }
}

TEST_CASE("weak hierarchical form preserves language") {
  std::mt19937_64 rng(31);
  auto sigma = paren_alphabet_with_ints();
  for (int round = 0; round < 10; ++round) {
    Vpa a = random_vpa(rng, sigma, 4, 16);
    Vpa w = vpa_weak_hierarchical(a);
    CHECK(vpa_enumerate(a, 6) == vpa_enumerate(w, 6));
  }
}

TEST_CASE("emptiness via summaries matches bounded search") {
  std::mt19937_64 rng(37);
  auto sigma = paren_alphabet_with_ints();
  int nonempties = 0;
  for (int round = 0; round < 60; ++round) {
    Vpa a = random_vpa(rng, sigma, 4, 8);
    bool empty = a.empty_language();
    bool found = !vpa_enumerate(a, 9).empty();
    if (found) nonempties++;
    // bounded search can miss long witnesses but never fabricates one
    if (found) CHECK(!empty);
    if (empty) CHECK(!found);
  }
  CHECK(nonempties > 5);
}
