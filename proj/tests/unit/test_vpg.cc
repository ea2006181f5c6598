#include <doctest.h>

#include "support/testlang.hh"

using namespace hyrec;
using namespace hyrec::test;

TEST_CASE("trim drops unreachable and non-generating symbols") {
  auto sigma = paren_alphabet_with_ints();
  Vpg g(sigma);
  NonTerminal s = g.add_nonterminal("S");
  NonTerminal dead = g.add_nonterminal("Dead");     // no productions
  NonTerminal island = g.add_nonterminal("Island");  // unreachable
  g.add_eps(s);
  g.add_int(s, sigma->id_of("a"), dead);
  g.add_eps(island);
  g.set_start(s);
  Vpg t = vpg_trim(g);
  CHECK(t.num_nonterminals() == 1);
  CHECK(t.productions().size() == 1);
  CHECK(vpg_enumerate(t, 4) == vpg_enumerate(g, 4));
}

TEST_CASE("uniformize splits mixed nonterminals and preserves language") {
  auto sigma = paren_alphabet_with_ints();
  Vpg g(sigma);
  NonTerminal s = g.add_nonterminal("S");
  g.add_eps(s);
  g.add_int(s, sigma->id_of("a"), s);
  g.add_call(s, sigma->id_of("("), s, sigma->id_of(")"), s);
  g.set_start(s);
  CHECK(!g.check_uniform());
  Vpg u = vpg_uniformize(g);
  CHECK(u.check_uniform());
  CHECK(u.uniform_flag());
  CHECK(vpg_enumerate(u, 7) == vpg_enumerate(g, 7));
  // idempotent up to renaming
  Vpg u2 = vpg_uniformize(u);
  CHECK(u2.num_nonterminals() == u.num_nonterminals());
  CHECK(vpg_enumerate(u2, 7) == vpg_enumerate(u, 7));
}

TEST_CASE("enumerate matches hand unrolling of the nested chain") {
  auto sigma = paren_alphabet();
  Vpg g = nested_chain_vpg(sigma, 1);
  auto words = vpg_enumerate(g, 6);
  std::set<Word> expect{W(*sigma, "()"), W(*sigma, "(())"), W(*sigma, "((()))")};
  CHECK(words == expect);
}

TEST_CASE("grammar-as-automaton round trip preserves bounded language") {
  std::mt19937_64 rng(41);
  auto sigma = paren_alphabet_with_ints();
  for (int round = 0; round < 25; ++round) {
    Vpg g = random_component_vpg(rng, sigma, round % 2 + 1, 4);
    Vpa a = vpg_to_vpa(g);
    CHECK(vpa_enumerate(a, 8, true) == vpg_enumerate(g, 8));
    // only well-matched words accepted even without the empty-stack flag
    Vpg back = vpa_to_vpg(a);
    CHECK(vpg_enumerate(back, 8) == vpg_enumerate(g, 8));
  }
}

TEST_CASE("vpa_to_vpg of an empty-language automaton has no start") {
  auto sigma = paren_alphabet();
  Vpa a(sigma);
  a.add_state("q0");
  a.add_state("q1");
  a.set_initial(0);
  a.set_final(1);  // unreachable
  Vpg g = vpa_to_vpg(a);
  CHECK(vpg_enumerate(g, 8).empty());
}

TEST_CASE("grammar concatenation") {
  auto sigma = paren_alphabet();
  Vpg g1 = nested_chain_vpg(sigma, 1);
  Vpg g2 = nested_chain_vpg(sigma, 2);
  Vpg cat = vpg_concat(g1, g2);
  std::set<Word> expect;
  for (const auto& u : vpg_enumerate(g1, 6))
    for (const auto& v : vpg_enumerate(g2, 6)) {
      if (u.size() + v.size() > 8) continue;
      Word w = u;
      w.insert(w.end(), v.begin(), v.end());
      expect.insert(w);
    }
  CHECK(vpg_enumerate(cat, 8) == expect);
}

TEST_CASE("debug dumps are deterministic") {
  auto sigma = paren_alphabet();
  Vpg g = dyck_vpg(sigma, 1);
  CHECK(g.dump() == g.dump());
  Vpa a = vpg_to_vpa(g);
  CHECK(a.dump() == a.dump());
  CHECK(a.dump().find("call") != std::string::npos);
}
