// shared fixtures and generators for the test suites
#ifndef HYREC_TESTS_TESTLANG_HH_
#define HYREC_TESTS_TESTLANG_HH_

#include <random>
#include <string>

#include "hyrec/order.hh"
#include "hyrec/vpg.hh"

namespace hyrec::test {

/// Parentheses (component 1) and brackets (component 2): ( ) [ ].
AlphabetRef paren_alphabet();

/// Same two components plus one internal letter each: a (comp 1), b (comp 2).
AlphabetRef paren_alphabet_with_ints();

/// Maps a compact string like "([()])" to a word over paren_alphabet.
Word W(const VPAlphabet& sigma, const std::string& text);

/// Dyck language of one component: S -> eps | c S r S (c, r of that component).
Vpg dyck_vpg(AlphabetRef sigma, int component);

/// {c^n r^n : n >= 1} of one component.
Vpg nested_chain_vpg(AlphabetRef sigma, int component);

/// Random well-matched uniform-form VPG over one component of the alphabet.
/// Nonterminals <= max_nts; trimmed; may be the empty language.
Vpg random_component_vpg(std::mt19937_64& rng, AlphabetRef sigma, int component, int max_nts);

/// Random alphabet: two components, each with calls/returns/internals within
/// the given totals (at least one call/return pair per component).
AlphabetRef random_two_component_alphabet(std::mt19937_64& rng, int max_letters);

/// The recursive integer division fixture (paper Fig. 1).
extern const char* kDivSource;
/// Context-sensitivity fixture for the return-address regression.
extern const char* kCtxSource;

}  // namespace hyrec::test

#endif  // HYREC_TESTS_TESTLANG_HH_
