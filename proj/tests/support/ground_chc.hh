// ground-saturation reference for tiny equality-only CHC systems
#ifndef HYREC_TESTS_GROUND_CHC_HH_
#define HYREC_TESTS_GROUND_CHC_HH_

#include "hyrec/chc.hh"

namespace hyrec::test {

/// Decides derivability of false by bottom-up saturation over a finite value
/// domain (the integer constants of the system plus one fresh value). Exact
/// for systems whose constraints are conjunctions of equalities between
/// variables and constants, plus variable-vs-constant disequalities: any real
/// derivation collapses into the finite domain, and any finite derivation is
/// real. Used where no external solver is available.
enum class GroundStatus { Sat, Unsat, TooLarge };

GroundStatus ground_saturate(const ChcSystem& sys, size_t max_facts = 2'000'000);

}  // namespace hyrec::test

#endif  // HYREC_TESTS_GROUND_CHC_HH_
