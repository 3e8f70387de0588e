#pragma once

#include <string>
#include <vector>

#include "randlab/formula.hpp"

namespace randlab {

// Deterministic list of formulas over the signature with free variables
// among {x, y}: literals, binary combinations, single and double
// quantifications, and sentences. Deduplicated by printed form; at most
// `limit` entries.
std::vector<Formula> formula_corpus(const Signature& sig, std::size_t limit = 160);

// Logically valid formulas (tautology instances, equality and congruence
// laws, quantifier laws over non-empty domains) built from the same pieces.
std::vector<Formula> valid_corpus(const Signature& sig, std::size_t limit = 120);

// Sentences only: closures of corpus formulas plus counting sentences.
std::vector<Formula> sentence_corpus(const Signature& sig, std::size_t limit = 80);

// Atomic formulas whose variables all come from `vars`.
std::vector<Formula> atoms_over(const Signature& sig, const std::vector<std::string>& vars);

}  // namespace randlab
