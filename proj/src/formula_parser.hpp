#pragma once

#include "lexer.hpp"
#include "randlab/formula.hpp"

namespace randlab::detail {

// Recursive-descent parser for first-order formulas. Stops at the first token
// that cannot continue a formula, so it can be embedded in larger grammars.
class FormulaParser {
 public:
  FormulaParser(TokenStream& ts, const Signature& sig) : ts_(ts), sig_(sig) {}

  Formula formula();
  Term term();

 private:
  Formula implication();
  Formula disjunction();
  Formula conjunction();
  Formula unary();
  Formula atom();
  std::vector<Term> arguments(const std::string& symbol, int arity);

  TokenStream& ts_;
  const Signature& sig_;
};

}  // namespace randlab::detail
