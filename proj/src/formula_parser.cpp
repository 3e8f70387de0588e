#include "formula_parser.hpp"

#include <cctype>

namespace randlab {

namespace detail {

namespace {

bool is_variable_name(const std::string& s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::islower(static_cast<unsigned char>(c)) && !std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

bool is_keyword(const std::string& s) {
  return s == "true" || s == "false" || s == "exists" || s == "forall";
}

}  // namespace

Formula FormulaParser::formula() {
  Formula lhs = implication();
  while (ts_.accept("<->")) lhs = Formula::equivalence(lhs, implication());
  return lhs;
}

Formula FormulaParser::implication() {
  Formula lhs = disjunction();
  if (ts_.accept("->")) return Formula::implication(lhs, implication());
  return lhs;
}

Formula FormulaParser::disjunction() {
  Formula lhs = conjunction();
  while (ts_.accept("|")) lhs = Formula::disjunction(lhs, conjunction());
  return lhs;
}

Formula FormulaParser::conjunction() {
  Formula lhs = unary();
  while (ts_.accept("&")) lhs = Formula::conjunction(lhs, unary());
  return lhs;
}

Formula FormulaParser::unary() {
  if (ts_.accept("!")) return Formula::negation(unary());
  if (ts_.is_word("exists") || ts_.is_word("forall")) {
    bool ex = ts_.next().text == "exists";
    std::vector<std::string> vars;
    do {
      const Token& t = ts_.peek();
      if (t.kind != Tok::kIdent || !is_variable_name(t.text) || is_keyword(t.text) || sig_.find(t.text))
        ts_.fail("expected bound variable");
      vars.push_back(ts_.next().text);
    } while (ts_.accept(","));
    Formula body = unary();
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      body = ex ? Formula::exists(*it, body) : Formula::forall(*it, body);
    return body;
  }
  if (ts_.accept("(")) {
    Formula f = formula();
    ts_.expect(")");
    return f;
  }
  return atom();
}

std::vector<Term> FormulaParser::arguments(const std::string& symbol, int arity) {
  std::size_t pos = ts_.peek().pos;
  std::vector<Term> args;
  if (ts_.accept("(")) {
    if (!ts_.is(")")) {
      do {
        args.push_back(term());
      } while (ts_.accept(","));
    }
    ts_.expect(")");
  }
  if (static_cast<int>(args.size()) != arity)
    throw ArityError("'" + symbol + "' expects " + std::to_string(arity) + " arguments, got " +
                     std::to_string(args.size()) + " at position " + std::to_string(pos));
  return args;
}

Formula FormulaParser::atom() {
  const Token& t = ts_.peek();
  if (t.kind == Tok::kIdent) {
    if (t.text == "true") {
      ts_.next();
      return Formula::truth();
    }
    if (t.text == "false") {
      ts_.next();
      return Formula::falsity();
    }
    auto ref = sig_.find(t.text);
    if (ref && ref->kind == SymbolKind::kRelation) {
      std::string name = ts_.next().text;
      int arity = sig_.relations()[static_cast<std::size_t>(ref->index)].arity;
      return Formula::relation(ref->index, name, arguments(name, arity));
    }
  }
  Term lhs = term();
  if (ts_.accept("=")) return Formula::equal(lhs, term());
  if (ts_.accept("!=")) return Formula::negation(Formula::equal(lhs, term()));
  const Token& op = ts_.peek();
  if (op.kind == Tok::kSym) {
    auto ref = sig_.find(op.text);
    if (!ref || ref->kind != SymbolKind::kRelation)
      throw ResolutionError("unknown relation symbol '" + op.text + "' at position " + std::to_string(op.pos));
    int arity = sig_.relations()[static_cast<std::size_t>(ref->index)].arity;
    if (arity != 2)
      throw ArityError("'" + op.text + "' used infix but has arity " + std::to_string(arity) + " at position " +
                       std::to_string(op.pos));
    std::string name = ts_.next().text;
    return Formula::relation(ref->index, name, {lhs, term()});
  }
  ts_.fail("expected '=', '!=' or a relation symbol");
}

Term FormulaParser::term() {
  if (ts_.accept("#")) return Term::element(static_cast<Element>(ts_.expect_int()));
  const Token& t = ts_.peek();
  if (t.kind != Tok::kIdent) ts_.fail("expected term");
  if (is_keyword(t.text)) ts_.fail("expected term");
  std::string name = t.text;
  std::size_t pos = t.pos;
  auto ref = sig_.find(name);
  if (ref) {
    ts_.next();
    switch (ref->kind) {
      case SymbolKind::kConstant:
        return Term::constant(ref->index, name);
      case SymbolKind::kFunction: {
        int arity = sig_.functions()[static_cast<std::size_t>(ref->index)].arity;
        return Term::function(ref->index, name, arguments(name, arity));
      }
      case SymbolKind::kRelation:
        throw ParseError("relation '" + name + "' used as a term", pos);
    }
  }
  if (ts_.is("(", 1) || !is_variable_name(name))
    throw ResolutionError("unknown symbol '" + name + "' at position " + std::to_string(pos));
  ts_.next();
  return Term::variable(name);
}

}  // namespace detail

Formula parse_formula(std::string_view text, const Signature& sig) {
  detail::TokenStream ts(text);
  detail::FormulaParser parser(ts, sig);
  Formula f = parser.formula();
  if (!ts.at_end()) ts.fail("unexpected trailing input");
  return f;
}

}  // namespace randlab
