#include "randlab/formula.hpp"

#include <algorithm>
#include <cctype>

#include "randlab/error.hpp"

namespace randlab {

Term Term::variable(std::string name) { return Term{Kind::kVariable, std::move(name), 0, {}}; }

Term Term::constant(int index, std::string name) { return Term{Kind::kConstant, std::move(name), index, {}}; }

Term Term::element(Element e) { return Term{Kind::kElement, {}, e, {}}; }

Term Term::function(int index, std::string name, std::vector<Term> args) {
  return Term{Kind::kFunction, std::move(name), index, std::move(args)};
}

struct Formula::Node {
  Kind kind;
  std::vector<Term> terms;
  int symbol = 0;
  std::string name;  // relation symbol or bound variable
  std::vector<Formula> children;
  std::vector<std::string> vars;  // kTypeIs
  std::shared_ptr<const TypeSpace> space;
};

Formula Formula::truth() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kTrue;
  return Formula(n);
}

Formula Formula::falsity() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kFalse;
  return Formula(n);
}

Formula Formula::equal(Term lhs, Term rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kEqual;
  n->terms = {std::move(lhs), std::move(rhs)};
  return Formula(n);
}

Formula Formula::relation(int index, std::string name, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kRelation;
  n->symbol = index;
  n->name = std::move(name);
  n->terms = std::move(args);
  return Formula(n);
}

Formula Formula::negation(Formula f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kNot;
  n->children = {std::move(f)};
  return Formula(n);
}

#define RANDLAB_BINARY(fn, K)                         \
  Formula Formula::fn(Formula a, Formula b) {         \
    auto n = std::make_shared<Node>();                \
    n->kind = Kind::K;                                \
    n->children = {std::move(a), std::move(b)};       \
    return Formula(n);                                \
  }
RANDLAB_BINARY(conjunction, kAnd)
RANDLAB_BINARY(disjunction, kOr)
RANDLAB_BINARY(implication, kImplies)
RANDLAB_BINARY(equivalence, kIff)
#undef RANDLAB_BINARY

Formula Formula::exists(std::string var, Formula body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kExists;
  n->name = std::move(var);
  n->children = {std::move(body)};
  return Formula(n);
}

Formula Formula::forall(std::string var, Formula body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kForall;
  n->name = std::move(var);
  n->children = {std::move(body)};
  return Formula(n);
}

Formula Formula::type_is(std::shared_ptr<const TypeSpace> space, int type, std::vector<std::string> vars) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kTypeIs;
  n->symbol = type;
  n->space = std::move(space);
  n->vars = vars;
  for (auto& v : vars) n->terms.push_back(Term::variable(std::move(v)));
  return Formula(n);
}

Formula Formula::conjunction(const std::vector<Formula>& parts) {
  if (parts.empty()) return truth();
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = conjunction(acc, parts[i]);
  return acc;
}

Formula Formula::disjunction(const std::vector<Formula>& parts) {
  if (parts.empty()) return falsity();
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = disjunction(acc, parts[i]);
  return acc;
}

Formula::Kind Formula::kind() const { return node_->kind; }
const std::vector<Term>& Formula::terms() const { return node_->terms; }
int Formula::symbol() const { return node_->symbol; }
const std::string& Formula::symbol_name() const { return node_->name; }
const Formula& Formula::child(std::size_t i) const { return node_->children.at(i); }
std::size_t Formula::child_count() const { return node_->children.size(); }
const std::string& Formula::bound_var() const { return node_->name; }
const std::shared_ptr<const TypeSpace>& Formula::type_space() const { return node_->space; }

namespace {

void term_vars(const Term& t, const std::vector<std::string>& bound, std::vector<std::string>& out) {
  if (t.kind == Term::Kind::kVariable) {
    if (std::find(bound.begin(), bound.end(), t.name) == bound.end() &&
        std::find(out.begin(), out.end(), t.name) == out.end())
      out.push_back(t.name);
  }
  for (const auto& a : t.args) term_vars(a, bound, out);
}

void formula_vars(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out) {
  for (const auto& t : f.terms()) term_vars(t, bound, out);
  if (f.kind() == Formula::Kind::kExists || f.kind() == Formula::Kind::kForall) {
    bound.push_back(f.bound_var());
    formula_vars(f.child(), bound, out);
    bound.pop_back();
    return;
  }
  for (std::size_t i = 0; i < f.child_count(); ++i) formula_vars(f.child(i), bound, out);
}

}  // namespace

std::vector<std::string> Formula::free_vars() const {
  std::vector<std::string> bound, out;
  formula_vars(*this, bound, out);
  return out;
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind || a.terms != b.terms || a.symbol != b.symbol || a.children.size() != b.children.size())
    return false;
  if ((a.kind == Kind::kExists || a.kind == Kind::kForall) && a.name != b.name) return false;
  if (a.kind == Kind::kTypeIs && a.space != b.space) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!(a.children[i] == b.children[i])) return false;
  return true;
}

std::string to_string(const Term& t) {
  switch (t.kind) {
    case Term::Kind::kVariable:
    case Term::Kind::kConstant:
      return t.name;
    case Term::Kind::kElement:
      return "#" + std::to_string(t.index);
    case Term::Kind::kFunction: {
      std::string s = t.name + "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) s += (i ? "," : "") + to_string(t.args[i]);
      return s + ")";
    }
  }
  return {};
}

namespace {

bool is_infix_symbol(const std::string& name) {
  return !name.empty() && !std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_';
}

int precedence(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::kIff: return 1;
    case Formula::Kind::kImplies: return 2;
    case Formula::Kind::kOr: return 3;
    case Formula::Kind::kAnd: return 4;
    default: return 5;
  }
}

std::string print(const Formula& f, int context);

std::string wrap(const Formula& f, int context) {
  std::string s = print(f, 0);
  return precedence(f) < context ? "(" + s + ")" : s;
}

std::string args_text(const std::vector<Term>& terms) {
  std::string s = "(";
  for (std::size_t i = 0; i < terms.size(); ++i) s += (i ? "," : "") + to_string(terms[i]);
  return s + ")";
}

std::string print(const Formula& f, int) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::kTrue: return "true";
    case K::kFalse: return "false";
    case K::kEqual: return to_string(f.terms()[0]) + "=" + to_string(f.terms()[1]);
    case K::kRelation:
      if (f.terms().size() == 2 && is_infix_symbol(f.symbol_name()))
        return to_string(f.terms()[0]) + f.symbol_name() + to_string(f.terms()[1]);
      return f.symbol_name() + (f.terms().empty() ? "" : args_text(f.terms()));
    case K::kNot: {
      const Formula& c = f.child();
      bool bare = c.kind() == K::kRelation && !(c.terms().size() == 2 && is_infix_symbol(c.symbol_name()));
      bool paren = !bare && c.kind() != K::kNot && c.kind() != K::kTrue && c.kind() != K::kFalse &&
                   c.kind() != K::kExists && c.kind() != K::kForall && c.kind() != K::kTypeIs;
      return "!" + (paren ? "(" + print(c, 0) + ")" : print(c, 5));
    }
    case K::kAnd: return wrap(f.child(0), 4) + " & " + wrap(f.child(1), 5);
    case K::kOr: return wrap(f.child(0), 3) + " | " + wrap(f.child(1), 4);
    case K::kImplies: return wrap(f.child(0), 3) + " -> " + wrap(f.child(1), 2);
    case K::kIff: return wrap(f.child(0), 1) + " <-> " + wrap(f.child(1), 2);
    case K::kExists: return "exists " + f.bound_var() + " (" + print(f.child(), 0) + ")";
    case K::kForall: return "forall " + f.bound_var() + " (" + print(f.child(), 0) + ")";
    case K::kTypeIs: return "@type" + std::to_string(f.symbol()) + args_text(f.terms());
  }
  return {};
}

}  // namespace

std::string to_string(const Formula& f) { return print(f, 0); }

}  // namespace randlab
