#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "randlab/structure.hpp"

namespace randlab {

class TypeSpace;

struct Term {
  enum class Kind { kVariable, kConstant, kElement, kFunction };

  Kind kind = Kind::kVariable;
  std::string name;  // variable name, or symbol name for constants/functions
  int index = 0;     // symbol index, or the element for kElement
  std::vector<Term> args;

  static Term variable(std::string name);
  static Term constant(int index, std::string name);
  static Term element(Element e);
  static Term function(int index, std::string name, std::vector<Term> args);

  bool operator==(const Term&) const = default;
};

// Immutable first-order formula. Copies share structure.
class Formula {
 public:
  enum class Kind {
    kTrue, kFalse, kEqual, kRelation, kNot, kAnd, kOr, kImplies, kIff, kExists, kForall,
    // Semantic atom: the tuple of variables has the given type of a TypeSpace.
    kTypeIs,
  };

  static Formula truth();
  static Formula falsity();
  static Formula equal(Term lhs, Term rhs);
  static Formula relation(int index, std::string name, std::vector<Term> args);
  static Formula negation(Formula f);
  static Formula conjunction(Formula a, Formula b);
  static Formula disjunction(Formula a, Formula b);
  static Formula implication(Formula a, Formula b);
  static Formula equivalence(Formula a, Formula b);
  static Formula exists(std::string var, Formula body);
  static Formula forall(std::string var, Formula body);
  static Formula type_is(std::shared_ptr<const TypeSpace> space, int type, std::vector<std::string> vars);

  // Folds with truth()/falsity() as the empty case.
  static Formula conjunction(const std::vector<Formula>& parts);
  static Formula disjunction(const std::vector<Formula>& parts);

  Kind kind() const;
  const std::vector<Term>& terms() const;
  int symbol() const;  // relation index, or type index for kTypeIs
  const std::string& symbol_name() const;
  const Formula& child(std::size_t i = 0) const;
  std::size_t child_count() const;
  const std::string& bound_var() const;
  const std::shared_ptr<const TypeSpace>& type_space() const;

  // Free variables in order of first occurrence.
  std::vector<std::string> free_vars() const;
  bool is_sentence() const { return free_vars().empty(); }

  bool operator==(const Formula& other) const;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

std::string to_string(const Formula& f);
std::string to_string(const Term& t);

// Grammar: atoms R(t,..), t = t, t != t, infix t < t for symbolic binary
// relations, true, false; connectives ! & | -> <->; quantifiers
// `exists x (...)`, `forall x (...)`. Terms are variables [a-z][a-z0-9]*,
// constants, function applications f(t,..) and element literals #k.
Formula parse_formula(std::string_view text, const Signature& sig);

using Assignment = std::map<std::string, Element, std::less<>>;

// Tarski satisfaction; quantifiers range over the whole universe.
bool eval_formula(const FinStructure& m, const Formula& phi, const Assignment& val);

// Same, binding vars[i] to values[i].
bool eval_formula(const FinStructure& m, const Formula& phi, const std::vector<std::string>& vars,
                  std::span<const Element> values);

// A formula with variables resolved to slots, for repeated evaluation.
// `vars` must cover the free variables; extra names are allowed.
class CompiledFormula {
 public:
  CompiledFormula(const Formula& phi, std::vector<std::string> vars);

  bool eval(const FinStructure& m, std::span<const Element> values) const;
  const std::vector<std::string>& vars() const { return vars_; }

 private:
  struct TermOp {
    Term::Kind kind;
    int value;  // slot, constant index, element or function index
    std::vector<int> args;
  };
  struct Op {
    Formula::Kind kind;
    int a = -1, b = -1;  // child ops
    int symbol = 0;
    int slot = -1;       // bound variable
    std::vector<int> args;  // term ops
    std::shared_ptr<const TypeSpace> space;
  };

  int compile(const Formula& f, std::vector<std::pair<std::string, int>>& scope);
  int compile_term(const Term& t, const std::vector<std::pair<std::string, int>>& scope);
  bool run(const FinStructure& m, int op, std::vector<Element>& slots) const;
  Element run_term(const FinStructure& m, int op, std::vector<Element>& slots) const;

  std::vector<std::string> vars_;
  std::vector<Op> ops_;
  std::vector<TermOp> terms_;
  int root_ = 0;
  int slot_count_ = 0;
};

// Tuples over `vars` satisfying phi, in lex order.
std::vector<Tuple> extension(const FinStructure& m, const Formula& phi, const std::vector<std::string>& vars);

}  // namespace randlab
