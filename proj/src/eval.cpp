#include <algorithm>

#include "randlab/error.hpp"
#include "randlab/formula.hpp"
#include "randlab/type_space.hpp"

namespace randlab {

CompiledFormula::CompiledFormula(const Formula& phi, std::vector<std::string> vars) : vars_(std::move(vars)) {
  std::vector<std::pair<std::string, int>> scope;
  for (std::size_t i = 0; i < vars_.size(); ++i) scope.emplace_back(vars_[i], static_cast<int>(i));
  slot_count_ = static_cast<int>(vars_.size());
  root_ = compile(phi, scope);
}

namespace {

int lookup(const std::vector<std::pair<std::string, int>>& scope, const std::string& name) {
  for (auto it = scope.rbegin(); it != scope.rend(); ++it)
    if (it->first == name) return it->second;
  throw PreconditionError("unassigned free variable '" + name + "'");
}

}  // namespace

int CompiledFormula::compile_term(const Term& t, const std::vector<std::pair<std::string, int>>& scope) {
  TermOp op{t.kind, t.index, {}};
  if (t.kind == Term::Kind::kVariable) op.value = lookup(scope, t.name);
  for (const auto& a : t.args) op.args.push_back(compile_term(a, scope));
  terms_.push_back(std::move(op));
  return static_cast<int>(terms_.size()) - 1;
}

int CompiledFormula::compile(const Formula& f, std::vector<std::pair<std::string, int>>& scope) {
  Op op;
  op.kind = f.kind();
  op.symbol = f.symbol();
  op.space = f.type_space();
  for (const auto& t : f.terms()) op.args.push_back(compile_term(t, scope));
  switch (f.kind()) {
    case Formula::Kind::kExists:
    case Formula::Kind::kForall:
      op.slot = slot_count_++;
      scope.emplace_back(f.bound_var(), op.slot);
      op.a = compile(f.child(), scope);
      scope.pop_back();
      break;
    default:
      if (f.child_count() > 0) op.a = compile(f.child(0), scope);
      if (f.child_count() > 1) op.b = compile(f.child(1), scope);
  }
  ops_.push_back(std::move(op));
  return static_cast<int>(ops_.size()) - 1;
}

Element CompiledFormula::run_term(const FinStructure& m, int index, std::vector<Element>& slots) const {
  const TermOp& t = terms_[static_cast<std::size_t>(index)];
  switch (t.kind) {
    case Term::Kind::kVariable:
      return slots[static_cast<std::size_t>(t.value)];
    case Term::Kind::kConstant:
      return m.constant(t.value);
    case Term::Kind::kElement:
      if (t.value < 0 || t.value >= m.size())
        throw PreconditionError("element literal #" + std::to_string(t.value) + " out of range");
      return t.value;
    case Term::Kind::kFunction: {
      Element buf[8];
      std::vector<Element> big;
      Element* args = buf;
      if (t.args.size() > 8) {
        big.resize(t.args.size());
        args = big.data();
      }
      for (std::size_t i = 0; i < t.args.size(); ++i) args[i] = run_term(m, t.args[i], slots);
      return m.apply(t.value, std::span<const Element>(args, t.args.size()));
    }
  }
  return 0;
}

bool CompiledFormula::run(const FinStructure& m, int index, std::vector<Element>& slots) const {
  const Op& op = ops_[static_cast<std::size_t>(index)];
  using K = Formula::Kind;
  switch (op.kind) {
    case K::kTrue: return true;
    case K::kFalse: return false;
    case K::kEqual: return run_term(m, op.args[0], slots) == run_term(m, op.args[1], slots);
    case K::kRelation:
    case K::kTypeIs: {
      Tuple args(op.args.size());
      for (std::size_t i = 0; i < args.size(); ++i) args[i] = run_term(m, op.args[i], slots);
      if (op.kind == K::kRelation) return m.holds(op.symbol, args);
      return op.space->type_of(args) == op.symbol;
    }
    case K::kNot: return !run(m, op.a, slots);
    case K::kAnd: return run(m, op.a, slots) && run(m, op.b, slots);
    case K::kOr: return run(m, op.a, slots) || run(m, op.b, slots);
    case K::kImplies: return !run(m, op.a, slots) || run(m, op.b, slots);
    case K::kIff: return run(m, op.a, slots) == run(m, op.b, slots);
    case K::kExists:
    case K::kForall: {
      bool ex = op.kind == K::kExists;
      Element saved = slots[static_cast<std::size_t>(op.slot)];
      bool result = !ex;
      for (Element e = 0; e < m.size(); ++e) {
        slots[static_cast<std::size_t>(op.slot)] = e;
        if (run(m, op.a, slots) == ex) {
          result = ex;
          break;
        }
      }
      slots[static_cast<std::size_t>(op.slot)] = saved;
      return result;
    }
  }
  return false;
}

bool CompiledFormula::eval(const FinStructure& m, std::span<const Element> values) const {
  if (values.size() != vars_.size()) throw ArityError("formula evaluated with the wrong number of values");
  std::vector<Element> slots(static_cast<std::size_t>(slot_count_), 0);
  std::copy(values.begin(), values.end(), slots.begin());
  return run(m, root_, slots);
}

bool eval_formula(const FinStructure& m, const Formula& phi, const Assignment& val) {
  std::vector<std::string> vars;
  Tuple values;
  for (const auto& [name, e] : val) {
    vars.push_back(name);
    values.push_back(e);
  }
  return CompiledFormula(phi, vars).eval(m, values);
}

bool eval_formula(const FinStructure& m, const Formula& phi, const std::vector<std::string>& vars,
                  std::span<const Element> values) {
  return CompiledFormula(phi, vars).eval(m, values);
}

std::vector<Tuple> extension(const FinStructure& m, const Formula& phi, const std::vector<std::string>& vars) {
  CompiledFormula c(phi, vars);
  std::vector<Tuple> out;
  for (auto& t : all_tuples(m.size(), static_cast<int>(vars.size())))
    if (c.eval(m, t)) out.push_back(std::move(t));
  return out;
}

}  // namespace randlab
