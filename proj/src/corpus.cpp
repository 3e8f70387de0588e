#include "randlab/corpus.hpp"

#include <algorithm>
#include <set>

namespace randlab {

namespace {

class Collector {
 public:
  explicit Collector(std::size_t limit) : limit_(limit) {}

  void add(const Formula& f) {
    if (out_.size() >= limit_) return;
    if (seen_.insert(to_string(f)).second) out_.push_back(f);
  }
  bool full() const { return out_.size() >= limit_; }
  std::vector<Formula> take() { return std::move(out_); }

 private:
  std::size_t limit_;
  std::set<std::string> seen_;
  std::vector<Formula> out_;
};

Formula neg(const Formula& f) { return Formula::negation(f); }
Formula conj(const Formula& a, const Formula& b) { return Formula::conjunction(a, b); }
Formula disj(const Formula& a, const Formula& b) { return Formula::disjunction(a, b); }
Formula impl(const Formula& a, const Formula& b) { return Formula::implication(a, b); }
Formula iff(const Formula& a, const Formula& b) { return Formula::equivalence(a, b); }
Formula var_eq(const std::string& a, const std::string& b) {
  return Formula::equal(Term::variable(a), Term::variable(b));
}

bool mentions(const Formula& f, const std::string& v) {
  auto fv = f.free_vars();
  return std::find(fv.begin(), fv.end(), v) != fv.end();
}

std::vector<Formula> literals(const std::vector<Formula>& atoms) {
  std::vector<Formula> out;
  for (const auto& a : atoms) {
    out.push_back(a);
    out.push_back(neg(a));
  }
  return out;
}

}  // namespace

std::vector<Formula> atoms_over(const Signature& sig, const std::vector<std::string>& vars) {
  std::vector<Formula> out;
  const int k = static_cast<int>(vars.size());
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) out.push_back(var_eq(vars[static_cast<std::size_t>(i)], vars[static_cast<std::size_t>(j)]));
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    int arity = sig.relations()[r].arity;
    if (arity == 0) {
      out.push_back(Formula::relation(static_cast<int>(r), sig.relations()[r].name, {}));
      continue;
    }
    for (const auto& idx : all_tuples(k, arity)) {
      std::vector<Term> args;
      for (int i : idx) args.push_back(Term::variable(vars[static_cast<std::size_t>(i)]));
      out.push_back(Formula::relation(static_cast<int>(r), sig.relations()[r].name, args));
    }
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    int arity = sig.functions()[f].arity;
    for (const auto& idx : all_tuples(k, arity)) {
      std::vector<Term> args;
      for (int i : idx) args.push_back(Term::variable(vars[static_cast<std::size_t>(i)]));
      Term app = Term::function(static_cast<int>(f), sig.functions()[f].name, args);
      for (const auto& v : vars) out.push_back(Formula::equal(app, Term::variable(v)));
    }
  }
  for (std::size_t c = 0; c < sig.constants().size(); ++c)
    for (const auto& v : vars)
      out.push_back(Formula::equal(Term::variable(v), Term::constant(static_cast<int>(c), sig.constants()[c].name)));
  return out;
}

std::vector<Formula> formula_corpus(const Signature& sig, std::size_t limit) {
  Collector c(limit);
  auto base = atoms_over(sig, {"x", "y"});
  auto lits = literals(base);
  for (const auto& l : lits) c.add(l);
  std::vector<Formula> with_z;
  for (const auto& a : atoms_over(sig, {"x", "y", "z"}))
    if (mentions(a, "z")) with_z.push_back(a);
  auto zlits = literals(with_z);
  for (const auto& l : zlits) {
    c.add(Formula::exists("z", l));
    c.add(Formula::forall("z", l));
  }
  for (std::size_t i = 0; i < lits.size(); ++i)
    for (std::size_t j = i + 1; j < lits.size(); ++j) {
      if (lits[i] == neg(lits[j]) || lits[j] == neg(lits[i])) continue;
      c.add(conj(lits[i], lits[j]));
      c.add(disj(lits[i], lits[j]));
      c.add(impl(lits[i], lits[j]));
    }
  for (std::size_t i = 0; i < zlits.size(); ++i)
    for (std::size_t j = i + 1; j < zlits.size(); ++j) {
      c.add(Formula::exists("z", conj(zlits[i], zlits[j])));
      c.add(Formula::forall("z", disj(zlits[i], zlits[j])));
    }
  for (const auto& l : zlits)
    for (const auto& b : lits) c.add(disj(Formula::exists("z", l), b));
  // Two nested quantifiers.
  for (const auto& l : zlits) {
    c.add(Formula::forall("w", Formula::exists("z", disj(l, var_eq("z", "w")))));
    c.add(Formula::exists("w", Formula::forall("z", disj(l, neg(var_eq("z", "w"))))));
  }
  c.add(Formula::forall("z", disj(var_eq("z", "x"), var_eq("z", "y"))));
  c.add(Formula::exists("z", conj(neg(var_eq("z", "x")), neg(var_eq("z", "y")))));
  for (const auto& s : sentence_corpus(sig, limit)) c.add(s);
  return c.take();
}

std::vector<Formula> valid_corpus(const Signature& sig, std::size_t limit) {
  Collector c(limit);
  c.add(var_eq("x", "x"));
  c.add(impl(var_eq("x", "y"), var_eq("y", "x")));
  c.add(impl(conj(var_eq("x", "y"), var_eq("y", "z")), var_eq("x", "z")));
  c.add(Formula::exists("z", var_eq("z", "x")));
  c.add(Formula::forall("z", Formula::exists("w", var_eq("z", "w"))));
  // Congruence: x = y makes every atom in x agree with its copy in y.
  auto xs = atoms_over(sig, {"x", "z"});
  auto ys = atoms_over(sig, {"y", "z"});
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i)
    if (mentions(xs[i], "x")) c.add(impl(var_eq("x", "y"), iff(xs[i], ys[i])));
  auto lits = literals(atoms_over(sig, {"x", "y"}));
  for (const auto& l : lits) {
    c.add(disj(l, neg(l)));
    c.add(impl(l, l));
    c.add(neg(conj(l, neg(l))));
  }
  for (std::size_t i = 0; i < lits.size(); ++i)
    for (std::size_t j = 0; j < lits.size(); ++j) {
      if (i == j) continue;
      c.add(impl(conj(lits[i], lits[j]), lits[i]));
      c.add(impl(lits[i], disj(lits[i], lits[j])));
      c.add(iff(neg(conj(lits[i], lits[j])), disj(neg(lits[i]), neg(lits[j]))));
    }
  // Quantifier laws, with an instance substituted for the bound variable:
  // atoms_over lists atoms in the same order for {x,y,z} and {x,y,x}-style
  // renamings, so pairing by index gives the substitution.
  auto zs = atoms_over(sig, {"z", "y"});
  auto inst = atoms_over(sig, {"x", "y"});
  for (std::size_t i = 0; i < zs.size() && i < inst.size(); ++i) {
    if (!mentions(zs[i], "z")) continue;
    c.add(impl(Formula::forall("z", zs[i]), inst[i]));
    c.add(impl(inst[i], Formula::exists("z", zs[i])));
    c.add(impl(Formula::forall("z", zs[i]), Formula::exists("z", zs[i])));
    c.add(iff(neg(Formula::exists("z", zs[i])), Formula::forall("z", neg(zs[i]))));
    c.add(impl(Formula::exists("z", Formula::forall("w", disj(zs[i], var_eq("w", "w")))),
               Formula::forall("w", Formula::exists("z", disj(zs[i], var_eq("w", "w"))))));
  }
  return c.take();
}

std::vector<Formula> sentence_corpus(const Signature& sig, std::size_t limit) {
  Collector c(limit);
  // Size sentences: at least 2, 3, 4 elements; at most 2, 3.
  c.add(Formula::exists("x", Formula::exists("y", neg(var_eq("x", "y")))));
  Formula distinct3 = conj(conj(neg(var_eq("x", "y")), neg(var_eq("x", "z"))), neg(var_eq("y", "z")));
  c.add(Formula::exists("x", Formula::exists("y", Formula::exists("z", distinct3))));
  c.add(Formula::forall("x", Formula::forall("y", Formula::forall("z", disj(disj(var_eq("x", "y"), var_eq("x", "z")), var_eq("y", "z"))))));
  c.add(Formula::forall("x", Formula::forall("y", var_eq("x", "y"))));
  c.add(Formula::forall("x", Formula::exists("y", neg(var_eq("x", "y")))));
  for (const auto& l : literals(atoms_over(sig, {"x", "y"}))) {
    c.add(Formula::forall("x", Formula::forall("y", l)));
    c.add(Formula::exists("x", Formula::exists("y", l)));
    c.add(Formula::forall("x", Formula::exists("y", l)));
    c.add(Formula::exists("x", Formula::forall("y", l)));
  }
  for (const auto& l : literals(atoms_over(sig, {"x"}))) {
    c.add(Formula::forall("x", l));
    c.add(Formula::exists("x", l));
  }
  return c.take();
}

}  // namespace randlab
