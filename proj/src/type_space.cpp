#include "randlab/type_space.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

#include <set>

#include "randlab/error.hpp"

namespace randlab {

TypeSpace::TypeSpace(StructurePtr m, int arity, std::vector<Element> params)
    : m_(std::move(m)), arity_(arity), params_(std::move(params)) {
  if (arity_ < 0) throw PreconditionError("negative arity");
  std::sort(params_.begin(), params_.end());
  params_.erase(std::unique(params_.begin(), params_.end()), params_.end());
  for (Element p : params_)
    if (p < 0 || p >= m_->size()) throw PreconditionError("parameter " + std::to_string(p) + " out of range");
  automorphisms_ = randlab::automorphisms(*m_, params_);
  auto tuples = all_tuples(m_->size(), arity_);
  orbit_of_.assign(tuples.size(), -1);
  Tuple image(static_cast<std::size_t>(arity_));
  for (std::size_t code = 0; code < tuples.size(); ++code) {
    if (orbit_of_[code] >= 0) continue;
    int q = static_cast<int>(representatives_.size());
    representatives_.push_back(tuples[code]);
    for (const auto& sigma : automorphisms_) {
      for (int i = 0; i < arity_; ++i)
        image[static_cast<std::size_t>(i)] = sigma[static_cast<std::size_t>(tuples[code][static_cast<std::size_t>(i)])];
      orbit_of_[m_->encode(image)] = q;
    }
  }
}

int TypeSpace::type_of(std::span<const Element> tuple) const {
  if (static_cast<int>(tuple.size()) != arity_)
    throw ArityError("tuple of length " + std::to_string(tuple.size()) + " for a space of " +
                     std::to_string(arity_) + "-types");
  return orbit_of_[m_->encode(tuple)];
}

std::vector<Tuple> TypeSpace::orbit(int q) const {
  std::vector<Tuple> out;
  auto tuples = all_tuples(m_->size(), arity_);
  for (std::size_t code = 0; code < tuples.size(); ++code)
    if (orbit_of_[code] == q) out.push_back(std::move(tuples[code]));
  return out;
}

bool TypeSpace::operator==(const TypeSpace& other) const {
  if (arity_ != other.arity_ || params_ != other.params_) return false;
  return m_ == other.m_ || print_structure(*m_) == print_structure(*other.m_);
}

// Spaces are immutable, so repeated requests share one instance. Entries hold
// their structure, which keeps the address key from being reused.
TypeSpacePtr type_space(StructurePtr m, int n, std::vector<Element> params) {
  std::sort(params.begin(), params.end());
  params.erase(std::unique(params.begin(), params.end()), params.end());
  using Key = std::tuple<const FinStructure*, int, std::vector<Element>>;
  static std::mutex lock;
  static std::map<Key, TypeSpacePtr> cache;
  Key key{m.get(), n, params};
  {
    std::lock_guard<std::mutex> guard(lock);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto space = std::make_shared<const TypeSpace>(std::move(m), n, std::move(params));
  std::lock_guard<std::mutex> guard(lock);
  if (cache.size() >= 4096) cache.clear();
  cache.emplace(std::move(key), space);
  return space;
}

TypeId type_of_tuple(StructurePtr m, std::span<const Element> tuple, std::vector<Element> params) {
  TypeSpace space(std::move(m), static_cast<int>(tuple.size()), std::move(params));
  return space.id(space.type_of(tuple));
}

std::vector<std::string> default_vars(int n) {
  if (n <= 3) {
    std::vector<std::string> names{"x", "y", "z"};
    names.resize(static_cast<std::size_t>(std::max(n, 0)));
    return names;
  }
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

namespace {

struct NamedTerm {
  Term term;
  Element value;
  bool variable;
};

std::string fresh_name(const std::vector<std::string>& used, const std::string& base) {
  for (int i = 0;; ++i) {
    std::string name = i == 0 ? base : base + std::to_string(i);
    if (std::find(used.begin(), used.end(), name) == used.end()) return name;
  }
}

// Formula tree with flattened conjunction/disjunction lists, for pruning.
struct Tree {
  enum class Kind { kLeaf, kAnd, kOr, kExists, kForall } kind = Kind::kLeaf;
  Formula leaf = Formula::truth();
  std::string var;
  std::vector<Tree> children;

  static Tree from(const Formula& f) {
    Tree t;
    using K = Formula::Kind;
    if (f.kind() == K::kAnd || f.kind() == K::kOr) {
      t.kind = f.kind() == K::kAnd ? Kind::kAnd : Kind::kOr;
      for (std::size_t i = 0; i < 2; ++i) {
        Tree c = from(f.child(i));
        if (c.kind == t.kind) {
          for (auto& g : c.children) t.children.push_back(std::move(g));
        } else {
          t.children.push_back(std::move(c));
        }
      }
    } else if (f.kind() == K::kExists || f.kind() == K::kForall) {
      t.kind = f.kind() == K::kExists ? Kind::kExists : Kind::kForall;
      t.var = f.bound_var();
      t.children.push_back(from(f.child()));
    } else {
      t.leaf = f;
    }
    return t;
  }

  Formula to_formula() const {
    std::vector<Formula> parts;
    for (const auto& c : children) parts.push_back(c.to_formula());
    switch (kind) {
      case Kind::kLeaf: return leaf;
      case Kind::kAnd: return Formula::conjunction(parts);
      case Kind::kOr: return Formula::disjunction(parts);
      case Kind::kExists: return Formula::exists(var, parts.front());
      case Kind::kForall: return Formula::forall(var, parts.front());
    }
    return leaf;
  }

  // Paths to every member of a conjunction or disjunction list, pre-order.
  void removable(std::vector<int>& path, std::vector<std::vector<int>>& out) const {
    for (std::size_t i = 0; i < children.size(); ++i) {
      path.push_back(static_cast<int>(i));
      if (kind == Kind::kAnd || kind == Kind::kOr) out.push_back(path);
      children[i].removable(path, out);
      path.pop_back();
    }
  }

  Tree without(const std::vector<int>& path, std::size_t depth = 0) const {
    Tree t = *this;
    if (depth + 1 == path.size()) {
      t.children.erase(t.children.begin() + path[depth]);
    } else {
      t.children[static_cast<std::size_t>(path[depth])] =
          children[static_cast<std::size_t>(path[depth])].without(path, depth + 1);
    }
    return t;
  }
};

class Isolator {
 public:
  Isolator(const TypeSpace& space, int q, std::vector<std::string> vars)
      : space_(space), m_(space.structure()), q_(q), vars_(std::move(vars)) {}

  Formula run() {
    const Tuple& rep = space_.representative(q_);
    std::vector<Formula> best;
    bool found = false;
    for (int depth = 0; depth <= 2 && !found; ++depth) {
      best = hintikka(rep, vars_, depth);
      found = isolates(best);
    }
    if (!found) best = {full_diagram(rep)};
    for (std::size_t i = best.size(); i-- > 0;) {
      std::vector<Formula> trial = best;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
      if (isolates(trial)) best = std::move(trial);
    }
    // Prune inside quantified conjuncts too. Visiting paths in reverse
    // pre-order keeps the remaining paths valid after each removal.
    Tree tree;
    tree.kind = Tree::Kind::kAnd;
    for (const auto& f : best) tree.children.push_back(Tree::from(f));
    std::vector<int> path;
    std::vector<std::vector<int>> paths;
    tree.removable(path, paths);
    for (auto it = paths.rbegin(); it != paths.rend(); ++it) {
      if (it->size() == 1) continue;
      Tree trial = tree.without(*it);
      if (isolates({trial.to_formula()})) tree = std::move(trial);
    }
    best.clear();
    for (const auto& c : tree.children) best.push_back(c.to_formula());
    if (best.empty()) {
      for (const auto& v : vars_) best.push_back(Formula::equal(Term::variable(v), Term::variable(v)));
    }
    return Formula::conjunction(best);
  }

 private:
  bool isolates(const std::vector<Formula>& parts) const {
    CompiledFormula c(Formula::conjunction(parts), vars_);
    for (const auto& t : all_tuples(m_.size(), space_.arity()))
      if (c.eval(m_, t) != (space_.type_of(t) == q_)) return false;
    return true;
  }

  std::vector<NamedTerm> terms(const Tuple& values, const std::vector<std::string>& names) const {
    std::vector<NamedTerm> out;
    for (std::size_t i = 0; i < names.size(); ++i) out.push_back({Term::variable(names[i]), values[i], true});
    const auto& sig = m_.signature();
    for (std::size_t c = 0; c < sig.constants().size(); ++c)
      out.push_back({Term::constant(static_cast<int>(c), sig.constants()[c].name), m_.constant(static_cast<int>(c)),
                     false});
    for (Element p : space_.params()) out.push_back({Term::element(p), p, false});
    return out;
  }

  // Every atomic fact, positive or negated, about the named elements that
  // mentions at least one variable.
  std::vector<Formula> diagram(const Tuple& values, const std::vector<std::string>& names) const {
    std::vector<Formula> out;
    auto ts = terms(values, names);
    const int k = static_cast<int>(ts.size());
    auto literal = [](Formula f, bool positive) { return positive ? f : Formula::negation(f); };
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (ts[static_cast<std::size_t>(i)].variable || ts[static_cast<std::size_t>(j)].variable)
          out.push_back(literal(Formula::equal(ts[static_cast<std::size_t>(i)].term, ts[static_cast<std::size_t>(j)].term),
                                ts[static_cast<std::size_t>(i)].value == ts[static_cast<std::size_t>(j)].value));
    const auto& sig = m_.signature();
    auto mentions_variable = [&](const Tuple& idx) {
      return std::any_of(idx.begin(), idx.end(), [&](int i) { return ts[static_cast<std::size_t>(i)].variable; });
    };
    for (std::size_t r = 0; r < sig.relations().size(); ++r) {
      int arity = sig.relations()[r].arity;
      if (arity == 0) continue;
      for (const auto& idx : all_tuples(k, arity)) {
        if (!mentions_variable(idx)) continue;
        std::vector<Term> args;
        Tuple vals;
        for (int i : idx) {
          args.push_back(ts[static_cast<std::size_t>(i)].term);
          vals.push_back(ts[static_cast<std::size_t>(i)].value);
        }
        out.push_back(literal(Formula::relation(static_cast<int>(r), sig.relations()[r].name, args),
                              m_.holds(static_cast<int>(r), vals)));
      }
    }
    for (std::size_t f = 0; f < sig.functions().size(); ++f) {
      int arity = sig.functions()[f].arity;
      for (const auto& idx : all_tuples(k, arity)) {
        if (!mentions_variable(idx)) continue;
        std::vector<Term> args;
        Tuple vals;
        for (int i : idx) {
          args.push_back(ts[static_cast<std::size_t>(i)].term);
          vals.push_back(ts[static_cast<std::size_t>(i)].value);
        }
        Element v = m_.apply(static_cast<int>(f), vals);
        Term app = Term::function(static_cast<int>(f), sig.functions()[f].name, args);
        for (const auto& t : ts) out.push_back(literal(Formula::equal(app, t.term), v == t.value));
      }
    }
    return out;
  }

  std::vector<Formula> hintikka(const Tuple& values, const std::vector<std::string>& names, int depth) const {
    std::vector<Formula> parts = diagram(values, names);
    if (depth == 0) return parts;
    std::string z = fresh_name(names, "z");
    auto extended = names;
    extended.push_back(z);
    std::set<std::string> seen;
    std::vector<Formula> options;
    for (Element e = 0; e < m_.size(); ++e) {
      Tuple next = values;
      next.push_back(e);
      Formula sub = Formula::conjunction(hintikka(next, extended, depth - 1));
      if (!seen.insert(to_string(sub)).second) continue;
      parts.push_back(Formula::exists(z, sub));
      options.push_back(sub);
    }
    parts.push_back(Formula::forall(z, Formula::disjunction(options)));
    return parts;
  }

  // Names every element of M by a witness variable: the witnesses then form
  // an automorphism, so the formula holds exactly on the orbit.
  Formula full_diagram(const Tuple& rep) const {
    std::vector<std::string> zs;
    auto used = vars_;
    Tuple identity;
    for (Element e = 0; e < m_.size(); ++e) {
      zs.push_back(fresh_name(used, "z" + std::to_string(e)));
      used.push_back(zs.back());
      identity.push_back(e);
    }
    std::vector<Formula> body = diagram(identity, zs);
    std::string w = fresh_name(used, "w");
    std::vector<Formula> cover;
    for (const auto& z : zs) cover.push_back(Formula::equal(Term::variable(w), Term::variable(z)));
    body.push_back(Formula::forall(w, Formula::disjunction(cover)));
    for (std::size_t j = 0; j < vars_.size(); ++j)
      body.push_back(Formula::equal(Term::variable(vars_[j]), Term::variable(zs[static_cast<std::size_t>(rep[j])])));
    Formula f = Formula::conjunction(body);
    for (auto it = zs.rbegin(); it != zs.rend(); ++it) f = Formula::exists(*it, f);
    return f;
  }

  const TypeSpace& space_;
  const FinStructure& m_;
  int q_;
  std::vector<std::string> vars_;
};

}  // namespace

Formula isolating_formula(const TypeSpace& space, int q, const std::vector<std::string>& vars) {
  if (q < 0 || q >= space.size()) throw PreconditionError("type index out of range");
  auto names = vars.empty() ? default_vars(space.arity()) : vars;
  if (static_cast<int>(names.size()) != space.arity()) throw ArityError("variable list does not match type arity");
  if (space.arity() == 0) return Formula::truth();
  return Isolator(space, q, names).run();
}

}  // namespace randlab
