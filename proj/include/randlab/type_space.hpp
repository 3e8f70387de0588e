#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "randlab/formula.hpp"
#include "randlab/structure.hpp"

namespace randlab {

using Permutation = std::vector<Element>;

// All automorphisms of m fixing every element of `fix`, sorted
// lexicographically (the identity comes first).
std::vector<Permutation> automorphisms(const FinStructure& m, std::span<const Element> fix = {});

struct TypeId {
  int index = 0;
  Tuple representative;  // lex-least tuple of the orbit

  bool operator==(const TypeId&) const = default;
};

// The orbits of Aut(M/A) on M^n. Orbit i is the one whose lex-least tuple
// is the i-th smallest among all orbit minima.
class TypeSpace {
 public:
  TypeSpace(StructurePtr m, int arity, std::vector<Element> params);

  const FinStructure& structure() const { return *m_; }
  const StructurePtr& structure_ptr() const { return m_; }
  int arity() const { return arity_; }
  const std::vector<Element>& params() const { return params_; }
  int size() const { return static_cast<int>(representatives_.size()); }

  const Tuple& representative(int q) const { return representatives_.at(static_cast<std::size_t>(q)); }
  TypeId id(int q) const { return {q, representative(q)}; }
  int type_of(std::span<const Element> tuple) const;
  std::vector<Tuple> orbit(int q) const;
  const std::vector<Permutation>& automorphisms() const { return automorphisms_; }

  bool operator==(const TypeSpace& other) const;

 private:
  StructurePtr m_;
  int arity_;
  std::vector<Element> params_;
  std::vector<Permutation> automorphisms_;
  std::vector<int> orbit_of_;  // indexed by encoded tuple
  std::vector<Tuple> representatives_;
};

using TypeSpacePtr = std::shared_ptr<const TypeSpace>;

// Parameters are deduplicated and sorted.
TypeSpacePtr type_space(StructurePtr m, int n, std::vector<Element> params = {});

TypeId type_of_tuple(StructurePtr m, std::span<const Element> tuple, std::vector<Element> params = {});

// Default variable names for n-tuples: x; x,y; x,y,z; then x0,x1,...
std::vector<std::string> default_vars(int n);

// A first-order formula whose extension in M is exactly the orbit of type
// q. Parameters appear as element literals #k. Tries the quantifier-free
// diagram first, then back-and-forth formulas of depth 1 and 2, then a
// formula describing M outright; the winner is pruned of redundant top-level
// conjuncts.
Formula isolating_formula(const TypeSpace& space, int q, const std::vector<std::string>& vars = {});

}  // namespace randlab
