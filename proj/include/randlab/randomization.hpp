#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "randlab/formula.hpp"
#include "randlab/measure.hpp"
#include "randlab/structure.hpp"

namespace randlab {

// A set of sample points; bit w is point w.
using Event = boost::dynamic_bitset<>;

// value[w] is an element of the structure at point w.
using RandomElement = std::vector<Element>;

// The full randomization over a finite base: every map picking an element of
// M(w) at each point w is a random element, every subset is an event.
class Randomization {
 public:
  // Throws PreconditionError if the family size differs from the base or the
  // signatures disagree.
  Randomization(FinProbSpace base, std::vector<StructurePtr> family);

  static Randomization constant(StructurePtr m, FinProbSpace base);

  const FinProbSpace& base() const { return base_; }
  int size() const { return base_.size(); }
  const FinStructure& at(int w) const { return *family_.at(static_cast<std::size_t>(w)); }
  const StructurePtr& structure_ptr(int w) const { return family_.at(static_cast<std::size_t>(w)); }
  const std::vector<StructurePtr>& family() const { return family_; }
  const Signature& signature() const { return family_.front()->signature(); }
  bool is_constant() const;

  // Product of the universe sizes.
  BigInt element_count() const;
  // The same as a double, for budget arithmetic.
  double element_count_approx() const;

  // Throws PreconditionError unless f is a random element of this randomization.
  void check_element(const RandomElement& f) const;
  void check_event(const Event& e) const;

  Event empty_event() const { return Event(static_cast<std::size_t>(size())); }
  Event full_event() const { return ~empty_event(); }

  // The constant element e, which must lie in every universe.
  RandomElement constant_element(Element e) const;

  // Steps f to the next random element in lexicographic order (point 0 most
  // significant). Returns false after the last one, leaving f all zeros.
  bool next_element(RandomElement& f) const;

 private:
  FinProbSpace base_;
  std::vector<StructurePtr> family_;
};

// The points w where M(w) satisfies phi with vars[i] bound to args[i](w).
Event event_of(const Randomization& r, const Formula& phi, const std::vector<std::string>& vars,
               const std::vector<RandomElement>& args);
// Binds the free variables of phi, in order of first occurrence.
Event event_of(const Randomization& r, const Formula& phi, const std::vector<RandomElement>& args);

Rational mu(const Randomization& r, const Event& e);
Rational dB(const Randomization& r, const Event& a, const Event& b);
Rational dK(const Randomization& r, const RandomElement& f, const RandomElement& g);

// f with [[phi(f, g)]] = [[exists x phi(g)]]: the least witness at each point,
// element 0 where there is none.
RandomElement fullness_witness(const Randomization& r, const Formula& phi, const std::string& x,
                               const std::vector<std::string>& params, const std::vector<RandomElement>& g);

// (f, g) with [[f = g]] = e.
std::pair<RandomElement, RandomElement> event_witness(const Randomization& r, const Event& e);

// "[v0, v1, ...]"
std::string print_element(const RandomElement& f);
RandomElement parse_element(std::string_view text);
// Sorted point indices, "[0, 2]".
std::string print_event(const Event& e);
Event parse_event(std::string_view text, int size);

struct ConvexPart {
  Rational weight;
  Randomization rand;
};

// The randomization over the disjoint union of the part bases, point (i, w)
// labelled "p<i>.<label>" with weight weight_i * mu_i(w).
class ConvexCombination {
 public:
  // Throws PreconditionError unless weights are positive and sum to 1 and
  // the signatures agree.
  explicit ConvexCombination(std::vector<ConvexPart> parts);

  const Randomization& rand() const { return rand_; }
  const std::vector<ConvexPart>& parts() const { return parts_; }
  int offset(int part) const { return offsets_.at(static_cast<std::size_t>(part)); }

  // The restriction of an element or event of the combination to one part.
  RandomElement restrict(const RandomElement& f, int part) const;
  Event restrict(const Event& e, int part) const;
  // Glues one element per part.
  RandomElement glue(const std::vector<RandomElement>& pieces) const;

 private:
  std::vector<ConvexPart> parts_;
  std::vector<int> offsets_;
  Randomization rand_;
};

// A finite Boolean algebra of events, kept as its partition into atoms.
class EventAlgebra {
 public:
  // Throws PreconditionError unless the atoms are nonempty, disjoint and
  // cover all points.
  EventAlgebra(int size, std::vector<Event> atoms);

  // The algebra generated by the given events.
  static EventAlgebra generated_by(int size, const std::vector<Event>& generators);
  // Blocks of 2^(depth_total - depth) consecutive points.
  static EventAlgebra dyadic(int depth_total, int depth);
  static EventAlgebra discrete(int size);
  static EventAlgebra trivial(int size);

  int size() const { return size_; }
  const std::vector<Event>& atoms() const { return atoms_; }
  bool contains(const Event& e) const;
  bool measurable(const RandomElement& f) const;

  // An element of the algebra nearest to e in d_B: the union of the atoms
  // more than half covered by e.
  Event nearest(const FinProbSpace& mu, const Event& e) const;

 private:
  int size_;
  std::vector<Event> atoms_;
};

struct ApproximationStep {
  std::string name;
  bool pass;
  std::string detail;
};

// The construction g = a_m on C_m, with its bookkeeping.
struct SimpleApproximation {
  RandomElement g;
  int n = 0;                      // level sets used
  std::vector<Element> values;    // a_m, by decreasing mass
  std::vector<Event> level_sets;  // B_m
  std::vector<Event> approx;      // A_m
  std::vector<Event> disjoint;    // C_m
  std::vector<ApproximationStep> steps;
  bool density_ok = true;
  std::optional<int> worst_level;  // level set farthest from the algebra
  Rational worst_distance;
  Rational distance;  // d_K(f, g)
  bool within_eps = false;
};

// Follows the density argument for simple elements: level sets sorted by
// decreasing measure (ties by value), n least with mu of the first n level
// sets > 1 - eps/2, A_m the nearest algebra element, C_m = A_m minus earlier
// A_k, g = a_m on C_m and a_0 elsewhere. Never throws on a density failure;
// density_ok and worst_level report it.
SimpleApproximation approximate_by_simple(const Randomization& r, const RandomElement& f,
                                          const EventAlgebra& algebra, const Rational& eps);

}  // namespace randlab
