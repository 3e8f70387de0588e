#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "randlab/randomization.hpp"
#include "randlab/type_space.hpp"

namespace randlab {

// A probability measure on a classical type space: the type of a random
// tuple. With param_count = k the space has arity n + k and the last k
// coordinates are the parameters.
class RMeasure {
 public:
  // Throws PreconditionError unless weights are nonnegative, match the space
  // size and sum to 1.
  RMeasure(TypeSpacePtr space, std::vector<Rational> weights, int param_count = 0);

  static RMeasure point_mass(TypeSpacePtr space, int q, int param_count = 0);

  const TypeSpace& space() const { return *space_; }
  const TypeSpacePtr& space_ptr() const { return space_; }
  const std::vector<Rational>& weights() const { return weights_; }
  const Rational& weight(int q) const { return weights_.at(static_cast<std::size_t>(q)); }
  int param_count() const { return param_count_; }
  int arity() const { return space_->arity() - param_count_; }

  bool operator==(const RMeasure& other) const;

 private:
  TypeSpacePtr space_;
  std::vector<Rational> weights_;
  int param_count_;
};

// The law of w -> type of (f(w), params(w)) over the empty set. The family
// must be constant.
RMeasure rtype_of(const Randomization& r, const std::vector<RandomElement>& tuple,
                  const std::vector<RandomElement>& params = {});

// nu({q : M satisfies phi at q's representative}); vars name the coordinates.
Rational formula_mass(const RMeasure& nu, const Formula& phi, const std::vector<std::string>& vars);

// "rtype { q0: p/q, q1: p/q }"
std::string print_rmeasure(const RMeasure& nu);
RMeasure parse_rmeasure(std::string_view text, TypeSpacePtr space, int param_count = 0);

// A base whose points split the points of an original base.
struct RefinedBase {
  FinProbSpace base;
  std::vector<int> projection;  // refined point -> original point
  std::vector<int> target;      // refined point -> index of the mass it serves

  // Lifts an element of the original base along the projection.
  RandomElement lift(const RandomElement& f) const;
  Event lift(const Event& e) const;
};

// Lays the points of each group end to end and cuts them at the cumulative
// target masses of the group; split points get labels "<label>.<k>". Each
// group's targets must sum to the mass of its points.
RefinedBase refine(const FinProbSpace& base, const std::vector<std::vector<int>>& groups,
                   const std::vector<std::vector<Rational>>& masses);

struct Realization {
  Randomization rand;
  std::vector<RandomElement> tuple;
  RefinedBase refinement;
};

// A tuple with law nu on a refinement of the base of r: type q is placed at
// its representative on an event of mass nu(q). Parameter coordinates of nu
// are realized too, as extra tuple entries.
Realization realize(const Randomization& r, const RMeasure& nu);

// Total variation distance. Both measures must live on the same space, with
// no parameters.
Rational d_metric(const RMeasure& a, const RMeasure& b);

// The cells where the parameter tuple takes each of its values, in lex order
// of the value, with the 1-type space over that value.
struct ParamCell {
  Tuple value;
  Event event;
  TypeSpacePtr space;
};
std::vector<ParamCell> param_cells(const Randomization& r, const std::vector<RandomElement>& params);

struct CondRealizationSpec {
  std::vector<RandomElement> params;
  // beta[n][q]: the mass on cell n given to the 1-type q over the cell value.
  std::vector<std::map<int, Rational>> beta;
};

struct ConditionalRealization {
  Randomization rand;
  RandomElement f;
  std::vector<RandomElement> params;  // lifted
  std::vector<ParamCell> cells;       // over the refined base
  RefinedBase refinement;
};

// f with mu{w in B_n : f(w) realizes q over b_n} = beta(q, n). Throws
// PreconditionError when a cell's beta does not sum to its mass.
ConditionalRealization realize_conditional(const Randomization& r, const CondRealizationSpec& spec);

// All distributions on the space with a common denominator at most max_den,
// each listed once.
std::vector<RMeasure> measure_battery(const TypeSpacePtr& space, int max_den);

struct CategoricityReport {
  std::vector<int> type_counts;  // |S_n| for n = 1..n_max
  int measures_checked = 0;
  int realized = 0;
  bool omega_categorical = true;  // always true for a finite structure
  std::vector<std::string> lines;
};

// For n up to n_max, counts S_n and realizes every measure of the battery
// (denominators up to 4) on spaces with at most 4 types, over a one-point
// base and over (1/2, 1/3, 1/6), checking each round trip.
CategoricityReport check_omega_categoricity(const StructurePtr& m, int n_max);

}  // namespace randlab
