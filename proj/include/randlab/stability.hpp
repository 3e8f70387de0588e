#pragma once

#include <optional>
#include <string>
#include <vector>

#include "randlab/linear_feasibility.hpp"
#include "randlab/measure.hpp"
#include "randlab/randomization.hpp"
#include "randlab/rtype.hpp"
#include "randlab/type_space.hpp"

namespace randlab {

// A formula phi(x, y, w) with its variable groups. w names the coordinates of
// a parameter tuple W; params, when set, assigns them. phi may leave some of
// w unused.
struct PhiContext {
  StructurePtr m;
  Formula phi;
  std::vector<std::string> x;
  std::vector<std::string> y;
  std::vector<std::string> w;
  Tuple params;

  // Throws PreconditionError when the groups overlap, miss a free variable of
  // phi, or (with need_params) params has the wrong length.
  void validate(bool need_params = true) const;
  PhiContext with_params(Tuple values) const;
};

// The trace {b : M |= phi(a, b, params)} of a realized global phi-type, with
// its lex-least realization.
struct PhiType {
  std::vector<Tuple> trace;
  Tuple witness;

  bool contains(const Tuple& b) const;
  bool operator==(const PhiType&) const = default;
};

struct Ladder {
  int length = 0;
  std::vector<Tuple> a;
  std::vector<Tuple> b;
};

// The longest sequence (up to bound) with phi(a_i, b_j) iff i < j, found by
// depth-first search. With n = 1 the condition is only !phi(a_0, b_0).
Ladder find_ladder(const PhiContext& ctx, int bound);
int ladder_length(const PhiContext& ctx, int bound);

// The trace of a single tuple a.
PhiType phi_type_of(const PhiContext& ctx, const Tuple& a);

// The distinct traces over all a, ordered by witness.
std::vector<PhiType> phi_type_space(const PhiContext& ctx);

struct RankMult {
  std::optional<int> rank;  // empty: pi is inconsistent (rank -infinity)
  int multiplicity = 0;
};

// Cantor-Bendixson rank and multiplicity of [pi] in S_phi(M). pi is a formula
// in the x variables with parameters as element literals.
RankMult cb_rank_mult(const PhiContext& ctx, const Formula& pi);

// The phi-types compatible with p: traces of the realizations of p, where p
// is a type of the x tuple over the context parameters.
std::vector<PhiType> compatible_phi_types(const PhiContext& ctx, const TypeSpace& space, int p);

// rho(p, b) as the fraction of compatible phi-types containing phi(x, b).
Rational rho_fraction(const PhiContext& ctx, int p, const Tuple& b);
// rho(p, b) as M(p + phi(x,b), phi, 0) / M(p, phi, 0), with p presented by its
// isolating formula.
Rational rho_multiplicity(const PhiContext& ctx, int p, const Tuple& b);
// Both of the above; throws std::logic_error if they ever disagree. p indexes
// the |x|-type space over params; PreconditionError when it is out of range.
Rational rho(const PhiContext& ctx, int p, const Tuple& b);
// b given by its type over the parameters (the representative is used).
Rational rho(const PhiContext& ctx, int p, const TypeId& b);

// S_{x,W} x_{S_W} S_{y,W}: the projections restrict a type to its trailing
// W coordinates.
struct FiberTypeSpace {
  TypeSpacePtr sx;
  TypeSpacePtr sy;
  TypeSpacePtr sw;
  FiberSpace fiber;
};

FiberTypeSpace make_fiber_type_space(const StructurePtr& m, int nx, int ny, int nw);

// The restriction map from an (n + nw)-type space to the nw-type space.
MeasurableMap restrict_to_params(const TypeSpace& space, const TypeSpace& sw, int nw);

// rho at a point (p0, q0) of the fiber: the parameters are realized by p0's
// representative and b is moved onto them by an automorphism.
Rational rho_at(const PhiContext& ctx, const FiberTypeSpace& fts, int point);

// rho on every point of the fiber.
RationalFn rho_function(const PhiContext& ctx, const FiberTypeSpace& fts);

// E[rho] under p (x) q over S_W. Both measures must have param_count = |w|;
// PreconditionError when the W-marginals differ.
Rational rho_hat(const PhiContext& ctx, const RMeasure& p, const RMeasure& q);

// The extension of p to the new parameters ybar = (y_0, ..., y_{k-1}), each a
// copy of the y group, with q the law of (ybar, W). For each (p0, q0) of the
// fiber the mass is split evenly over the compatible phi-types of p0 and,
// within one, evenly over the realizations carrying it. The result lives on
// the (|x| + |ybar| + |W|)-type space with parameter count |ybar| + |W|.
RMeasure nonforking_extension(const PhiContext& ctx, const RMeasure& p, const RMeasure& q);

// The linear system over S_{x,ybar,W}: x,W-marginal p, ybar,W-marginal q,
// and P[phi(x, y_i)] = rho_hat(p, q_i) for every i.
struct StationaritySystem {
  TypeSpacePtr target;
  LinFeasProblem problem;
  std::vector<Rational> rho_hats;
  std::vector<int> rho_rows;  // constraint index of each phi row
};

StationaritySystem stationarity_system(const PhiContext& ctx, const RMeasure& p, const RMeasure& q);

struct StationarityReport {
  bool marginals_ok = false;
  bool rho_hat_ok = false;
  bool certified = false;       // extend_measure_eq found the system feasible
  bool certificate_ok = false;  // and the certificate re-verifies
  bool satisfies_system = false;
  int positivity_trials = 0;
  bool positivity_ok = false;
  std::vector<Rational> rho_hats;
  std::vector<Rational> phi_values;

  bool all_ok() const {
    return marginals_ok && rho_hat_ok && certified && certificate_ok && satisfies_system && positivity_ok;
  }
};

// Checks an extension against the system. The positivity check draws random
// integer multipliers y for the rows, shifts the constant row so that the
// combination is pointwise nonnegative on the target space, and confirms the
// combined bounds are then nonnegative too.
StationarityReport certify_extension(const PhiContext& ctx, const RMeasure& p, const RMeasure& q,
                                     const RMeasure& extension, int positivity_trials = 64,
                                     unsigned seed = 1);

// The classes of tuples (x, y, w) up to quantifier depth `depth`, as unions
// of orbits of the type space of that arity. depth >= |M| gives the orbits
// themselves. result[k] lists the orbits of class k.
std::vector<std::vector<int>> depth_classes(const TypeSpace& space, int depth);

struct IndependenceOptions {
  int depth = -1;        // quantifier depth; -1 means |M|
  int max_classes = 12;  // above this, only single classes and their complements
};

struct IndependenceVerdict {
  bool independent = true;
  int formulas_checked = 0;
  std::optional<Formula> witness;
  std::vector<std::string> vars;  // x group, then y group, then w
  Rational lhs;
  Rational rhs;
};

// c is independent from b over A when P[phi(c, b, a)] = rho_hat_phi(tp(c/A),
// tp(b/A)) for every phi(x, y, w) of the fragment, where w ranges over the
// subtuples of A. The first violation is returned.
IndependenceVerdict check_independence(const Randomization& r, const std::vector<RandomElement>& c,
                                       const std::vector<RandomElement>& b, const std::vector<RandomElement>& a,
                                       const IndependenceOptions& options = {});

// Formulas phi(x, y, w) for testing rho: the formula corpus in x, y plus
// literal combinations mentioning w.
std::vector<Formula> phi_corpus(const Signature& sig, int limit = 60);

}  // namespace randlab
