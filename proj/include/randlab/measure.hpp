#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "randlab/rational.hpp"

namespace randlab {

// A finite sample space with strictly positive rational weights summing to 1.
class FinProbSpace {
 public:
  FinProbSpace() = default;
  // Throws PreconditionError unless labels are unique, weights positive and
  // the total is exactly 1.
  FinProbSpace(std::vector<std::string> labels, std::vector<Rational> weights);

  // No validation at all; for exercising the axiom checker on broken input.
  static FinProbSpace unchecked(std::vector<std::string> labels, std::vector<Rational> weights);
  static FinProbSpace uniform(int n, const std::string& prefix = "w");
  // 2^depth points of weight 2^-depth.
  static FinProbSpace dyadic(int depth, const std::string& prefix = "w");

  int size() const { return static_cast<int>(weights_.size()); }
  const std::string& label(int i) const { return labels_.at(static_cast<std::size_t>(i)); }
  const Rational& weight(int i) const { return weights_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Rational>& weights() const { return weights_; }
  std::optional<int> index_of(const std::string& label) const;
  Rational total() const { return sum(weights_); }
  Rational min_weight() const;

  bool operator==(const FinProbSpace&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<Rational> weights_;
};

// A total map from the points 0..n-1 of a domain to a labelled codomain.
struct MeasurableMap {
  std::vector<std::string> codomain;
  std::vector<int> image;  // image[x] indexes codomain

  int operator()(int x) const { return image.at(static_cast<std::size_t>(x)); }
};

// Values indexed by the points of a space.
using RationalFn = std::vector<Rational>;

FinProbSpace image_measure(const FinProbSpace& mu, const MeasurableMap& pi);

// E[f | pi] as a function on pi's codomain; points whose fiber has measure
// zero carry no value.
std::vector<std::optional<Rational>> cond_exp(const FinProbSpace& mu, const RationalFn& f, const MeasurableMap& pi);

// The integral of phi against mu.
Rational pair(const RationalFn& phi, const FinProbSpace& mu);

// The set-theoretic fiber product of pi_x and pi_y over their common
// codomain, points ordered lexicographically by (x, y).
struct FiberSpace {
  MeasurableMap pi_x;
  MeasurableMap pi_y;
  std::vector<std::pair<int, int>> points;

  int size() const { return static_cast<int>(points.size()); }
};

FiberSpace make_fiber_space(MeasurableMap pi_x, MeasurableMap pi_y);

// mu (x) nu over Z. Requires the two image measures on Z to coincide;
// otherwise throws PreconditionError naming the first differing point.
FinProbSpace fiber_product(const FinProbSpace& mu, const FinProbSpace& nu, const FiberSpace& fib);

// The mass of the rectangle A x_Z B under the fiber product, computed by one
// of three equivalent integrals: 0 integrates P[A|Z]P[B|Z] over Z, 1
// integrates P[B|Z] o pi_x over A, 2 integrates P[A|Z] o pi_y over B.
Rational rectangle_mass(const FinProbSpace& mu, const FinProbSpace& nu, const FiberSpace& fib,
                        const std::vector<int>& a, const std::vector<int>& b, int formula);

// Marginal of a measure on the fiber space along the x (side 0) or y (side 1)
// projection, as weights over the respective factor (zeros kept).
std::vector<Rational> fiber_marginal(const FinProbSpace& product, const FiberSpace& fib, int side, int factor_size);

}  // namespace randlab
