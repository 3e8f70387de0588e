#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "randlab/measure.hpp"
#include "randlab/rational.hpp"

namespace randlab {

// maximize c.x subject to a x = b, x >= 0. Exact; Bland's rule.
struct LinearProgram {
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  std::vector<Rational> c;
};

struct SimplexResult {
  enum class Status { kOptimal, kInfeasible, kUnbounded } status;
  std::vector<Rational> x;
  Rational value;
  // When infeasible: y with y.a <= 0 columnwise and y.b > 0.
  std::vector<Rational> farkas;
};

SimplexResult solve_lp(const LinearProgram& lp);

enum class Relation { kLessEq, kEqual };

struct Constraint {
  RationalFn phi;
  Rational bound;
  Relation rel = Relation::kLessEq;
};

struct LinFeasProblem {
  int ground_size = 0;
  std::vector<Constraint> constraints;
};

// Either a measure (weights over the ground set, zeros allowed) meeting every
// constraint, or integer multipliers m_i refuting the problem:
//   for <= problems: m_i >= 0, sum m_i phi_i >= n pointwise, sum m_i bound_i < n;
//   for =  problems: sum m_i phi_i >= 0 pointwise, sum m_i bound_i < 0.
struct Certificate {
  bool feasible = false;
  std::vector<Rational> measure;
  std::vector<BigInt> multipliers;
  Rational n;
  // The constraints the certificate refers to (the input, plus the constant
  // function 1 when an equality problem lacked it).
  LinFeasProblem problem;
};

Certificate extend_measure_ineq(const LinFeasProblem& prob);
Certificate extend_measure_eq(const LinFeasProblem& prob);

// Re-checks a certificate exactly against its own problem.
bool verify_certificate(const Certificate& cert);

// The least value beta such that adding <psi> <= beta keeps the <= system
// refutation-free: sup over alpha >= 0 of inf(psi + sum alpha_i phi_i) -
// sum alpha_i bound_i. Empty when the system itself is infeasible.
std::optional<Rational> lambda_tilde(const LinFeasProblem& prob, const RationalFn& psi);

// One constraint per line: `<=|= <rational> : v1,...,vk`. Blank lines and
// `//` comments are skipped.
LinFeasProblem parse_problem(std::string_view text);
std::string print_problem(const LinFeasProblem& prob);
std::string print_certificate(const Certificate& cert);

}  // namespace randlab
