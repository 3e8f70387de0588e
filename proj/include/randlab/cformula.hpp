#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "randlab/randomization.hpp"

namespace randlab {

// Terms of the event sort.
struct EventTerm {
  enum class Kind { kFormula, kTop, kBottom, kVariable, kNot, kAnd, kOr, kXor };

  Kind kind = Kind::kTop;
  std::shared_ptr<const Formula> formula;  // kFormula
  std::string name;                        // kVariable
  std::vector<EventTerm> args;

  static EventTerm of(Formula phi);
  static EventTerm variable(std::string name);
  static EventTerm top();
  static EventTerm bottom();
  static EventTerm negation(EventTerm a);
  static EventTerm meet(EventTerm a, EventTerm b);
  static EventTerm join(EventTerm a, EventTerm b);
  static EventTerm symmetric_difference(EventTerm a, EventTerm b);
};

// Continuous formulas with values in [0, 1].
struct CFormula {
  enum class Kind {
    kConstant,  // value
    kMu,        // mu[event]
    kDK,        // dK(names[0], names[1])
    kDB,        // dB(events[0], events[1])
    kOneMinus,  // 1 - u
    kMinus,     // truncated u - v
    kHalf,
    kMin,
    kMax,
    kSup,  // over names[0]; lowercase ranges over random elements, uppercase over events
    kInf,
  };

  Kind kind = Kind::kConstant;
  Rational value;
  std::vector<std::string> names;
  std::vector<EventTerm> events;
  std::vector<CFormula> args;

  static CFormula constant(Rational v);
  static CFormula measure(EventTerm e);
  static CFormula distance_k(std::string f, std::string g);
  static CFormula distance_b(EventTerm a, EventTerm b);
  static CFormula one_minus(CFormula u);
  static CFormula minus(CFormula u, CFormula v);
  static CFormula half(CFormula u);
  static CFormula min(CFormula u, CFormula v);
  static CFormula max(CFormula u, CFormula v);
  static CFormula sup(std::string var, CFormula body);
  static CFormula inf(std::string var, CFormula body);
};

// Variables starting with an uppercase letter are of the event sort.
bool is_event_variable(std::string_view name);

// Free variables of each sort, in order of first occurrence.
std::vector<std::string> free_element_vars(const CFormula& phi);
std::vector<std::string> free_event_vars(const CFormula& phi);

std::string to_string(const EventTerm& e);
std::string to_string(const CFormula& phi);

// Real terms: p/q literals, mu[[ phi ]], mu[ E ], P[ phi ], dK(f, g),
// dB(E, F), ~u, 1 - u, u -. v (also u - v), u / 2, half(u), min(u, v),
// max(u, v), sup x (u), inf x (u) (also sup_x, inf_x, and lists x, y).
// Event terms: [[ phi ]], top, bot, uppercase variables, ! & | ^.
CFormula parse_cformula(std::string_view text, const Signature& sig);
EventTerm parse_event_term(std::string_view text, const Signature& sig);

struct CAssignment {
  std::map<std::string, RandomElement, std::less<>> elements;
  std::map<std::string, Event, std::less<>> events;
};

inline constexpr double kDefaultBudget = 1 << 22;

// Number of body evaluations an exhaustive evaluation needs.
double evaluation_cost(const Randomization& r, const CFormula& phi);

// Exact value. Quantifiers enumerate all random elements or all events;
// throws BudgetExceeded if evaluation_cost exceeds the budget, and
// PreconditionError on an unassigned free variable.
Rational eval_cformula(const Randomization& r, const CFormula& phi, const CAssignment& val = {},
                       double budget = kDefaultBudget);

Event eval_event(const Randomization& r, const EventTerm& e, const CAssignment& val = {});

}  // namespace randlab
