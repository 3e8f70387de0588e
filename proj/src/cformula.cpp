#include "randlab/cformula.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "formula_parser.hpp"
#include "lexer.hpp"

namespace randlab {

EventTerm EventTerm::of(Formula phi) {
  EventTerm e;
  e.kind = Kind::kFormula;
  e.formula = std::make_shared<const Formula>(std::move(phi));
  return e;
}

EventTerm EventTerm::variable(std::string name) {
  EventTerm e;
  e.kind = Kind::kVariable;
  e.name = std::move(name);
  return e;
}

EventTerm EventTerm::top() { return EventTerm{}; }

EventTerm EventTerm::bottom() {
  EventTerm e;
  e.kind = Kind::kBottom;
  return e;
}

namespace {

EventTerm event_node(EventTerm::Kind kind, std::vector<EventTerm> args) {
  EventTerm e;
  e.kind = kind;
  e.args = std::move(args);
  return e;
}

CFormula node(CFormula::Kind kind, std::vector<CFormula> args) {
  CFormula c;
  c.kind = kind;
  c.args = std::move(args);
  return c;
}

}  // namespace

EventTerm EventTerm::negation(EventTerm a) { return event_node(Kind::kNot, {std::move(a)}); }
EventTerm EventTerm::meet(EventTerm a, EventTerm b) { return event_node(Kind::kAnd, {std::move(a), std::move(b)}); }
EventTerm EventTerm::join(EventTerm a, EventTerm b) { return event_node(Kind::kOr, {std::move(a), std::move(b)}); }
EventTerm EventTerm::symmetric_difference(EventTerm a, EventTerm b) {
  return event_node(Kind::kXor, {std::move(a), std::move(b)});
}

CFormula CFormula::constant(Rational v) {
  if (v < 0 || v > 1) throw PreconditionError("constant " + randlab::to_string(v) + " outside [0, 1]");
  CFormula c;
  c.value = std::move(v);
  return c;
}

CFormula CFormula::measure(EventTerm e) {
  CFormula c;
  c.kind = Kind::kMu;
  c.events = {std::move(e)};
  return c;
}

CFormula CFormula::distance_k(std::string f, std::string g) {
  CFormula c;
  c.kind = Kind::kDK;
  c.names = {std::move(f), std::move(g)};
  return c;
}

CFormula CFormula::distance_b(EventTerm a, EventTerm b) {
  CFormula c;
  c.kind = Kind::kDB;
  c.events = {std::move(a), std::move(b)};
  return c;
}

CFormula CFormula::one_minus(CFormula u) { return node(Kind::kOneMinus, {std::move(u)}); }
CFormula CFormula::minus(CFormula u, CFormula v) { return node(Kind::kMinus, {std::move(u), std::move(v)}); }
CFormula CFormula::half(CFormula u) { return node(Kind::kHalf, {std::move(u)}); }
CFormula CFormula::min(CFormula u, CFormula v) { return node(Kind::kMin, {std::move(u), std::move(v)}); }
CFormula CFormula::max(CFormula u, CFormula v) { return node(Kind::kMax, {std::move(u), std::move(v)}); }

CFormula CFormula::sup(std::string var, CFormula body) {
  CFormula c = node(Kind::kSup, {std::move(body)});
  c.names = {std::move(var)};
  return c;
}

CFormula CFormula::inf(std::string var, CFormula body) {
  CFormula c = node(Kind::kInf, {std::move(body)});
  c.names = {std::move(var)};
  return c;
}

bool is_event_variable(std::string_view name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name[0]));
}

namespace {

void add_unique(std::vector<std::string>& out, const std::string& v, const std::vector<std::string>& bound) {
  if (std::find(bound.begin(), bound.end(), v) != bound.end()) return;
  if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

void collect(const EventTerm& e, std::vector<std::string>& elems, std::vector<std::string>& events,
             const std::vector<std::string>& bound) {
  switch (e.kind) {
    case EventTerm::Kind::kFormula:
      for (const auto& v : e.formula->free_vars()) add_unique(elems, v, bound);
      break;
    case EventTerm::Kind::kVariable:
      add_unique(events, e.name, bound);
      break;
    default:
      for (const auto& a : e.args) collect(a, elems, events, bound);
  }
}

void collect(const CFormula& c, std::vector<std::string>& elems, std::vector<std::string>& events,
             std::vector<std::string>& bound) {
  switch (c.kind) {
    case CFormula::Kind::kDK:
      for (const auto& v : c.names) add_unique(elems, v, bound);
      break;
    case CFormula::Kind::kSup:
    case CFormula::Kind::kInf:
      bound.push_back(c.names[0]);
      collect(c.args[0], elems, events, bound);
      bound.pop_back();
      return;
    default:
      break;
  }
  for (const auto& e : c.events) collect(e, elems, events, bound);
  for (const auto& a : c.args) collect(a, elems, events, bound);
}

}  // namespace

std::vector<std::string> free_element_vars(const CFormula& phi) {
  std::vector<std::string> elems, events, bound;
  collect(phi, elems, events, bound);
  return elems;
}

std::vector<std::string> free_event_vars(const CFormula& phi) {
  std::vector<std::string> elems, events, bound;
  collect(phi, elems, events, bound);
  return events;
}

// Printing.

namespace {

int event_level(const EventTerm& e) {
  switch (e.kind) {
    case EventTerm::Kind::kOr:
    case EventTerm::Kind::kXor:
      return 0;
    case EventTerm::Kind::kAnd:
      return 1;
    default:
      return 2;
  }
}

std::string print_event_at(const EventTerm& e, int level) {
  std::string s;
  switch (e.kind) {
    case EventTerm::Kind::kFormula:
      s = "[[" + to_string(*e.formula) + "]]";
      break;
    case EventTerm::Kind::kTop:
      s = "top";
      break;
    case EventTerm::Kind::kBottom:
      s = "bot";
      break;
    case EventTerm::Kind::kVariable:
      s = e.name;
      break;
    case EventTerm::Kind::kNot:
      s = "!" + print_event_at(e.args[0], 2);
      break;
    case EventTerm::Kind::kAnd:
      s = print_event_at(e.args[0], 1) + " & " + print_event_at(e.args[1], 2);
      break;
    case EventTerm::Kind::kOr:
    case EventTerm::Kind::kXor:
      s = print_event_at(e.args[0], 0) + (e.kind == EventTerm::Kind::kOr ? " | " : " ^ ") +
          print_event_at(e.args[1], 1);
      break;
  }
  return event_level(e) < level ? "(" + s + ")" : s;
}

std::string print_at(const CFormula& c, bool primary);

std::string print_primary(const CFormula& c) { return print_at(c, true); }

std::string print_at(const CFormula& c, bool primary) {
  switch (c.kind) {
    case CFormula::Kind::kConstant:
      return to_string(c.value);
    case CFormula::Kind::kMu:
      if (c.events[0].kind == EventTerm::Kind::kFormula) return "mu[[" + to_string(*c.events[0].formula) + "]]";
      return "mu[" + to_string(c.events[0]) + "]";
    case CFormula::Kind::kDK:
      return "dK(" + c.names[0] + ", " + c.names[1] + ")";
    case CFormula::Kind::kDB:
      return "dB(" + to_string(c.events[0]) + ", " + to_string(c.events[1]) + ")";
    case CFormula::Kind::kOneMinus:
      return "~" + print_primary(c.args[0]);
    case CFormula::Kind::kMinus: {
      std::string s = print_at(c.args[0], false) + " -. " + print_primary(c.args[1]);
      return primary ? "(" + s + ")" : s;
    }
    case CFormula::Kind::kHalf:
      return "half(" + print_at(c.args[0], false) + ")";
    case CFormula::Kind::kMin:
    case CFormula::Kind::kMax:
      return std::string(c.kind == CFormula::Kind::kMin ? "min(" : "max(") + print_at(c.args[0], false) + ", " +
             print_at(c.args[1], false) + ")";
    case CFormula::Kind::kSup:
    case CFormula::Kind::kInf:
      return std::string(c.kind == CFormula::Kind::kSup ? "sup " : "inf ") + c.names[0] + " (" +
             print_at(c.args[0], false) + ")";
  }
  return "";
}

}  // namespace

std::string to_string(const EventTerm& e) { return print_event_at(e, 0); }
std::string to_string(const CFormula& phi) { return print_at(phi, false); }

// Parsing.

namespace {

using detail::Tok;
using detail::TokenStream;

bool is_element_name(const std::string& s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c));
  });
}

bool is_event_name(const std::string& s) {
  if (s.empty() || !std::isupper(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

class CParser {
 public:
  CParser(TokenStream& ts, const Signature& sig) : ts_(ts), sig_(sig) {}

  CFormula real() {
    CFormula left = postfix();
    while (ts_.is("-.") || ts_.is("-")) {
      ts_.next();
      left = CFormula::minus(std::move(left), postfix());
    }
    return left;
  }

  EventTerm event() {
    EventTerm left = event_and();
    while (ts_.is("|") || ts_.is("^")) {
      bool is_or = ts_.next().text == "|";
      EventTerm right = event_and();
      left = is_or ? EventTerm::join(std::move(left), std::move(right))
                   : EventTerm::symmetric_difference(std::move(left), std::move(right));
    }
    return left;
  }

 private:
  CFormula postfix() {
    CFormula u = unary();
    while (ts_.is("/")) {
      ts_.next();
      if (ts_.peek().kind != Tok::kInt || ts_.peek().text != "2") ts_.fail("only division by 2 is allowed");
      ts_.next();
      u = CFormula::half(std::move(u));
    }
    return u;
  }

  CFormula unary() {
    if (ts_.accept("~")) return CFormula::one_minus(unary());
    return primary();
  }

  Rational literal() {
    std::size_t pos = ts_.peek().pos;
    std::string text = ts_.next().text;
    if (ts_.is("/") && ts_.peek(1).kind == Tok::kInt) {
      ts_.next();
      text += "/" + ts_.next().text;
    }
    Rational v = parse_rational(text);
    if (v > 1) throw ParseError("constant " + to_string(v) + " outside [0, 1]", pos);
    return v;
  }

  std::vector<std::string> bound_names() {
    std::vector<std::string> names;
    do {
      std::size_t pos = ts_.peek().pos;
      std::string v = ts_.expect_ident();
      if (!is_element_name(v) && !is_event_name(v)) throw ParseError("bad variable name '" + v + "'", pos);
      names.push_back(v);
    } while (ts_.accept(","));
    return names;
  }

  CFormula quantifier(bool sup, std::vector<std::string> names) {
    CFormula body = unary();
    for (auto it = names.rbegin(); it != names.rend(); ++it)
      body = sup ? CFormula::sup(*it, std::move(body)) : CFormula::inf(*it, std::move(body));
    return body;
  }

  Formula inner_formula() {
    detail::FormulaParser fp(ts_, sig_);
    return fp.formula();
  }

  CFormula primary() {
    const auto& t = ts_.peek();
    if (t.kind == Tok::kInt) return CFormula::constant(literal());
    if (ts_.accept("(")) {
      CFormula u = real();
      ts_.expect(")");
      return u;
    }
    if (t.kind != Tok::kIdent) ts_.fail("expected a real-valued term");
    const std::string word = t.text;
    if (word == "mu") {
      ts_.next();
      ts_.expect("[");
      if (ts_.is("[") && !ts_.is("[", 1)) {
        ts_.next();
        Formula phi = inner_formula();
        ts_.expect("]");
        ts_.expect("]");
        return CFormula::measure(EventTerm::of(std::move(phi)));
      }
      EventTerm e = event();
      ts_.expect("]");
      return CFormula::measure(std::move(e));
    }
    if (word == "P" && ts_.is("[", 1)) {
      ts_.next();
      ts_.next();
      Formula phi = inner_formula();
      ts_.expect("]");
      return CFormula::measure(EventTerm::of(std::move(phi)));
    }
    if (word == "dK" && ts_.is("(", 1)) {
      ts_.next();
      ts_.next();
      std::string f = element_name();
      ts_.expect(",");
      std::string g = element_name();
      ts_.expect(")");
      return CFormula::distance_k(std::move(f), std::move(g));
    }
    if (word == "dB" && ts_.is("(", 1)) {
      ts_.next();
      ts_.next();
      EventTerm a = event();
      ts_.expect(",");
      EventTerm b = event();
      ts_.expect(")");
      return CFormula::distance_b(std::move(a), std::move(b));
    }
    if ((word == "half" || word == "min" || word == "max") && ts_.is("(", 1)) {
      ts_.next();
      ts_.next();
      CFormula u = real();
      if (word == "half") {
        ts_.expect(")");
        return CFormula::half(std::move(u));
      }
      ts_.expect(",");
      CFormula v = real();
      ts_.expect(")");
      return word == "min" ? CFormula::min(std::move(u), std::move(v)) : CFormula::max(std::move(u), std::move(v));
    }
    if (word == "sup" || word == "inf") {
      ts_.next();
      return quantifier(word == "sup", bound_names());
    }
    if (word.rfind("sup_", 0) == 0 || word.rfind("inf_", 0) == 0) {
      std::string v = word.substr(4);
      if (!is_element_name(v) && !is_event_name(v)) ts_.fail("bad quantified variable");
      ts_.next();
      std::vector<std::string> names{v};
      if (ts_.accept(",")) {
        auto more = bound_names();
        names.insert(names.end(), more.begin(), more.end());
      }
      return quantifier(word[0] == 's', std::move(names));
    }
    throw ResolutionError("unknown real-valued term '" + word + "' at position " + std::to_string(t.pos));
  }

  std::string element_name() {
    std::size_t pos = ts_.peek().pos;
    std::string v = ts_.expect_ident();
    if (!is_element_name(v)) throw ParseError("expected a random-element variable, found '" + v + "'", pos);
    return v;
  }

  EventTerm event_and() {
    EventTerm left = event_not();
    while (ts_.accept("&")) left = EventTerm::meet(std::move(left), event_not());
    return left;
  }

  EventTerm event_not() {
    if (ts_.accept("!")) return EventTerm::negation(event_not());
    return event_atom();
  }

  EventTerm event_atom() {
    if (ts_.is("[") && ts_.is("[", 1)) {
      ts_.next();
      ts_.next();
      Formula phi = inner_formula();
      ts_.expect("]");
      ts_.expect("]");
      return EventTerm::of(std::move(phi));
    }
    if (ts_.accept("(")) {
      EventTerm e = event();
      ts_.expect(")");
      return e;
    }
    if (ts_.is_word("top")) {
      ts_.next();
      return EventTerm::top();
    }
    if (ts_.is_word("bot")) {
      ts_.next();
      return EventTerm::bottom();
    }
    const auto& t = ts_.peek();
    if (t.kind == Tok::kIdent && is_event_name(t.text)) return EventTerm::variable(ts_.next().text);
    ts_.fail("expected an event term");
  }

  TokenStream& ts_;
  const Signature& sig_;
};

}  // namespace

CFormula parse_cformula(std::string_view text, const Signature& sig) {
  TokenStream ts(text);
  CParser p(ts, sig);
  CFormula c = p.real();
  if (!ts.at_end()) ts.fail("unexpected trailing input");
  return c;
}

EventTerm parse_event_term(std::string_view text, const Signature& sig) {
  TokenStream ts(text);
  CParser p(ts, sig);
  EventTerm e = p.event();
  if (!ts.at_end()) ts.fail("unexpected trailing input");
  return e;
}

// Evaluation.

namespace {

double sort_size(const Randomization& r, const std::string& var) {
  return is_event_variable(var) ? std::ldexp(1.0, r.size()) : r.element_count_approx();
}

class Evaluator {
 public:
  Evaluator(const Randomization& r, const CAssignment& val) : r_(r), val_(val) {}

  Rational real(const CFormula& c) {
    switch (c.kind) {
      case CFormula::Kind::kConstant:
        return c.value;
      case CFormula::Kind::kMu:
        return measure(event(c.events[0]));
      case CFormula::Kind::kDK:
        return dK(r_, element(c.names[0]), element(c.names[1]));
      case CFormula::Kind::kDB:
        return measure(event(c.events[0]) ^ event(c.events[1]));
      case CFormula::Kind::kOneMinus:
        return 1 - real(c.args[0]);
      case CFormula::Kind::kMinus: {
        Rational v = real(c.args[0]) - real(c.args[1]);
        return v < 0 ? Rational(0) : v;
      }
      case CFormula::Kind::kHalf:
        return real(c.args[0]) / 2;
      case CFormula::Kind::kMin:
        return std::min(real(c.args[0]), real(c.args[1]));
      case CFormula::Kind::kMax:
        return std::max(real(c.args[0]), real(c.args[1]));
      case CFormula::Kind::kSup:
      case CFormula::Kind::kInf:
        return quantify(c);
    }
    return 0;
  }

  Event event(const EventTerm& e) {
    switch (e.kind) {
      case EventTerm::Kind::kFormula:
        return formula_event(e);
      case EventTerm::Kind::kTop:
        return r_.full_event();
      case EventTerm::Kind::kBottom:
        return r_.empty_event();
      case EventTerm::Kind::kVariable: {
        auto it = val_.events.find(e.name);
        if (it == val_.events.end()) throw PreconditionError("event variable " + e.name + " is not assigned");
        r_.check_event(it->second);
        return it->second;
      }
      case EventTerm::Kind::kNot:
        return ~event(e.args[0]);
      case EventTerm::Kind::kAnd:
        return event(e.args[0]) & event(e.args[1]);
      case EventTerm::Kind::kOr:
        return event(e.args[0]) | event(e.args[1]);
      case EventTerm::Kind::kXor:
        return event(e.args[0]) ^ event(e.args[1]);
    }
    return r_.empty_event();
  }

 private:
  // Truth table of one [[phi]] atom on one structure, filled lazily.
  struct Atom {
    std::unique_ptr<CompiledFormula> compiled;
    std::vector<std::string> vars;
    std::unordered_map<const FinStructure*, std::vector<signed char>> tables;
  };

  static constexpr std::size_t kMaxTable = 1 << 16;

  Rational measure(const Event& e) const {
    Rational total = 0;
    for (auto w = e.find_first(); w != Event::npos; w = e.find_next(w)) total += r_.base().weight(static_cast<int>(w));
    return total;
  }

  const RandomElement& element(const std::string& name) const {
    auto it = val_.elements.find(name);
    if (it == val_.elements.end()) throw PreconditionError("random element " + name + " is not assigned");
    return it->second;
  }

  Atom& atom(const EventTerm& e) {
    auto [it, fresh] = atoms_.try_emplace(e.formula.get());
    if (fresh) {
      it->second.vars = e.formula->free_vars();
      it->second.compiled = std::make_unique<CompiledFormula>(*e.formula, it->second.vars);
    }
    return it->second;
  }

  Event formula_event(const EventTerm& e) {
    Atom& a = atom(e);
    std::vector<const RandomElement*> args;
    for (const auto& v : a.vars) args.push_back(&element(v));
    Event out = r_.empty_event();
    std::vector<Element> values(args.size());
    for (int w = 0; w < r_.size(); ++w) {
      const FinStructure& m = r_.at(w);
      std::size_t code = 0;
      for (std::size_t i = 0; i < args.size(); ++i) {
        values[i] = (*args[i])[static_cast<std::size_t>(w)];
        code = code * static_cast<std::size_t>(m.size()) + static_cast<std::size_t>(values[i]);
      }
      std::size_t cells = 1;
      for (std::size_t i = 0; i < args.size() && cells <= kMaxTable; ++i) cells *= static_cast<std::size_t>(m.size());
      bool truth;
      if (cells <= kMaxTable) {
        auto& table = a.tables[&m];
        if (table.empty()) table.assign(cells, -1);
        auto& cell = table[code];
        if (cell < 0) cell = a.compiled->eval(m, values) ? 1 : 0;
        truth = cell == 1;
      } else {
        truth = a.compiled->eval(m, values);
      }
      if (truth) out.set(static_cast<std::size_t>(w));
    }
    return out;
  }

  Rational quantify(const CFormula& c) {
    const bool sup = c.kind == CFormula::Kind::kSup;
    const std::string& var = c.names[0];
    const Rational stop = sup ? Rational(1) : Rational(0);
    std::optional<Rational> best;
    auto consider = [&](Rational v) {
      if (!best || (sup ? v > *best : v < *best)) best = std::move(v);
      return *best == stop;
    };
    if (is_event_variable(var)) {
      if (r_.size() > 62) throw BudgetExceeded("event quantifier", sort_size(r_, var), 0x1p62);
      auto saved = val_.events.find(var) != val_.events.end() ? std::optional<Event>(val_.events[var]) : std::nullopt;
      const unsigned long long count = 1ULL << r_.size();
      for (unsigned long long bits = 0; bits < count; ++bits) {
        val_.events[var] = Event(static_cast<std::size_t>(r_.size()), bits);
        if (consider(real(c.args[0]))) break;
      }
      restore(val_.events, var, saved);
    } else {
      auto saved = val_.elements.find(var) != val_.elements.end() ? std::optional<RandomElement>(val_.elements[var])
                                                                 : std::nullopt;
      RandomElement f(static_cast<std::size_t>(r_.size()), 0);
      do {
        val_.elements[var] = f;
        if (consider(real(c.args[0]))) break;
      } while (r_.next_element(f));
      restore(val_.elements, var, saved);
    }
    return *best;
  }

  template <class Map, class Value>
  static void restore(Map& m, const std::string& var, const std::optional<Value>& saved) {
    if (saved) m[var] = *saved;
    else m.erase(var);
  }

  const Randomization& r_;
  CAssignment val_;
  std::unordered_map<const Formula*, Atom> atoms_;
};

}  // namespace

double evaluation_cost(const Randomization& r, const CFormula& phi) {
  switch (phi.kind) {
    case CFormula::Kind::kSup:
    case CFormula::Kind::kInf:
      return sort_size(r, phi.names[0]) * evaluation_cost(r, phi.args[0]);
    default: {
      double total = 1;
      for (const auto& a : phi.args) total += evaluation_cost(r, a);
      return total;
    }
  }
}

Rational eval_cformula(const Randomization& r, const CFormula& phi, const CAssignment& val, double budget) {
  double cost = evaluation_cost(r, phi);
  if (cost > budget) throw BudgetExceeded("eval " + to_string(phi), cost, budget);
  for (const auto& [name, f] : val.elements) r.check_element(f);
  Evaluator ev(r, val);
  return ev.real(phi);
}

Event eval_event(const Randomization& r, const EventTerm& e, const CAssignment& val) {
  for (const auto& [name, f] : val.elements) r.check_element(f);
  Evaluator ev(r, val);
  return ev.event(e);
}

}  // namespace randlab
