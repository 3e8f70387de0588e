#include "randlab/randomization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "lexer.hpp"

namespace randlab {

namespace {

void require_size(const Randomization& r, std::size_t n, const char* what) {
  if (n != static_cast<std::size_t>(r.size()))
    throw PreconditionError(std::string(what) + " has " + std::to_string(n) + " points, base has " +
                            std::to_string(r.size()));
}

Event complement_of(const Event& e) { return ~e; }

}  // namespace

Randomization::Randomization(FinProbSpace base, std::vector<StructurePtr> family)
    : base_(std::move(base)), family_(std::move(family)) {
  if (base_.size() == 0) throw PreconditionError("empty base");
  if (family_.size() != static_cast<std::size_t>(base_.size()))
    throw PreconditionError("family has " + std::to_string(family_.size()) + " structures, base has " +
                            std::to_string(base_.size()) + " points");
  for (std::size_t w = 0; w < family_.size(); ++w) {
    if (!family_[w]) throw PreconditionError("missing structure at point " + std::to_string(w));
    if (!(family_[w]->signature() == family_[0]->signature()))
      throw PreconditionError("signature of " + family_[w]->name() + " at point " + base_.label(static_cast<int>(w)) +
                              " differs from " + family_[0]->name());
  }
}

Randomization Randomization::constant(StructurePtr m, FinProbSpace base) {
  std::vector<StructurePtr> family(static_cast<std::size_t>(base.size()), m);
  return Randomization(std::move(base), std::move(family));
}

bool Randomization::is_constant() const {
  return std::all_of(family_.begin(), family_.end(), [&](const StructurePtr& m) { return m == family_[0]; });
}

BigInt Randomization::element_count() const {
  BigInt n = 1;
  for (const auto& m : family_) n *= m->size();
  return n;
}

double Randomization::element_count_approx() const {
  double n = 1;
  for (const auto& m : family_) n *= m->size();
  return n;
}

void Randomization::check_element(const RandomElement& f) const {
  require_size(*this, f.size(), "random element");
  for (int w = 0; w < size(); ++w) {
    Element v = f[static_cast<std::size_t>(w)];
    if (v < 0 || v >= at(w).size())
      throw PreconditionError("value " + std::to_string(v) + " at point " + base_.label(w) + " outside " +
                              at(w).name());
  }
}

void Randomization::check_event(const Event& e) const { require_size(*this, e.size(), "event"); }

RandomElement Randomization::constant_element(Element e) const {
  RandomElement f(static_cast<std::size_t>(size()), e);
  check_element(f);
  return f;
}

bool Randomization::next_element(RandomElement& f) const {
  for (int w = size() - 1; w >= 0; --w) {
    auto& v = f[static_cast<std::size_t>(w)];
    if (++v < at(w).size()) return true;
    v = 0;
  }
  return false;
}

Event event_of(const Randomization& r, const Formula& phi, const std::vector<std::string>& vars,
               const std::vector<RandomElement>& args) {
  if (vars.size() != args.size())
    throw ArityError(std::to_string(vars.size()) + " variables but " + std::to_string(args.size()) + " random elements");
  for (const auto& f : args) r.check_element(f);
  CompiledFormula compiled(phi, vars);
  Event e = r.empty_event();
  std::vector<Element> values(args.size());
  for (int w = 0; w < r.size(); ++w) {
    for (std::size_t i = 0; i < args.size(); ++i) values[i] = args[i][static_cast<std::size_t>(w)];
    if (compiled.eval(r.at(w), values)) e.set(static_cast<std::size_t>(w));
  }
  return e;
}

Event event_of(const Randomization& r, const Formula& phi, const std::vector<RandomElement>& args) {
  return event_of(r, phi, phi.free_vars(), args);
}

Rational mu(const Randomization& r, const Event& e) {
  r.check_event(e);
  Rational total = 0;
  for (auto w = e.find_first(); w != Event::npos; w = e.find_next(w)) total += r.base().weight(static_cast<int>(w));
  return total;
}

Rational dB(const Randomization& r, const Event& a, const Event& b) {
  r.check_event(a);
  r.check_event(b);
  return mu(r, a ^ b);
}

Rational dK(const Randomization& r, const RandomElement& f, const RandomElement& g) {
  r.check_element(f);
  r.check_element(g);
  Rational total = 0;
  for (int w = 0; w < r.size(); ++w)
    if (f[static_cast<std::size_t>(w)] != g[static_cast<std::size_t>(w)]) total += r.base().weight(w);
  return total;
}

RandomElement fullness_witness(const Randomization& r, const Formula& phi, const std::string& x,
                               const std::vector<std::string>& params, const std::vector<RandomElement>& g) {
  if (params.size() != g.size())
    throw ArityError(std::to_string(params.size()) + " parameters but " + std::to_string(g.size()) + " random elements");
  for (const auto& h : g) r.check_element(h);
  std::vector<std::string> vars{x};
  vars.insert(vars.end(), params.begin(), params.end());
  CompiledFormula compiled(phi, vars);
  RandomElement f(static_cast<std::size_t>(r.size()), 0);
  std::vector<Element> values(vars.size());
  for (int w = 0; w < r.size(); ++w) {
    for (std::size_t i = 0; i < g.size(); ++i) values[i + 1] = g[i][static_cast<std::size_t>(w)];
    for (Element a = 0; a < r.at(w).size(); ++a) {
      values[0] = a;
      if (compiled.eval(r.at(w), values)) {
        f[static_cast<std::size_t>(w)] = a;
        break;
      }
    }
  }
  return f;
}

std::pair<RandomElement, RandomElement> event_witness(const Randomization& r, const Event& e) {
  r.check_event(e);
  RandomElement f(static_cast<std::size_t>(r.size()), 0);
  RandomElement g = f;
  for (int w = 0; w < r.size(); ++w) {
    if (r.at(w).size() < 2) throw PreconditionError("structure at point " + r.base().label(w) + " has one element");
    if (!e.test(static_cast<std::size_t>(w))) g[static_cast<std::size_t>(w)] = 1;
  }
  return {f, g};
}

std::string print_element(const RandomElement& f) {
  std::string out = "[";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(f[i]);
  }
  return out + "]";
}

namespace {

std::vector<long long> parse_int_list(std::string_view text) {
  detail::TokenStream ts(text);
  std::vector<long long> out;
  ts.expect("[");
  if (!ts.accept("]")) {
    do out.push_back(ts.expect_int());
    while (ts.accept(","));
    ts.expect("]");
  }
  if (!ts.at_end()) ts.fail("unexpected trailing input");
  return out;
}

}  // namespace

RandomElement parse_element(std::string_view text) {
  RandomElement f;
  for (long long v : parse_int_list(text)) f.push_back(static_cast<Element>(v));
  return f;
}

std::string print_event(const Event& e) {
  std::string out = "[";
  bool first = true;
  for (auto w = e.find_first(); w != Event::npos; w = e.find_next(w)) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(w);
  }
  return out + "]";
}

Event parse_event(std::string_view text, int size) {
  Event e(static_cast<std::size_t>(size));
  for (long long w : parse_int_list(text)) {
    if (w < 0 || w >= size) throw PreconditionError("point " + std::to_string(w) + " outside a base of " + std::to_string(size));
    e.set(static_cast<std::size_t>(w));
  }
  return e;
}

namespace {

Randomization combine(const std::vector<ConvexPart>& parts, std::vector<int>& offsets) {
  if (parts.empty()) throw PreconditionError("no parts");
  Rational total = 0;
  std::vector<std::string> labels;
  std::vector<Rational> weights;
  std::vector<StructurePtr> family;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& p = parts[i];
    if (p.weight <= 0) throw PreconditionError("part " + std::to_string(i) + " has weight " + to_string(p.weight));
    total += p.weight;
    if (!(p.rand.signature() == parts[0].rand.signature()))
      throw PreconditionError("part " + std::to_string(i) + " has a different signature");
    offsets.push_back(static_cast<int>(labels.size()));
    for (int w = 0; w < p.rand.size(); ++w) {
      labels.push_back("p" + std::to_string(i) + "." + p.rand.base().label(w));
      weights.push_back(p.weight * p.rand.base().weight(w));
      family.push_back(p.rand.structure_ptr(w));
    }
  }
  if (total != 1) throw PreconditionError("part weights sum to " + to_string(total));
  return Randomization(FinProbSpace(std::move(labels), std::move(weights)), std::move(family));
}

}  // namespace

ConvexCombination::ConvexCombination(std::vector<ConvexPart> parts)
    : parts_(std::move(parts)), rand_(combine(parts_, offsets_)) {}

RandomElement ConvexCombination::restrict(const RandomElement& f, int part) const {
  rand_.check_element(f);
  auto begin = f.begin() + offset(part);
  return RandomElement(begin, begin + parts_.at(static_cast<std::size_t>(part)).rand.size());
}

Event ConvexCombination::restrict(const Event& e, int part) const {
  rand_.check_event(e);
  const int n = parts_.at(static_cast<std::size_t>(part)).rand.size();
  Event out(static_cast<std::size_t>(n));
  for (int w = 0; w < n; ++w) out[static_cast<std::size_t>(w)] = e[static_cast<std::size_t>(offset(part) + w)];
  return out;
}

RandomElement ConvexCombination::glue(const std::vector<RandomElement>& pieces) const {
  if (pieces.size() != parts_.size())
    throw PreconditionError(std::to_string(pieces.size()) + " pieces for " + std::to_string(parts_.size()) + " parts");
  RandomElement f;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    parts_[i].rand.check_element(pieces[i]);
    f.insert(f.end(), pieces[i].begin(), pieces[i].end());
  }
  return f;
}

EventAlgebra::EventAlgebra(int size, std::vector<Event> atoms) : size_(size), atoms_(std::move(atoms)) {
  Event seen(static_cast<std::size_t>(size));
  for (const auto& a : atoms_) {
    if (a.size() != seen.size()) throw PreconditionError("atom over the wrong number of points");
    if (a.none()) throw PreconditionError("empty atom");
    if (a.intersects(seen)) throw PreconditionError("atoms overlap");
    seen |= a;
  }
  if (!seen.all()) throw PreconditionError("atoms do not cover " + print_event(complement_of(seen)));
  std::sort(atoms_.begin(), atoms_.end(), [](const Event& a, const Event& b) { return a.find_first() < b.find_first(); });
}

EventAlgebra EventAlgebra::generated_by(int size, const std::vector<Event>& generators) {
  std::map<std::vector<bool>, Event> classes;
  for (int w = 0; w < size; ++w) {
    std::vector<bool> key;
    for (const auto& g : generators) {
      if (g.size() != static_cast<std::size_t>(size)) throw PreconditionError("generator over the wrong number of points");
      key.push_back(g.test(static_cast<std::size_t>(w)));
    }
    auto [it, fresh] = classes.try_emplace(key, Event(static_cast<std::size_t>(size)));
    it->second.set(static_cast<std::size_t>(w));
  }
  std::vector<Event> atoms;
  for (auto& [key, e] : classes) atoms.push_back(e);
  return EventAlgebra(size, std::move(atoms));
}

EventAlgebra EventAlgebra::dyadic(int depth_total, int depth) {
  if (depth < 0 || depth > depth_total) throw PreconditionError("dyadic depth out of range");
  const int size = 1 << depth_total;
  const int block = 1 << (depth_total - depth);
  std::vector<Event> atoms;
  for (int start = 0; start < size; start += block) {
    Event a(static_cast<std::size_t>(size));
    for (int w = start; w < start + block; ++w) a.set(static_cast<std::size_t>(w));
    atoms.push_back(a);
  }
  return EventAlgebra(size, std::move(atoms));
}

EventAlgebra EventAlgebra::discrete(int size) {
  std::vector<Event> atoms;
  for (int w = 0; w < size; ++w) {
    Event a(static_cast<std::size_t>(size));
    a.set(static_cast<std::size_t>(w));
    atoms.push_back(a);
  }
  return EventAlgebra(size, std::move(atoms));
}

EventAlgebra EventAlgebra::trivial(int size) {
  Event all(static_cast<std::size_t>(size));
  all.set();
  return EventAlgebra(size, {all});
}

bool EventAlgebra::contains(const Event& e) const {
  if (e.size() != static_cast<std::size_t>(size_)) return false;
  return std::all_of(atoms_.begin(), atoms_.end(),
                     [&](const Event& a) { return a.is_subset_of(e) || !a.intersects(e); });
}

bool EventAlgebra::measurable(const RandomElement& f) const {
  if (f.size() != static_cast<std::size_t>(size_)) return false;
  for (const auto& a : atoms_) {
    Element v = f[a.find_first()];
    for (auto w = a.find_first(); w != Event::npos; w = a.find_next(w))
      if (f[w] != v) return false;
  }
  return true;
}

Event EventAlgebra::nearest(const FinProbSpace& mu, const Event& e) const {
  Event out(static_cast<std::size_t>(size_));
  for (const auto& a : atoms_) {
    Rational inside = 0, outside = 0;
    for (auto w = a.find_first(); w != Event::npos; w = a.find_next(w))
      (e.test(w) ? inside : outside) += mu.weight(static_cast<int>(w));
    if (inside > outside) out |= a;
  }
  return out;
}

SimpleApproximation approximate_by_simple(const Randomization& r, const RandomElement& f,
                                          const EventAlgebra& algebra, const Rational& eps) {
  r.check_element(f);
  if (algebra.size() != r.size()) throw PreconditionError("algebra over a different number of points");
  if (eps <= 0) throw PreconditionError("eps must be positive");
  SimpleApproximation out;

  // Level sets by decreasing mass.
  std::map<Element, Event> levels;
  for (int w = 0; w < r.size(); ++w) {
    auto [it, fresh] = levels.try_emplace(f[static_cast<std::size_t>(w)], r.empty_event());
    it->second.set(static_cast<std::size_t>(w));
  }
  std::vector<std::pair<Element, Event>> sorted(levels.begin(), levels.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](const auto& a, const auto& b) { return mu(r, a.second) > mu(r, b.second); });

  const Rational target = 1 - eps / 2;
  Rational covered = 0;
  int n = 0;
  while (!(covered > target)) {
    covered += mu(r, sorted[static_cast<std::size_t>(n)].second);
    ++n;
  }
  out.n = n;
  out.steps.push_back({"mass", covered > target,
                       "mu of " + std::to_string(n) + " level sets = " + to_string(covered) + " > 1 - eps/2 = " +
                           to_string(target)});

  const Rational density_budget = n ? eps / (4 * n * n) : Rational(0);
  const Rational disjoint_budget = n ? eps / (2 * n) : Rational(0);
  Event used = r.empty_event();
  for (int m = 0; m < n; ++m) {
    const auto& [value, level] = sorted[static_cast<std::size_t>(m)];
    Event a = algebra.nearest(r.base(), level);
    Rational d = dB(r, a, level);
    bool ok = d < density_budget;
    out.steps.push_back({"density " + std::to_string(m), ok,
                         "dB(A_" + std::to_string(m) + ", B_" + std::to_string(m) + ") = " + to_string(d) +
                             " < eps/(4n^2) = " + to_string(density_budget)});
    if (!ok) out.density_ok = false;
    if (!out.worst_level || d > out.worst_distance) {
      out.worst_level = m;
      out.worst_distance = d;
    }
    Event c = a - used;
    used |= a;
    out.values.push_back(value);
    out.level_sets.push_back(level);
    out.approx.push_back(a);
    out.disjoint.push_back(c);
  }
  Rational slack = 1 - covered;
  for (int m = 0; m < n; ++m) {
    Rational d = dB(r, out.disjoint[static_cast<std::size_t>(m)], out.level_sets[static_cast<std::size_t>(m)]);
    slack += d;
    out.steps.push_back({"disjoint " + std::to_string(m), d < disjoint_budget,
                         "dB(C_" + std::to_string(m) + ", B_" + std::to_string(m) + ") = " + to_string(d) +
                             " < eps/(2n) = " + to_string(disjoint_budget)});
  }

  const Element fallback = sorted.front().first;
  out.g.assign(static_cast<std::size_t>(r.size()), fallback);
  for (int m = 0; m < n; ++m) {
    const Event& c = out.disjoint[static_cast<std::size_t>(m)];
    for (auto w = c.find_first(); w != Event::npos; w = c.find_next(w)) out.g[w] = out.values[static_cast<std::size_t>(m)];
  }
  out.distance = dK(r, f, out.g);
  out.within_eps = out.distance < eps;
  out.steps.push_back({"total", out.distance <= slack && out.within_eps,
                       "dK(f, g) = " + to_string(out.distance) + " <= " + to_string(slack) + ", < eps = " + to_string(eps)});
  return out;
}

}  // namespace randlab
