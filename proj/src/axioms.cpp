#include "randlab/axioms.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>

#include "randlab/corpus.hpp"
#include "randlab/error.hpp"

namespace randlab {

bool AxiomReport::exact_pass() const {
  return std::all_of(findings.begin(), findings.end(), [](const AxiomFinding& f) { return !f.exact || f.pass; });
}

bool AxiomReport::all_pass() const {
  return std::all_of(findings.begin(), findings.end(), [](const AxiomFinding& f) { return f.pass; });
}

const AxiomFinding& AxiomReport::find(const std::string& axiom) const {
  for (const auto& f : findings)
    if (f.axiom == axiom) return f;
  throw PreconditionError("no finding for " + axiom);
}

Rational atomless_defect_closed(const FinProbSpace& base) {
  return *std::max_element(base.weights().begin(), base.weights().end()) / 2;
}

Rational atomless_defect_exhaustive(const FinProbSpace& base) {
  const int n = base.size();
  if (n > 16) throw PreconditionError("exhaustive atomless defect needs at most 16 points");
  BigInt lcm = common_denominator(base.weights());
  std::vector<std::int64_t> units;
  for (const auto& w : base.weights()) {
    Rational scaled = w * lcm;
    if (denominator_of(scaled) != 1 || scaled > Rational(BigInt(1) << 40))
      throw PreconditionError("weights too fine for exhaustive search");
    units.push_back(static_cast<std::int64_t>(numerator_of(scaled)));
  }
  const std::uint32_t count = 1u << n;
  std::vector<std::int64_t> mass(count, 0);
  for (std::uint32_t s = 1; s < count; ++s) {
    int low = __builtin_ctz(s);
    mass[s] = mass[s & (s - 1)] + units[static_cast<std::size_t>(low)];
  }
  // Work with 2*mu(V) - mu(U) to stay integral.
  std::int64_t worst = 0;
  for (std::uint32_t u = 0; u < count; ++u) {
    std::int64_t best = mass[u];
    for (std::uint32_t v = u;; v = (v - 1) & u) {
      std::int64_t gap = 2 * mass[v] - mass[u];
      best = std::min(best, gap < 0 ? -gap : gap);
      if (best == 0 || v == 0) break;
    }
    worst = std::max(worst, best);
  }
  return Rational(BigInt(worst), BigInt(2) * lcm);
}

namespace {

class Checker {
 public:
  Checker(const Randomization& r, const AxiomOptions& options) : r_(r), opt_(options), rng_(options.seed) {
    corpus_ = opt_.corpus.empty() ? formula_corpus(r.signature()) : opt_.corpus;
    valid_ = opt_.valid.empty() ? valid_corpus(r.signature()) : opt_.valid;
    sentences_ = opt_.sentences.empty() ? sentence_corpus(r.signature()) : opt_.sentences;
    for (int w = 0; w < r.size(); ++w)
      if (std::find(structures_.begin(), structures_.end(), r.structure_ptr(w)) == structures_.end())
        structures_.push_back(r.structure_ptr(w));
    for (std::size_t i = 0; i < opt_.samples; ++i) {
      elements_.push_back(random_element());
      events_.push_back(random_event());
    }
    // Constant elements make equalities between sampled elements likely.
    elements_.push_back(RandomElement(static_cast<std::size_t>(r.size()), 0));
    elements_.push_back(RandomElement(static_cast<std::size_t>(r.size()), 1));
    events_.push_back(r.full_event());
    events_.push_back(r.empty_event());
  }

  AxiomReport run() {
    AxiomReport report;
    report.findings.push_back(validity());
    report.findings.push_back(boolean_algebra());
    report.findings.push_back(boolean_connectives());
    report.findings.push_back(distance());
    report.findings.push_back(fullness());
    report.findings.push_back(event());
    report.findings.push_back(measure());
    report.findings.push_back(atomless(report));
    report.findings.push_back(transfer());
    return report;
  }

 private:
  RandomElement random_element() {
    RandomElement f(static_cast<std::size_t>(r_.size()));
    for (int w = 0; w < r_.size(); ++w) {
      std::uniform_int_distribution<int> d(0, r_.at(w).size() - 1);
      f[static_cast<std::size_t>(w)] = d(rng_);
    }
    return f;
  }

  Event random_event() {
    Event e = r_.empty_event();
    std::bernoulli_distribution coin(0.5);
    for (std::size_t w = 0; w < e.size(); ++w) e[w] = coin(rng_);
    return e;
  }

  const RandomElement& pick(std::size_t i) const { return elements_[i % elements_.size()]; }

  static AxiomFinding finding(std::string axiom, std::size_t failures, std::size_t checks, const std::string& what,
                              const std::string& first_failure) {
    AxiomFinding f;
    f.axiom = std::move(axiom);
    f.pass = failures == 0;
    f.detail = std::to_string(checks) + " " + what;
    if (failures) f.detail += ", " + std::to_string(failures) + " failed, first: " + first_failure;
    return f;
  }

  // Exhaustive over every tuple of every structure in the family: this is
  // exactly [[psi(f)]] = top for all random tuples f.
  AxiomFinding validity() {
    std::size_t checks = 0, failures = 0;
    std::string first;
    for (const auto& psi : valid_) {
      auto vars = psi.free_vars();
      CompiledFormula compiled(psi, vars);
      for (const auto& m : structures_) {
        for (const auto& t : all_tuples(m->size(), static_cast<int>(vars.size()))) {
          ++checks;
          if (!compiled.eval(*m, t)) {
            if (!failures++) first = to_string(psi) + " in " + m->name();
            break;
          }
        }
      }
    }
    auto f = finding("validity", failures, checks, "instances of " + std::to_string(valid_.size()) +
                                                       " valid formulas (a corpus, not the full schema)",
                     first);
    return f;
  }

  AxiomFinding boolean_algebra() {
    const Event top = r_.full_event(), bot = r_.empty_event();
    std::size_t checks = 0, failures = 0;
    std::string first;
    auto expect = [&](bool ok, const char* law) {
      ++checks;
      if (!ok && !failures++) first = law;
    };
    const std::size_t k = events_.size();
    for (std::size_t i = 0; i < k; ++i) {
      const Event& u = events_[i];
      const Event& v = events_[(i * 7 + 3) % k];
      const Event& w = events_[(i * 13 + 5) % k];
      expect((u | v) == (v | u) && (u & v) == (v & u), "commutativity");
      expect(((u | v) | w) == (u | (v | w)) && ((u & v) & w) == (u & (v & w)), "associativity");
      expect((u & (v | w)) == ((u & v) | (u & w)) && (u | (v & w)) == ((u | v) & (u | w)), "distributivity");
      expect((u | (u & v)) == u && (u & (u | v)) == u, "absorption");
      expect((u | ~u) == top && (u & ~u) == bot, "complement");
      expect(~(u | v) == (~u & ~v) && ~(u & v) == (~u | ~v), "de morgan");
      expect((u ^ v) == ((u & ~v) | (~u & v)), "symmetric difference");
    }
    expect(top != bot, "top differs from bottom");
    return finding("boolean-algebra", failures, checks, "identities on sampled events", first);
  }

  AxiomFinding boolean_connectives() {
    const std::vector<std::string> xy{"x", "y"};
    std::size_t checks = 0, failures = 0;
    std::string first;
    const std::size_t n = corpus_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Formula& phi = corpus_[i];
      const Formula& psi = corpus_[(2 * i + 3) % n];
      if (!fits(phi) || !fits(psi)) continue;
      for (std::size_t s = 0; s < 4; ++s) {
        std::vector<RandomElement> args{pick(i + s), pick(i * 3 + s + 1)};
        Event a = event_of(r_, phi, xy, args), b = event_of(r_, psi, xy, args);
        auto expect = [&](const Formula& f, const Event& e) {
          ++checks;
          if (event_of(r_, f, xy, args) != e && !failures++) first = to_string(f);
        };
        expect(Formula::negation(phi), ~a);
        expect(Formula::conjunction(phi, psi), a & b);
        expect(Formula::disjunction(phi, psi), a | b);
        expect(Formula::implication(phi, psi), ~a | b);
        expect(Formula::equivalence(phi, psi), ~(a ^ b));
      }
    }
    return finding("boolean-connectives", failures, checks, "event identities for corpus formulas", first);
  }

  AxiomFinding distance() {
    const Formula eq = Formula::equal(Term::variable("x"), Term::variable("y"));
    std::size_t checks = 0, failures = 0;
    std::string first;
    auto expect = [&](bool ok, const std::string& what) {
      ++checks;
      if (!ok && !failures++) first = what;
    };
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      const auto& f = pick(i);
      const auto& g = pick(i * 5 + 1);
      const auto& h = pick(i * 11 + 2);
      Rational d = dK(r_, f, g);
      expect(d == 1 - mu(r_, event_of(r_, eq, {"x", "y"}, {f, g})), "dK = 1 - mu[[x=y]]");
      expect(d == dK(r_, g, f) && dK(r_, f, f) == 0, "dK symmetric");
      expect(dK(r_, f, h) <= d + dK(r_, g, h), "dK triangle");
      expect((d == 0) == (f == g), "dK separates");
    }
    for (std::size_t i = 0; i < events_.size(); ++i) {
      const auto& u = events_[i];
      const auto& v = events_[(i * 5 + 1) % events_.size()];
      const auto& w = events_[(i * 11 + 2) % events_.size()];
      Rational d = dB(r_, u, v);
      expect(d == mu(r_, u) + mu(r_, v) - 2 * mu(r_, u & v), "dB = mu(U sym V)");
      expect(d == dB(r_, v, u) && dB(r_, u, w) <= d + dB(r_, v, w), "dB pseudo-metric");
    }
    return finding("distance", failures, checks, "distance identities", first);
  }

  // The witness must make the two events equal, not merely close.
  AxiomFinding fullness() {
    std::size_t checks = 0, failures = 0;
    std::string first;
    for (std::size_t i = 0; i < corpus_.size(); ++i) {
      const Formula& phi = corpus_[i];
      if (!fits(phi)) continue;
      for (auto [x, y] : {std::pair<std::string, std::string>{"x", "y"}, {"y", "x"}}) {
        const Formula ex = Formula::exists(x, phi);
        for (std::size_t s = 0; s < 3; ++s) {
          const auto& g = pick(i * 3 + s);
          RandomElement f = fullness_witness(r_, phi, x, {y}, {g});
          ++checks;
          if (event_of(r_, phi, {x, y}, {f, g}) != event_of(r_, ex, {y}, {g}) && !failures++)
            first = to_string(phi) + " witnessing " + x;
        }
      }
    }
    return finding("fullness", failures, checks, "exact witnesses", first);
  }

  AxiomFinding event() {
    const Formula eq = Formula::equal(Term::variable("x"), Term::variable("y"));
    std::vector<Event> targets = events_;
    if (r_.size() <= 10) {
      targets.clear();
      for (unsigned long bits = 0; bits < (1ul << r_.size()); ++bits)
        targets.emplace_back(static_cast<std::size_t>(r_.size()), bits);
    }
    std::size_t failures = 0;
    std::string first;
    for (const auto& u : targets) {
      auto [f, g] = event_witness(r_, u);
      if (event_of(r_, eq, {"x", "y"}, {f, g}) != u && !failures++) first = print_event(u);
    }
    return finding("event", failures, targets.size(), "events realized as [[x=y]]", first);
  }

  AxiomFinding measure() {
    std::size_t checks = 2, failures = 0;
    std::string first;
    Rational top = mu(r_, r_.full_event());
    if (top != 1) {
      ++failures;
      first = "mu[top] = " + to_string(top);
    }
    if (mu(r_, r_.empty_event()) != 0 && !failures++) first = "mu[bot] != 0";
    for (std::size_t i = 0; i < events_.size(); ++i) {
      const auto& u = events_[i];
      const auto& v = events_[(i * 7 + 1) % events_.size()];
      ++checks;
      if (mu(r_, u) + mu(r_, v) != mu(r_, u | v) + mu(r_, u & v) && !failures++) first = "modularity";
    }
    for (int w = 0; w < r_.size(); ++w) {
      ++checks;
      if (r_.base().weight(w) <= 0 && !failures++) first = "non-positive weight at " + r_.base().label(w);
    }
    return finding("measure", failures, checks, "measure identities", first);
  }

  AxiomFinding atomless(AxiomReport& report) {
    const auto& base = r_.base();
    report.atomless_threshold = base.min_weight() / 2;
    report.atomless_exhaustive = base.size() <= 16;
    report.atomless_defect =
        report.atomless_exhaustive ? atomless_defect_exhaustive(base) : atomless_defect_closed(base);
    AxiomFinding f;
    f.axiom = "atomless";
    f.exact = false;
    f.pass = report.atomless_defect <= report.atomless_threshold;
    f.detail = "defect " + to_string(report.atomless_defect) + (report.atomless_exhaustive ? " (exhaustive)" : " (closed form)") +
               ", threshold " + to_string(report.atomless_threshold) + "; vanishes under dyadic refinement";
    return f;
  }

  AxiomFinding transfer() {
    std::size_t checks = 0, failures = 0, mixed = 0;
    std::string first;
    for (const auto& sigma : sentences_) {
      std::set<bool> truths;
      for (const auto& m : structures_) truths.insert(eval_formula(*m, sigma, Assignment{}));
      if (truths.size() > 1) {
        ++mixed;
        continue;
      }
      ++checks;
      Rational expected = *truths.begin() ? 1 : 0;
      if (mu(r_, event_of(r_, sigma, {}, {})) != expected && !failures++) first = to_string(sigma);
    }
    auto f = finding("transfer", failures, checks, "sentences decided by every structure", first);
    if (mixed) f.detail += ", " + std::to_string(mixed) + " undecided skipped";
    return f;
  }

  static bool fits(const Formula& phi) {
    for (const auto& v : phi.free_vars())
      if (v != "x" && v != "y") return false;
    return true;
  }

  const Randomization& r_;
  const AxiomOptions& opt_;
  std::mt19937 rng_;
  std::vector<Formula> corpus_, valid_, sentences_;
  std::vector<StructurePtr> structures_;
  std::vector<RandomElement> elements_;
  std::vector<Event> events_;
};

}  // namespace

AxiomReport check_axioms(const Randomization& r, const AxiomOptions& options) { return Checker(r, options).run(); }

std::string print_report(const AxiomReport& report) {
  std::string out;
  for (const auto& f : report.findings) out += std::string(f.pass ? "PASS " : "FAIL ") + f.axiom + ": " + f.detail + "\n";
  return out;
}

}  // namespace randlab
