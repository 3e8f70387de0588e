#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "randlab/cformula.hpp"
#include "randlab/corpus.hpp"
#include "randlab/error.hpp"
#include "randlab/rtype.hpp"
#include "test_util.hpp"

using namespace randlab;
using testing_util::random_space;

namespace {

Rational R(long long p, long long q = 1) { return Rational(p, q); }

FinProbSpace thirds() { return FinProbSpace({"a", "b", "c"}, {R(1, 2), R(1, 3), R(1, 6)}); }

RandomElement random_element(std::mt19937& rng, const Randomization& r) {
  RandomElement f;
  for (int w = 0; w < r.size(); ++w) f.push_back(std::uniform_int_distribution<int>(0, r.at(w).size() - 1)(rng));
  return f;
}

// Law of the tuple, from the orbit oracle.
std::vector<Rational> oracle_law(const Randomization& r, const TypeSpace& space, const std::vector<RandomElement>& tuple) {
  auto group = oracle::automorphisms(r.at(0));
  std::vector<Rational> law(static_cast<std::size_t>(space.size()), Rational(0));
  for (int w = 0; w < r.size(); ++w) {
    Tuple t;
    for (const auto& f : tuple) t.push_back(f[static_cast<std::size_t>(w)]);
    auto orb = oracle::orbit(group, t);
    int hits = 0;
    for (int q = 0; q < space.size(); ++q)
      if (orb.count(space.representative(q))) {
        law[static_cast<std::size_t>(q)] += r.base().weight(w);
        ++hits;
      }
    CHECK(hits == 1);
  }
  return law;
}

Rational tv(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += abs(a[i] - b[i]);
  return s / 2;
}

}  // namespace

TEST_CASE("types of random tuples") {
  auto m2 = builtin_structure("m2");
  auto r = Randomization::constant(m2, FinProbSpace::dyadic(1));
  auto nu = rtype_of(r, {{0, 1}});
  CHECK(nu.space().size() == 1);
  CHECK(nu.weights() == std::vector<Rational>{R(1)});

  auto c3 = builtin_structure("c3");
  auto rc = Randomization::constant(c3, thirds());
  auto edge = rtype_of(rc, {{0, 2, 1}, {1, 0, 2}});
  REQUIRE(edge.space().size() == 3);
  CHECK(edge.weights() == std::vector<Rational>{R(0), R(1), R(0)});
  CHECK(edge.space().representative(1) == Tuple{0, 1});

  auto l3 = builtin_structure("l3");
  auto rl = Randomization::constant(l3, FinProbSpace::dyadic(1));
  CHECK(rtype_of(rl, {{0, 2}}).weights() == std::vector<Rational>{R(1, 2), R(0), R(1, 2)});

  auto with_param = rtype_of(rc, {{0, 1, 2}}, {{1, 1, 1}});
  CHECK(with_param.param_count() == 1);
  CHECK(with_param.arity() == 1);
  CHECK(with_param.space().arity() == 2);

  Randomization mixed(FinProbSpace::uniform(2), {c3, builtin_structure("c4")});
  CHECK_THROWS_AS(rtype_of(mixed, {{0, 0}}), PreconditionError);
}

TEST_CASE("types agree with the orbit oracle") {
  std::mt19937 rng(41);
  for (const char* name : {"m2", "c3", "l3", "p4", "s3", "u4"}) {
    auto m = builtin_structure(name);
    for (int trial = 0; trial < 20; ++trial) {
      auto r = Randomization::constant(m, random_space(rng, 1 + trial % 5));
      std::vector<RandomElement> tuple{random_element(rng, r), random_element(rng, r)};
      auto nu = rtype_of(r, tuple);
      CHECK(nu.weights() == oracle_law(r, nu.space(), tuple));
    }
  }
}

TEST_CASE("type measures give formula measures") {
  std::mt19937 rng(43);
  for (const char* name : {"m2", "c3", "l3", "s3", "u4"}) {
    auto m = builtin_structure(name);
    auto corpus = formula_corpus(m->signature());
    REQUIRE(corpus.size() >= 40);
    for (int trial = 0; trial < 100; ++trial) {
      auto r = Randomization::constant(m, random_space(rng, 1 + trial % 6));
      std::vector<RandomElement> tuple{random_element(rng, r), random_element(rng, r)};
      auto nu = rtype_of(r, tuple);
      for (const auto& phi : corpus) {
        bool fits = true;
        for (const auto& v : phi.free_vars()) fits = fits && (v == "x" || v == "y");
        if (!fits) continue;
        CHECK(formula_mass(nu, phi, {"x", "y"}) == mu(r, event_of(r, phi, {"x", "y"}, tuple)));
      }
    }
  }
}

TEST_CASE("type measure text form") {
  auto space = type_space(builtin_structure("l3"), 1);
  RMeasure nu(space, {R(1, 3), R(0), R(2, 3)});
  CHECK(print_rmeasure(nu) == "rtype { q0: 1/3, q1: 0/1, q2: 2/3 }");
  CHECK(parse_rmeasure(print_rmeasure(nu), space) == nu);
  CHECK(parse_rmeasure("rtype { q2: 1 }", space) == RMeasure::point_mass(space, 2));
  CHECK_THROWS_AS(parse_rmeasure("rtype { q3: 1 }", space), ResolutionError);
  CHECK_THROWS_AS(parse_rmeasure("rtype { q0: 1/2 }", space), PreconditionError);
  CHECK_THROWS_AS(parse_rmeasure("rtype { q0: 1/2", space), ParseError);
}

TEST_CASE("realizing type measures") {
  auto l3 = builtin_structure("l3");
  auto space = type_space(l3, 1);
  auto r = Randomization::constant(l3, thirds());

  auto point = realize(r, RMeasure::point_mass(space, 1));
  CHECK(point.tuple == std::vector<RandomElement>{{1, 1, 1}});
  CHECK(point.rand.size() == 3);

  RMeasure nu(space, {R(1, 3), R(2, 3), R(0)});
  auto real = realize(r, nu);
  CHECK(rtype_of(real.rand, real.tuple) == nu);

  auto half = Randomization::constant(l3, FinProbSpace::dyadic(1));
  RMeasure odd(space, {R(3, 8), R(5, 8), R(0)});
  auto split = realize(half, odd);
  CHECK(split.rand.size() == 3);
  CHECK(split.rand.base().weights() == std::vector<Rational>{R(3, 8), R(1, 8), R(1, 2)});
  CHECK(split.rand.base().labels() == std::vector<std::string>{"w0.0", "w0.1", "w1"});
  CHECK(split.refinement.projection == std::vector<int>{0, 0, 1});
  CHECK(rtype_of(split.rand, split.tuple) == odd);
}

TEST_CASE("realization round trip over the battery") {
  int checked = 0;
  for (auto [name, n] : std::vector<std::pair<const char*, int>>{{"m2", 1}, {"m2", 2}, {"c3", 2}, {"l3", 1}, {"u4", 1}, {"m3", 2}, {"p4", 1}}) {
    auto m = builtin_structure(name);
    auto space = type_space(m, n);
    REQUIRE(space->size() <= 4);
    for (const auto& nu : measure_battery(space, 4))
      for (const auto& base : {FinProbSpace::uniform(1), thirds(), FinProbSpace::dyadic(2)}) {
        auto real = realize(Randomization::constant(m, base), nu);
        CHECK(rtype_of(real.rand, real.tuple) == nu);
        CHECK(real.refinement.base.total() == 1);
        ++checked;
      }
  }
  CHECK(checked > 200);
}

TEST_CASE("battery lists each distribution once") {
  auto space = type_space(builtin_structure("l3"), 1);
  auto battery = measure_battery(space, 4);
  // Simplex points with denominator d number C(d+2, 2); counting only the
  // new ones at each d: 3 + (6 - 3) + (10 - 3) + (15 - 6) = 22.
  CHECK(battery.size() == 22);
}

TEST_CASE("d-metric") {
  auto space = type_space(builtin_structure("u4"), 1);
  REQUIRE(space->size() == 2);
  RMeasure a(space, {R(1, 2), R(1, 2)});
  RMeasure b = RMeasure::point_mass(space, 0);
  CHECK(d_metric(a, a) == 0);
  CHECK(d_metric(a, b) == R(1, 2));
  CHECK(d_metric(b, RMeasure::point_mass(space, 1)) == 1);
  CHECK_THROWS_AS(d_metric(a, RMeasure::point_mass(type_space(builtin_structure("l3"), 1), 0)), PreconditionError);
  auto with_param = rtype_of(Randomization::constant(builtin_structure("c3"), thirds()), {{0, 1, 2}}, {{0, 0, 0}});
  CHECK_THROWS_AS(d_metric(with_param, with_param), PreconditionError);
}

TEST_CASE("d-metric is a metric on three types") {
  auto space = type_space(builtin_structure("l3"), 1);
  auto battery = measure_battery(space, 6);
  for (const auto& a : battery)
    for (const auto& b : battery) {
      CHECK((d_metric(a, b) == 0) == (a == b));
      CHECK(d_metric(a, b) == d_metric(b, a));
    }
  for (std::size_t i = 0; i < battery.size(); i += 3)
    for (std::size_t j = 0; j < battery.size(); j += 2)
      for (std::size_t k = 0; k < battery.size(); ++k)
        CHECK(d_metric(battery[i], battery[k]) <= d_metric(battery[i], battery[j]) + d_metric(battery[j], battery[k]));
}

TEST_CASE("d-metric equals the least distance between realizations") {
  int pairs = 0;
  for (auto [name, n] : std::vector<std::pair<const char*, int>>{{"l3", 1}, {"m2", 2}, {"u4", 1}}) {
    auto m = builtin_structure(name);
    auto space = type_space(m, n);
    std::vector<Tuple> reps;
    for (int q = 0; q < space->size(); ++q) reps.push_back(space->representative(q));
    for (int points : {2, 3, 4}) {
      auto battery = measure_battery(space, points);
      std::vector<Rational> base(static_cast<std::size_t>(points), Rational(1, points));
      for (std::size_t i = 0; i < battery.size(); ++i)
        for (std::size_t j = i; j < battery.size(); j += 2) {
          // Only measures the uniform base can carry.
          bool fits = true;
          for (const auto* nu : {&battery[i], &battery[j]})
            for (const auto& w : nu->weights()) fits = fits && denominator_of(w * points) == 1;
          if (!fits) continue;
          auto brute = oracle::coupling_minimum(*m, n, base, battery[i].weights(), battery[j].weights(), reps);
          REQUIRE(brute);
          CHECK(*brute == d_metric(battery[i], battery[j]));
          ++pairs;
        }
    }
  }
  CHECK(pairs >= 50);
}

TEST_CASE("on a coarse base the coupling minimum can exceed the d-metric") {
  // With atoms 2/3 and 1/3, a law (2/3, 1/3) and a law (1/3, 2/3) are each
  // realized only by swapping the atoms, so every pair differs everywhere.
  auto m = builtin_structure("u4");
  auto space = type_space(m, 1);
  std::vector<Tuple> reps{space->representative(0), space->representative(1)};
  std::vector<Rational> base{R(2, 3), R(1, 3)};
  auto brute = oracle::coupling_minimum(*m, 1, base, {R(2, 3), R(1, 3)}, {R(1, 3), R(2, 3)}, reps);
  REQUIRE(brute);
  CHECK(*brute == 1);
  CHECK(d_metric(RMeasure(space, {R(2, 3), R(1, 3)}), RMeasure(space, {R(1, 3), R(2, 3)})) == R(1, 3));
}

TEST_CASE("d-metric bounds the distance of any two realizations") {
  std::mt19937 rng(47);
  for (const char* name : {"c3", "l3", "p4", "m2"}) {
    auto m = builtin_structure(name);
    for (int trial = 0; trial < 60; ++trial) {
      auto r = Randomization::constant(m, random_space(rng, 1 + trial % 6));
      std::vector<RandomElement> f{random_element(rng, r), random_element(rng, r)};
      std::vector<RandomElement> g{random_element(rng, r), random_element(rng, r)};
      Rational apart = 0;
      for (int w = 0; w < r.size(); ++w)
        if (f[0][static_cast<std::size_t>(w)] != g[0][static_cast<std::size_t>(w)] ||
            f[1][static_cast<std::size_t>(w)] != g[1][static_cast<std::size_t>(w)])
          apart += r.base().weight(w);
      CHECK(apart >= d_metric(rtype_of(r, f), rtype_of(r, g)));
      CHECK(tv(rtype_of(r, f).weights(), rtype_of(r, g).weights()) == d_metric(rtype_of(r, f), rtype_of(r, g)));
    }
  }
}

TEST_CASE("conditional realization") {
  auto l3 = builtin_structure("l3");
  auto r = Randomization::constant(l3, FinProbSpace::uniform(4));
  RandomElement g{0, 0, 2, 2};
  auto cells = param_cells(r, {g});
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].value == Tuple{0});
  CHECK(cells[0].space->size() == 3);

  // One cell with all its mass on one type.
  RandomElement c{1, 1, 1, 1};
  auto one = realize_conditional(r, {{c}, {{{2, R(1)}}}});
  CHECK(one.f == RandomElement{2, 2, 2, 2});

  // Two cells split evenly between two types over their value.
  CondRealizationSpec spec{{g}, {{{1, R(1, 4)}, {2, R(1, 4)}}, {{0, R(1, 4)}, {1, R(1, 4)}}}};
  auto two = realize_conditional(r, spec);
  for (std::size_t n = 0; n < 2; ++n) {
    const auto& cell = two.cells[n];
    for (const auto& [q, beta] : spec.beta[n]) {
      Rational mass = 0;
      for (int w = 0; w < two.rand.size(); ++w)
        if (cell.event.test(static_cast<std::size_t>(w)) &&
            cell.space->type_of(Tuple{two.f[static_cast<std::size_t>(w)]}) == q)
          mass += two.rand.base().weight(w);
      CHECK(mass == beta);
      CHECK(mass == mu(two.rand, cell.event) / 2);
    }
  }

  // Splitting an atom of mass 1/3 into 1/4 + 1/12.
  auto rt = Randomization::constant(l3, thirds());
  auto split = realize_conditional(rt, {{{0, 0, 1}}, {{{1, R(3, 4)}, {2, R(1, 12)}}, {{0, R(1, 6)}}}});
  CHECK(split.rand.base().weights() == std::vector<Rational>{R(1, 2), R(1, 4), R(1, 12), R(1, 6)});
  CHECK(split.f == RandomElement{1, 1, 2, 0});

  CHECK_THROWS_AS(realize_conditional(r, {{g}, {{{1, R(1, 4)}}, {{0, R(1, 2)}}}}), PreconditionError);
  CHECK_THROWS_AS(realize_conditional(r, {{g}, {{{1, R(1, 2)}}}}), PreconditionError);
  CHECK_THROWS_AS(realize_conditional(r, {{g}, {{{7, R(1, 2)}}, {{0, R(1, 2)}}}}), PreconditionError);
}

TEST_CASE("conditional realization hits every prescribed mass") {
  std::mt19937 rng(53);
  for (const char* name : {"c4", "l3", "p4", "u4"}) {
    auto m = builtin_structure(name);
    for (int trial = 0; trial < 30; ++trial) {
      auto r = Randomization::constant(m, random_space(rng, 2 + trial % 4));
      RandomElement g = random_element(rng, r);
      auto cells = param_cells(r, {g});
      CondRealizationSpec spec{{g}, {}};
      for (const auto& cell : cells) {
        auto split = testing_util::random_weights(rng, cell.space->size());
        std::map<int, Rational> beta;
        Rational mass = mu(r, cell.event);
        for (int q = 0; q < cell.space->size(); ++q)
          if (rng() % 3) beta[q] = split[static_cast<std::size_t>(q)] * mass;
        if (beta.empty()) beta[0] = 0;
        Rational total = 0;
        for (auto& [q, b] : beta) total += b;
        beta.begin()->second += mass - total;
        spec.beta.push_back(beta);
      }
      auto res = realize_conditional(r, spec);
      REQUIRE(res.cells.size() == cells.size());
      for (std::size_t n = 0; n < cells.size(); ++n) {
        CHECK(res.cells[n].value == cells[n].value);
        CHECK(mu(res.rand, res.cells[n].event) == mu(r, cells[n].event));
        for (int q = 0; q < cells[n].space->size(); ++q) {
          Rational mass = 0;
          for (int w = 0; w < res.rand.size(); ++w)
            if (res.cells[n].event.test(static_cast<std::size_t>(w)) &&
                cells[n].space->type_of(Tuple{res.f[static_cast<std::size_t>(w)]}) == q)
              mass += res.rand.base().weight(w);
          auto it = spec.beta[n].find(q);
          CHECK(mass == (it == spec.beta[n].end() ? Rational(0) : it->second));
        }
      }
    }
  }
}

TEST_CASE("categoricity report") {
  auto m2 = check_omega_categoricity(builtin_structure("m2"), 2);
  CHECK(m2.type_counts == std::vector<int>{1, 2});
  CHECK(m2.realized == m2.measures_checked);
  CHECK(m2.measures_checked > 0);
  CHECK(m2.omega_categorical);
  auto c3 = check_omega_categoricity(builtin_structure("c3"), 2);
  CHECK(c3.type_counts[1] == 3);
  CHECK(c3.realized == c3.measures_checked);
}

TEST_CASE("tuples with equal types agree on continuous formulas") {
  // Moving a tuple by a measure-preserving point permutation or by pointwise
  // automorphisms keeps its type measure; every continuous formula must then
  // take the same value.
  auto c4 = builtin_structure("c4");
  const auto& sig = c4->signature();
  auto r = Randomization::constant(c4, FinProbSpace::uniform(3));
  std::vector<CFormula> formulas;
  for (const char* text : {"mu[[E(x,y)]]", "dK(x, y)", "sup z (mu[[E(x,z) & E(z,y)]])",
                           "inf z (max(dK(z, x), mu[[E(z,y)]]))", "sup z (min(mu[[E(z,x)]], ~dK(z, y)))",
                           "sup U (mu[U & [[x = y]]] -. half(mu[U]))"})
    formulas.push_back(parse_cformula(text, sig));
  std::mt19937 rng(59);
  auto rotate = [](Element e, int k) { return (e + k) % 4; };
  for (int trial = 0; trial < 20; ++trial) {
    RandomElement x = random_element(rng, r), y = random_element(rng, r);
    std::vector<int> perm{0, 1, 2};
    std::shuffle(perm.begin(), perm.end(), rng);
    RandomElement x2(3), y2(3);
    for (int w = 0; w < 3; ++w) {
      int k = static_cast<int>(rng() % 4);
      x2[static_cast<std::size_t>(w)] = rotate(x[static_cast<std::size_t>(perm[static_cast<std::size_t>(w)])], k);
      y2[static_cast<std::size_t>(w)] = rotate(y[static_cast<std::size_t>(perm[static_cast<std::size_t>(w)])], k);
    }
    REQUIRE(rtype_of(r, {x, y}) == rtype_of(r, {x2, y2}));
    CAssignment a, b;
    a.elements = {{"x", x}, {"y", y}};
    b.elements = {{"x", x2}, {"y", y2}};
    for (const auto& phi : formulas) CHECK(eval_cformula(r, phi, a) == eval_cformula(r, phi, b));
  }
}
