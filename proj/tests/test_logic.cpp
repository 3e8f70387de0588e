#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "randlab/error.hpp"
#include "randlab/formula.hpp"
#include "randlab/type_space.hpp"

using namespace randlab;

namespace {

const char* kStructures[] = {"m2", "m3", "c3", "c4", "c5", "l3", "p4", "s3", "u4"};

}  // namespace

TEST_CASE("parse conjunction over the 3-cycle") {
  auto c3 = builtin_structure("c3");
  Formula f = parse_formula("E(x,y) & !(x=y)", c3->signature());
  CHECK(f.kind() == Formula::Kind::kAnd);
  CHECK(f.free_vars() == std::vector<std::string>{"x", "y"});
  CHECK(to_string(f) == "E(x,y) & !(x=y)");
}

TEST_CASE("parse existential") {
  auto c3 = builtin_structure("c3");
  Formula f = parse_formula("exists z (E(x,z) & E(z,y))", c3->signature());
  CHECK(f.kind() == Formula::Kind::kExists);
  CHECK(f.bound_var() == "z");
  CHECK(f.free_vars() == std::vector<std::string>{"x", "y"});
}

TEST_CASE("parse errors") {
  auto c3 = builtin_structure("c3");
  CHECK_THROWS_AS(parse_formula("E(x)", c3->signature()), ArityError);
  CHECK_THROWS_AS(parse_formula("F(x,y)", c3->signature()), ResolutionError);
  CHECK_THROWS_AS(parse_formula("x < y", c3->signature()), ResolutionError);
  try {
    parse_formula("E(x,y) & & x=y", c3->signature());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 9);
  }
  CHECK_THROWS_AS(parse_formula("x = ", c3->signature()), ParseError);
  CHECK_THROWS_AS(parse_formula("(x = y", c3->signature()), ParseError);
}

TEST_CASE("precedence and associativity") {
  auto m2 = builtin_structure("m2");
  const auto& sig = m2->signature();
  Formula f = parse_formula("x=y | x=z & y=z", sig);
  CHECK(f.kind() == Formula::Kind::kOr);
  Formula g = parse_formula("x=y -> y=z -> x=z", sig);
  CHECK(g.kind() == Formula::Kind::kImplies);
  CHECK(g.child(1).kind() == Formula::Kind::kImplies);
  Formula h = parse_formula("exists x x=y & y=y", sig);
  CHECK(h.kind() == Formula::Kind::kAnd);
  CHECK(parse_formula("x != y", sig) == parse_formula("!(x=y)", sig));
}

TEST_CASE("printer round trip") {
  auto l3 = builtin_structure("l3");
  auto s3 = builtin_structure("s3");
  const char* order[] = {
      "forall z (x<z | x=z)",
      "!x<y",
      "(x=y <-> y=z) <-> x=z",
      "x=y <-> (y=z <-> x=z)",
      "(x=y -> y=z) -> x=z",
      "!(x=y & y<z) | exists u forall v (u<v -> v=#1)",
      "true & !false",
  };
  for (const char* text : order) {
    Formula f = parse_formula(text, l3->signature());
    CHECK(parse_formula(to_string(f), l3->signature()) == f);
  }
  Formula f = parse_formula("s(s(x)) = zero & !(s(x)=x)", s3->signature());
  CHECK(to_string(f) == "s(s(x))=zero & !(s(x)=x)");
  CHECK(parse_formula(to_string(f), s3->signature()) == f);
}

TEST_CASE("evaluation") {
  auto c3 = builtin_structure("c3");
  auto l3 = builtin_structure("l3");
  auto m2 = builtin_structure("m2");
  CHECK(eval_formula(*c3, parse_formula("E(x,y)", c3->signature()), Assignment{{"x", 0}, {"y", 1}}));
  CHECK_FALSE(eval_formula(*c3, parse_formula("E(x,y)", c3->signature()), Assignment{{"x", 1}, {"y", 0}}));
  for (Element a = 0; a < 2; ++a) CHECK(eval_formula(*m2, parse_formula("x=x", m2->signature()), Assignment{{"x", a}}));

  // Least element of the order, checked against a direct scan over z.
  Formula least = parse_formula("forall z (x<z | x=z)", l3->signature());
  for (Element x = 0; x < 3; ++x) {
    bool expected = true;
    for (Element z = 0; z < 3; ++z) expected = expected && (x < z || x == z);
    CHECK(eval_formula(*l3, least, Assignment{{"x", x}}) == expected);
  }
  CHECK_THROWS_AS(eval_formula(*l3, least, Assignment{}), PreconditionError);
  CHECK(extension(*c3, parse_formula("exists z (E(x,z) & E(z,y))", c3->signature()), {"x", "y"}) ==
        std::vector<Tuple>{{0, 2}, {1, 0}, {2, 1}});
}

TEST_CASE("automorphisms agree with the permutation oracle") {
  for (const char* name : kStructures) {
    auto m = builtin_structure(name);
    CAPTURE(name);
    CHECK(automorphisms(*m) == oracle::automorphisms(*m));
    for (Element a = 0; a < m->size(); ++a) {
      std::vector<Element> fix{a};
      CHECK(automorphisms(*m, fix) == oracle::automorphisms(*m, fix));
    }
  }
  CHECK(automorphisms(*builtin_structure("m2")) == std::vector<Permutation>{{0, 1}, {1, 0}});
  CHECK(automorphisms(*builtin_structure("l3")) == std::vector<Permutation>{{0, 1, 2}});
  CHECK(automorphisms(*builtin_structure("c3")) == std::vector<Permutation>{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}});
}

TEST_CASE("automorphisms form a group") {
  for (const char* name : kStructures) {
    auto group = automorphisms(*builtin_structure(name));
    std::set<Permutation> members(group.begin(), group.end());
    CHECK(members.count(group.front()) == 1);
    for (const auto& a : group) {
      Permutation inv(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) inv[static_cast<std::size_t>(a[i])] = static_cast<Element>(i);
      CHECK(members.count(inv) == 1);
      for (const auto& b : group) {
        Permutation ab(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) ab[i] = a[static_cast<std::size_t>(b[i])];
        CHECK(members.count(ab) == 1);
      }
    }
  }
}

TEST_CASE("type space sizes") {
  CHECK(type_space(builtin_structure("m2"), 1)->size() == 1);
  CHECK(type_space(builtin_structure("m2"), 2)->size() == 2);
  CHECK(type_space(builtin_structure("l3"), 1)->size() == 3);
  CHECK(type_space(builtin_structure("c3"), 2)->size() == 3);
  for (const char* name : kStructures) {
    auto m = builtin_structure(name);
    for (int n = 0; n <= 2; ++n) {
      CAPTURE(name);
      CAPTURE(n);
      CHECK(type_space(m, n)->size() == oracle::orbit_count(*m, n));
      CHECK(type_space(m, n, {0})->size() == oracle::orbit_count(*m, n, {0}));
    }
  }
}

TEST_CASE("types of tuples") {
  auto c3 = builtin_structure("c3");
  auto space = type_space(c3, 2);
  Tuple edge{0, 1};
  TypeId t = type_of_tuple(c3, edge);
  CHECK(t.representative == Tuple{0, 1});
  CHECK(t.index == space->type_of(Tuple{1, 2}));
  CHECK(t.index != space->type_of(Tuple{1, 0}));
  CHECK(t.index != space->type_of(Tuple{1, 1}));

  auto l3 = builtin_structure("l3");
  CHECK(type_of_tuple(l3, Tuple{0}, {1}) != type_of_tuple(l3, Tuple{2}, {1}));
  auto m2 = builtin_structure("m2");
  CHECK(type_of_tuple(m2, Tuple{0, 0}) == type_of_tuple(m2, Tuple{1, 1}));
}

TEST_CASE("types are orbit invariant") {
  for (const char* name : kStructures) {
    auto m = builtin_structure(name);
    for (Element a = 0; a < m->size(); ++a) {
      auto space = type_space(m, 2, {a});
      for (const auto& t : all_tuples(m->size(), 2))
        for (const auto& s : space->automorphisms())
          CHECK(space->type_of(Tuple{s[static_cast<std::size_t>(t[0])], s[static_cast<std::size_t>(t[1])]}) ==
                space->type_of(t));
    }
  }
}

TEST_CASE("isolating formulas define their orbits") {
  for (const char* name : kStructures) {
    auto m = builtin_structure(name);
    for (int n = 1; n <= 2; ++n) {
      for (const std::vector<Element>& params : {std::vector<Element>{}, std::vector<Element>{0}}) {
        auto space = type_space(m, n, params);
        for (int q = 0; q < space->size(); ++q) {
          Formula phi = isolating_formula(*space, q);
          CAPTURE(name);
          CAPTURE(to_string(phi));
          auto vars = default_vars(n);
          std::set<Tuple> ext;
          for (auto& t : extension(*m, phi, vars)) ext.insert(t);
          auto expected = oracle::orbit(oracle::automorphisms(*m, params), space->representative(q));
          CHECK(ext == expected);
          CHECK(parse_formula(to_string(phi), m->signature()) == phi);
        }
      }
    }
  }
}

TEST_CASE("isolating formula shapes") {
  auto m2 = builtin_structure("m2");
  CHECK(to_string(isolating_formula(*type_space(m2, 1), 0)) == "x=x");
  auto c3 = builtin_structure("c3");
  auto s2 = type_space(c3, 2);
  CHECK(to_string(isolating_formula(*s2, s2->type_of(Tuple{0, 1}))) == "E(x,y)");
  auto l3 = builtin_structure("l3");
  auto s1 = type_space(l3, 1);
  Formula least = isolating_formula(*s1, s1->type_of(Tuple{0}));
  CHECK(extension(*l3, least, {"x"}) == extension(*l3, parse_formula("forall z (x<z | x=z)", l3->signature()), {"x"}));
}

TEST_CASE("structure text round trip") {
  for (const char* name : kStructures) {
    auto m = builtin_structure(name);
    FinStructure back = parse_structure(print_structure(*m));
    CHECK(print_structure(back) == print_structure(*m));
  }
  CHECK_THROWS_AS(parse_structure("structure a { universe = 1; }"), PreconditionError);
  CHECK_THROWS_AS(parse_structure("structure a { universe = 2; function f/1 = {(0)->1}; }"), PreconditionError);
  CHECK_THROWS_AS(parse_structure("structure a { universe = 2; relation R/2 = {(0)}; }"), ArityError);
  CHECK_THROWS_AS(parse_structure("structure a { universe = 2 relation }"), ParseError);
}
