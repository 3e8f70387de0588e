#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "randlab/error.hpp"
#include "randlab/linear_feasibility.hpp"
#include "randlab/measure.hpp"
#include "test_util.hpp"

using namespace randlab;
using testing_util::random_rational;
using testing_util::random_space;
using testing_util::random_weights;

namespace {

Rational R(long long p, long long q = 1) { return Rational(p, q); }

MeasurableMap collapse(std::vector<int> image, std::vector<std::string> codomain) {
  return MeasurableMap{std::move(codomain), std::move(image)};
}

}  // namespace

TEST_CASE("probability spaces validate their weights") {
  CHECK_THROWS_AS(FinProbSpace({"a", "b"}, {R(1, 2), R(1, 3)}), PreconditionError);
  CHECK_THROWS_AS(FinProbSpace({"a", "b"}, {R(1), R(0)}), PreconditionError);
  CHECK_THROWS_AS(FinProbSpace({"a", "a"}, {R(1, 2), R(1, 2)}), PreconditionError);
  auto d = FinProbSpace::dyadic(3);
  CHECK(d.size() == 8);
  CHECK(d.weight(5) == R(1, 8));
  CHECK(d.total() == 1);
}

TEST_CASE("image measures") {
  auto u = FinProbSpace::uniform(4);
  auto img = image_measure(u, collapse({0, 0, 1, 1}, {"a", "b"}));
  CHECK(img.labels() == std::vector<std::string>{"a", "b"});
  CHECK(img.weights() == std::vector<Rational>{R(1, 2), R(1, 2)});
  CHECK(image_measure(u, collapse({0, 1, 2, 3}, u.labels())) == u);
  FinProbSpace w({"1", "2", "3"}, {R(1, 3), R(1, 6), R(1, 2)});
  CHECK(image_measure(w, collapse({0, 0, 1}, {"a", "b"})).weights() == std::vector<Rational>{R(1, 2), R(1, 2)});
  // Unreached codomain points are dropped.
  CHECK(image_measure(w, collapse({0, 0, 0}, {"a", "b"})).size() == 1);
}

TEST_CASE("conditional expectation examples") {
  auto u = FinProbSpace::uniform(4);
  auto g = cond_exp(u, {R(0), R(1), R(1), R(1)}, collapse({0, 0, 1, 1}, {"a", "b"}));
  CHECK(*g[0] == R(1, 2));
  CHECK(*g[1] == R(1));
  auto c = cond_exp(u, RationalFn(4, R(2, 7)), collapse({0, 0, 1, 1}, {"a", "b"}));
  CHECK(*c[0] == R(2, 7));
  CHECK(*c[1] == R(2, 7));
  FinProbSpace w({"1", "2", "3"}, {R(1, 2), R(1, 4), R(1, 4)});
  auto h = cond_exp(w, {R(1), R(0), R(1)}, collapse({0, 0, 1}, {"a", "b"}));
  CHECK(*h[0] == R(2, 3));
  CHECK(*h[1] == R(1));
  auto empty_fiber = cond_exp(w, {R(1), R(0), R(1)}, collapse({0, 0, 0}, {"a", "b"}));
  CHECK_FALSE(empty_fiber[1].has_value());
}

TEST_CASE("conditional expectation: defining equation on every subset, linearity") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    int nx = 2 + static_cast<int>(rng() % 7), ny = 1 + static_cast<int>(rng() % 5);
    auto mu = random_space(rng, nx);
    MeasurableMap pi;
    for (int y = 0; y < ny; ++y) pi.codomain.push_back("y" + std::to_string(y));
    for (int x = 0; x < nx; ++x) pi.image.push_back(static_cast<int>(rng() % static_cast<unsigned>(ny)));
    RationalFn f, f2, h;
    for (int x = 0; x < nx; ++x) {
      f.push_back(random_rational(rng, 0, 1, 5));
      f2.push_back(random_rational(rng, -1, 1, 4));
    }
    for (int y = 0; y < ny; ++y) h.push_back(random_rational(rng, -2, 2, 3));
    auto g = cond_exp(mu, f, pi);
    auto img = image_measure(mu, pi);
    std::vector<Rational> eta(static_cast<std::size_t>(ny));
    for (int y = 0; y < ny; ++y)
      if (auto i = img.index_of(pi.codomain[static_cast<std::size_t>(y)])) eta[static_cast<std::size_t>(y)] = img.weight(*i);
    for (unsigned s = 0; s < (1u << ny); ++s) {
      Rational lhs = 0, rhs = 0;
      for (int y = 0; y < ny; ++y)
        if ((s >> y) & 1u && g[static_cast<std::size_t>(y)])
          lhs += *g[static_cast<std::size_t>(y)] * eta[static_cast<std::size_t>(y)];
      for (int x = 0; x < nx; ++x)
        if ((s >> pi(x)) & 1u) rhs += f[static_cast<std::size_t>(x)] * mu.weight(x);
      CHECK(lhs == rhs);
    }
    // E[(h o pi) f | pi] = h E[f | pi], and additivity in f.
    RationalFn hf, sum_f;
    for (int x = 0; x < nx; ++x) {
      hf.push_back(h[static_cast<std::size_t>(pi(x))] * f[static_cast<std::size_t>(x)]);
      sum_f.push_back(f[static_cast<std::size_t>(x)] + f2[static_cast<std::size_t>(x)]);
    }
    auto ghf = cond_exp(mu, hf, pi);
    auto gf2 = cond_exp(mu, f2, pi);
    auto gsum = cond_exp(mu, sum_f, pi);
    for (int y = 0; y < ny; ++y) {
      auto yi = static_cast<std::size_t>(y);
      if (!g[yi]) continue;
      CHECK(*ghf[yi] == h[yi] * *g[yi]);
      CHECK(*gsum[yi] == *g[yi] + *gf2[yi]);
    }
  }
}

TEST_CASE("pairing") {
  auto u = FinProbSpace::uniform(3);
  CHECK(pair(RationalFn(3, R(1)), u) == 1);
  FinProbSpace w({"a", "b"}, {R(1, 3), R(2, 3)});
  CHECK(pair({R(1), R(0)}, w) == R(1, 3));
  CHECK(pair({R(1, 2), R(1, 4)}, FinProbSpace::uniform(2)) == R(3, 8));
  CHECK_THROWS_AS(pair({R(1)}, w), PreconditionError);
}

TEST_CASE("fiber product examples") {
  FinProbSpace mu({"a", "b"}, {R(1, 3), R(2, 3)});
  FinProbSpace nu({"c", "d", "e"}, {R(1, 2), R(1, 4), R(1, 4)});
  auto fib = make_fiber_space(collapse({0, 0}, {"z"}), collapse({0, 0, 0}, {"z"}));
  auto prod = fiber_product(mu, nu, fib);
  CHECK(prod.size() == 6);
  for (int i = 0; i < prod.size(); ++i) {
    auto [x, y] = fib.points[static_cast<std::size_t>(i)];
    CHECK(prod.weight(i) == mu.weight(x) * nu.weight(y));
  }

  auto z = FinProbSpace::uniform(2, "z");
  FinProbSpace nu2({"y0", "y1", "y2"}, {R(1, 4), R(1, 4), R(1, 2)});
  auto fib2 = make_fiber_space(collapse({0, 1}, z.labels()), collapse({0, 0, 1}, z.labels()));
  auto p2 = fiber_product(z, nu2, fib2);
  CHECK(p2.labels() == std::vector<std::string>{"(z0,y0)", "(z0,y1)", "(z1,y2)"});
  CHECK(p2.weights() == std::vector<Rational>{R(1, 4), R(1, 4), R(1, 2)});

  FinProbSpace skew({"y0", "y1", "y2"}, {R(1, 4), R(1, 8), R(5, 8)});
  CHECK_THROWS_WITH_AS(fiber_product(z, skew, fib2), doctest::Contains("z0"), PreconditionError);
}

TEST_CASE("fiber products: three integrals agree on rectangles, marginals recovered") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 120; ++trial) {
    int nz = 1 + static_cast<int>(rng() % 3);
    int nx = nz + static_cast<int>(rng() % static_cast<unsigned>(7 - nz));
    int ny = nz + static_cast<int>(rng() % static_cast<unsigned>(7 - nz));
    auto eta = random_weights(rng, nz);
    std::vector<std::string> zl;
    for (int k = 0; k < nz; ++k) zl.push_back("z" + std::to_string(k));
    // Each fiber gets at least one point; split eta(z) among its points.
    auto build = [&](int n, const std::string& prefix, MeasurableMap& pi) {
      pi.codomain = zl;
      pi.image.clear();
      for (int i = 0; i < n; ++i) pi.image.push_back(i < nz ? i : static_cast<int>(rng() % static_cast<unsigned>(nz)));
      std::vector<Rational> w(static_cast<std::size_t>(n));
      for (int k = 0; k < nz; ++k) {
        std::vector<int> members;
        for (int i = 0; i < n; ++i)
          if (pi.image[static_cast<std::size_t>(i)] == k) members.push_back(i);
        auto split = random_weights(rng, static_cast<int>(members.size()));
        for (std::size_t j = 0; j < members.size(); ++j)
          w[static_cast<std::size_t>(members[j])] = split[j] * eta[static_cast<std::size_t>(k)];
      }
      std::vector<std::string> labels;
      for (int i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
      return FinProbSpace(labels, w);
    };
    MeasurableMap px, py;
    auto mu = build(nx, "x", px);
    auto nu = build(ny, "y", py);
    auto fib = make_fiber_space(px, py);
    auto prod = fiber_product(mu, nu, fib);
    CHECK(prod.total() == 1);
    CHECK(fiber_marginal(prod, fib, 0, nx) == mu.weights());
    CHECK(fiber_marginal(prod, fib, 1, ny) == nu.weights());
    for (int r = 0; r < 12; ++r) {
      std::vector<int> a, b;
      for (int x = 0; x < nx; ++x)
        if (rng() % 2) a.push_back(x);
      for (int y = 0; y < ny; ++y)
        if (rng() % 2) b.push_back(y);
      Rational direct = 0;
      for (int i = 0; i < prod.size(); ++i) {
        auto [x, y] = fib.points[static_cast<std::size_t>(i)];
        if (std::find(a.begin(), a.end(), x) != a.end() && std::find(b.begin(), b.end(), y) != b.end())
          direct += prod.weight(i);
      }
      for (int formula = 0; formula < 3; ++formula) CHECK(rectangle_mass(mu, nu, fib, a, b, formula) == direct);
    }
    // Fubini along fibers for functions of x alone.
    RationalFn phi_x, phi;
    for (int x = 0; x < nx; ++x) phi_x.push_back(random_rational(rng, 0, 1, 6));
    for (auto [x, y] : fib.points) phi.push_back(phi_x[static_cast<std::size_t>(x)]);
    CHECK(pair(phi, prod) == pair(phi_x, mu));
  }
}

TEST_CASE("measure extension: inequality examples") {
  LinFeasProblem half{2, {{{R(0), R(1)}, R(1, 2), Relation::kLessEq}}};
  auto c = extend_measure_ineq(half);
  CHECK(c.feasible);
  CHECK(verify_certificate(c));

  LinFeasProblem tight{2, {{{R(1), R(0)}, R(1, 4), Relation::kLessEq}, {{R(0), R(1)}, R(1, 4), Relation::kLessEq}}};
  auto d = extend_measure_ineq(tight);
  CHECK_FALSE(d.feasible);
  CHECK(d.multipliers == std::vector<BigInt>{1, 1});
  CHECK(d.n == 1);
  CHECK(verify_certificate(d));
}

TEST_CASE("measure extension: equality examples") {
  LinFeasProblem ok{2, {{{R(1), R(0)}, R(3, 5), Relation::kEqual}, {{R(0), R(1)}, R(2, 5), Relation::kEqual}}};
  auto c = extend_measure_eq(ok);
  CHECK(c.feasible);
  CHECK(c.measure == std::vector<Rational>{R(3, 5), R(2, 5)});
  CHECK(c.problem.constraints.size() == 3);

  LinFeasProblem bad{2,
                     {{{R(1), R(0)}, R(3, 5), Relation::kEqual},
                      {{R(0), R(1)}, R(3, 5), Relation::kEqual},
                      {{R(1), R(1)}, R(1), Relation::kEqual}}};
  auto d = extend_measure_eq(bad);
  CHECK_FALSE(d.feasible);
  CHECK(verify_certificate(d));
  CHECK(d.multipliers == std::vector<BigInt>{-1, -1, 1});

  LinFeasProblem wrong_unit{2, {{{R(1), R(1)}, R(1, 2), Relation::kEqual}}};
  CHECK_THROWS_AS(extend_measure_eq(wrong_unit), PreconditionError);
}

TEST_CASE("measure extension agrees with vertex enumeration") {
  std::mt19937 rng(1234);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 600; ++trial) {
    int g = 1 + static_cast<int>(rng() % 4);
    int k = 1 + static_cast<int>(rng() % 5);
    bool eq = trial % 2 == 1;
    LinFeasProblem prob{g, {}};
    for (int i = 0; i < k; ++i) {
      Constraint c;
      for (int x = 0; x < g; ++x) c.phi.push_back(random_rational(rng, eq ? 0 : -1, 1, 3));
      c.bound = random_rational(rng, eq ? 0 : -1, 1, 4);
      // The constant 1 may only carry the bound 1 in equality problems.
      if (eq && std::all_of(c.phi.begin(), c.phi.end(), [](const Rational& v) { return v == 1; })) c.bound = 1;
      c.rel = eq ? Relation::kEqual : Relation::kLessEq;
      prob.constraints.push_back(c);
    }
    if (eq) {
      // Plant a solution half of the time so both branches are exercised.
      if (rng() % 2) {
        auto mu = random_weights(rng, g);
        for (auto& c : prob.constraints) {
          c.bound = 0;
          for (int x = 0; x < g; ++x) c.bound += c.phi[static_cast<std::size_t>(x)] * mu[static_cast<std::size_t>(x)];
        }
      }
      prob.constraints.push_back({RationalFn(static_cast<std::size_t>(g), R(1)), R(1), Relation::kEqual});
    }
    auto cert = eq ? extend_measure_eq(prob) : extend_measure_ineq(prob);
    bool oracle_feasible = !oracle::vertices(prob).empty();
    CAPTURE(print_problem(prob));
    CHECK(cert.feasible == oracle_feasible);
    CHECK(verify_certificate(cert));
    (cert.feasible ? feasible : infeasible)++;
  }
  CHECK(feasible > 100);
  CHECK(infeasible > 100);
}

TEST_CASE("lambda tilde is the least admissible bound") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 150; ++trial) {
    int g = 1 + static_cast<int>(rng() % 4);
    LinFeasProblem prob{g, {}};
    int k = static_cast<int>(rng() % 4);
    for (int i = 0; i < k; ++i) {
      Constraint c;
      for (int x = 0; x < g; ++x) c.phi.push_back(random_rational(rng, -1, 1, 3));
      c.bound = random_rational(rng, -1, 1, 3);
      prob.constraints.push_back(c);
    }
    RationalFn psi;
    for (int x = 0; x < g; ++x) psi.push_back(random_rational(rng, -2, 2, 5));
    auto lt = lambda_tilde(prob, psi);
    auto verts = oracle::vertices(prob);
    CHECK(lt.has_value() == !verts.empty());
    if (!lt) continue;
    // By duality the sup equals the least value of <psi,mu> over the region.
    Rational best;
    for (std::size_t v = 0; v < verts.size(); ++v) {
      Rational val = 0;
      for (int x = 0; x < g; ++x) val += psi[static_cast<std::size_t>(x)] * verts[v][static_cast<std::size_t>(x)];
      if (v == 0 || val < best) best = val;
    }
    CHECK(*lt == best);
    // Constants map to themselves.
    CHECK(*lambda_tilde(prob, RationalFn(static_cast<std::size_t>(g), R(3, 7))) == R(3, 7));
  }
}

TEST_CASE("problem interchange format") {
  auto prob = parse_problem("<= 1/2 : 0,1\n= 1 : 1,1 // unit\n<= -1/3 : -2/5,7\n");
  CHECK(prob.ground_size == 2);
  CHECK(prob.constraints.size() == 3);
  CHECK(prob.constraints[2].bound == R(-1, 3));
  CHECK(prob.constraints[2].phi[0] == R(-2, 5));
  CHECK(parse_problem(print_problem(prob)).constraints.size() == 3);
  CHECK(print_problem(parse_problem(print_problem(prob))) == print_problem(prob));
  CHECK_THROWS_AS(parse_problem("<= 1 : 0,1\n<= 1 : 0"), ParseError);
  CHECK_THROWS_AS(parse_problem("< 1 : 0"), ParseError);
}
