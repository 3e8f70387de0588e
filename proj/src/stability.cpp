#include "randlab/stability.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "randlab/corpus.hpp"
#include "randlab/error.hpp"

namespace randlab {

namespace {

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Tuple concat(Tuple a, const Tuple& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Tuple slice(const Tuple& t, std::size_t from, std::size_t count) {
  return Tuple(t.begin() + static_cast<std::ptrdiff_t>(from), t.begin() + static_cast<std::ptrdiff_t>(from + count));
}

int isize(std::size_t n) { return static_cast<int>(n); }

// Evaluates phi(a, b, params) for a fixed context.
class PhiEval {
 public:
  explicit PhiEval(const PhiContext& ctx)
      : ctx_(ctx), compiled_(ctx.phi, concat(concat(ctx.x, ctx.y), ctx.w)),
        values_(ctx.x.size() + ctx.y.size() + ctx.w.size()) {
    std::copy(ctx.params.begin(), ctx.params.end(), values_.begin() + static_cast<std::ptrdiff_t>(ctx.x.size() + ctx.y.size()));
  }

  bool operator()(const Tuple& a, const Tuple& b) {
    std::copy(a.begin(), a.end(), values_.begin());
    std::copy(b.begin(), b.end(), values_.begin() + static_cast<std::ptrdiff_t>(a.size()));
    return compiled_.eval(*ctx_.m, values_);
  }

 private:
  const PhiContext& ctx_;
  CompiledFormula compiled_;
  Tuple values_;
};

PhiType trace_of(const PhiContext& ctx, PhiEval& eval, const Tuple& a) {
  PhiType out;
  out.witness = a;
  for (auto& b : all_tuples(ctx.m->size(), static_cast<int>(ctx.y.size())))
    if (eval(a, b)) out.trace.push_back(std::move(b));
  return out;
}

std::vector<PhiType> distinct_traces(const PhiContext& ctx, std::vector<Tuple> realizations) {
  std::sort(realizations.begin(), realizations.end());
  std::vector<PhiType> out;
  std::set<std::vector<Tuple>> seen;
  PhiEval eval(ctx);
  for (const auto& a : realizations) {
    auto t = trace_of(ctx, eval, a);
    if (seen.insert(t.trace).second) out.push_back(std::move(t));
  }
  return out;
}

Permutation carrying(const TypeSpace& all, const Tuple& from, const Tuple& to) {
  for (const auto& s : all.automorphisms()) {
    bool ok = true;
    for (std::size_t i = 0; i < from.size() && ok; ++i)
      ok = s[static_cast<std::size_t>(from[i])] == to[i];
    if (ok) return s;
  }
  throw std::logic_error("parameter tuples of the same type are not conjugate");
}

Tuple apply_perm(const Permutation& s, const Tuple& t) {
  Tuple out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = s[static_cast<std::size_t>(t[i])];
  return out;
}

// Weights of the image of nu under taking the given coordinates.
std::vector<Rational> project(const TypeSpace& from, const std::vector<Rational>& weights, const std::vector<int>& coords,
                              const TypeSpace& to) {
  std::vector<Rational> out(static_cast<std::size_t>(to.size()), Rational(0));
  Tuple sub(coords.size());
  for (int r = 0; r < from.size(); ++r) {
    if (weights[static_cast<std::size_t>(r)] == 0) continue;
    const auto& rep = from.representative(r);
    for (std::size_t i = 0; i < coords.size(); ++i) sub[i] = rep[static_cast<std::size_t>(coords[i])];
    out[static_cast<std::size_t>(to.type_of(sub))] += weights[static_cast<std::size_t>(r)];
  }
  return out;
}

std::vector<int> range(int from, int count) {
  std::vector<int> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = from + i;
  return out;
}

void check_measure_shape(const PhiContext& ctx, const RMeasure& nu, std::size_t arity, const char* what) {
  if (nu.param_count() != isize(ctx.w.size()))
    throw PreconditionError(std::string(what) + " has " + std::to_string(nu.param_count()) + " parameter coordinates, context has " +
                            std::to_string(ctx.w.size()));
  if (arity != static_cast<std::size_t>(-1) && nu.arity() != isize(arity))
    throw ArityError(std::string(what) + " has arity " + std::to_string(nu.arity()) + ", expected " + std::to_string(arity));
  if (nu.space().structure_ptr() != ctx.m && print_structure(nu.space().structure()) != print_structure(*ctx.m))
    throw PreconditionError(std::string(what) + " lives over another structure");
}

void check_same_w(const TypeSpace& sw, const RMeasure& p, const RMeasure& q, int nw) {
  auto px = project(p.space(), p.weights(), range(p.arity(), nw), sw);
  auto qy = project(q.space(), q.weights(), range(q.arity(), nw), sw);
  for (std::size_t z = 0; z < px.size(); ++z)
    if (px[z] != qy[z])
      throw PreconditionError("W-marginals differ at s" + std::to_string(z) + ": " + to_string(px[z]) + " vs " + to_string(qy[z]));
}

// rho at (type i of S_{x,W}, type j of S_{y,W}) sharing their W-type. The
// compatible phi-types of each i are kept in `hats` across calls.
Rational rho_pair(const PhiContext& ctx, const TypeSpace& sx, const TypeSpace& sy, const TypeSpace& sw, int i, int j,
                  std::map<int, std::vector<PhiType>>& hats) {
  auto nx = ctx.x.size(), ny = ctx.y.size(), nw = ctx.w.size();
  const auto& rx = sx.representative(i);
  const auto& ry = sy.representative(j);
  Tuple params = slice(rx, nx, nw);
  auto it = hats.find(i);
  if (it == hats.end()) {
    auto local = ctx.with_params(params);
    auto space = type_space(ctx.m, isize(nx), params);
    it = hats.emplace(i, compatible_phi_types(local, *space, space->type_of(slice(rx, 0, nx)))).first;
  }
  auto s = carrying(sw, slice(ry, ny, nw), params);
  Tuple b = apply_perm(s, slice(ry, 0, ny));
  int hits = 0;
  for (const auto& t : it->second) hits += t.contains(b);
  return Rational(hits) / Rational(isize(it->second.size()));
}

}  // namespace

void PhiContext::validate(bool need_params) const {
  if (!m) throw PreconditionError("context has no structure");
  std::set<std::string> seen;
  for (const auto* group : {&x, &y, &w})
    for (const auto& v : *group)
      if (!seen.insert(v).second) throw PreconditionError("variable " + v + " occurs in two groups");
  for (const auto& v : phi.free_vars())
    if (!seen.count(v)) throw PreconditionError("free variable " + v + " of " + to_string(phi) + " is in no group");
  if (need_params && params.size() != w.size())
    throw ArityError(std::to_string(params.size()) + " parameter values for " + std::to_string(w.size()) + " variables");
  for (auto e : params)
    if (e < 0 || e >= m->size()) throw PreconditionError("parameter " + std::to_string(e) + " is not an element");
}

PhiContext PhiContext::with_params(Tuple values) const {
  PhiContext out = *this;
  out.params = std::move(values);
  return out;
}

bool PhiType::contains(const Tuple& b) const { return std::binary_search(trace.begin(), trace.end(), b); }

Ladder find_ladder(const PhiContext& ctx, int bound) {
  ctx.validate();
  if (bound < 1) throw PreconditionError("ladder bound must be at least 1");
  auto as = all_tuples(ctx.m->size(), isize(ctx.x.size()));
  auto bs = all_tuples(ctx.m->size(), isize(ctx.y.size()));
  PhiEval eval(ctx);
  std::vector<std::vector<char>> truth(as.size(), std::vector<char>(bs.size()));
  for (std::size_t i = 0; i < as.size(); ++i)
    for (std::size_t j = 0; j < bs.size(); ++j) truth[i][j] = eval(as[i], bs[j]);

  std::vector<std::size_t> ia, ib, best_a, best_b;
  // Extends a ladder of length k by a pair (a_k, b_k): phi(a_i, b_k) for
  // i < k, !phi(a_k, b_j) for j <= k.
  auto search = [&](auto&& self) -> bool {
    if (ia.size() > best_a.size()) {
      best_a = ia;
      best_b = ib;
    }
    if (isize(ia.size()) == bound) return true;
    for (std::size_t a = 0; a < as.size(); ++a) {
      bool ok = true;
      for (auto j : ib) ok = ok && !truth[a][j];
      if (!ok) continue;
      for (std::size_t b = 0; b < bs.size(); ++b) {
        if (truth[a][b]) continue;
        bool good = true;
        for (auto i : ia) good = good && truth[i][b];
        if (!good) continue;
        ia.push_back(a);
        ib.push_back(b);
        bool done = self(self);
        ia.pop_back();
        ib.pop_back();
        if (done) return true;
      }
    }
    return false;
  };
  search(search);
  Ladder out;
  out.length = isize(best_a.size());
  for (auto i : best_a) out.a.push_back(as[i]);
  for (auto j : best_b) out.b.push_back(bs[j]);
  return out;
}

int ladder_length(const PhiContext& ctx, int bound) { return find_ladder(ctx, bound).length; }

PhiType phi_type_of(const PhiContext& ctx, const Tuple& a) {
  PhiEval eval(ctx);
  return trace_of(ctx, eval, a);
}

std::vector<PhiType> phi_type_space(const PhiContext& ctx) {
  ctx.validate();
  return distinct_traces(ctx, all_tuples(ctx.m->size(), isize(ctx.x.size())));
}

RankMult cb_rank_mult(const PhiContext& ctx, const Formula& pi) {
  ctx.validate();
  auto points = phi_type_space(ctx);
  CompiledFormula compiled(pi, ctx.x);
  std::vector<Tuple> realizations;
  for (auto& a : all_tuples(ctx.m->size(), isize(ctx.x.size())))
    if (compiled.eval(*ctx.m, a)) realizations.push_back(std::move(a));
  std::set<std::vector<Tuple>> in_pi;
  for (const auto& t : distinct_traces(ctx, realizations)) in_pi.insert(t.trace);

  RankMult out;
  // Derived sets of S_phi(M). A point is isolated in the current set when the
  // basic clopen of its literals phi(x,b), !phi(x,b) (b over the whole
  // universe) meets the set in that point alone.
  auto bs = all_tuples(ctx.m->size(), isize(ctx.y.size()));
  std::vector<PhiType> current = points;
  for (int rank = 0; !current.empty(); ++rank) {
    std::vector<PhiType> isolated, rest;
    for (const auto& t : current) {
      int meets = 0;
      for (const auto& u : current) {
        bool agree = true;
        for (const auto& b : bs) agree = agree && t.contains(b) == u.contains(b);
        meets += agree;
      }
      (meets == 1 ? isolated : rest).push_back(t);
    }
    int here = 0;
    for (const auto& t : current) here += in_pi.count(t.trace) ? 1 : 0;
    if (here > 0) {
      out.rank = rank;
      out.multiplicity = here;
    }
    if (isolated.empty()) break;
    current = std::move(rest);
  }
  return out;
}

std::vector<PhiType> compatible_phi_types(const PhiContext& ctx, const TypeSpace& space, int p) {
  if (p < 0 || p >= space.size())
    throw PreconditionError("no type p" + std::to_string(p) + " among " + std::to_string(space.size()) + " types over the parameters");
  return distinct_traces(ctx, space.orbit(p));
}

Rational rho_fraction(const PhiContext& ctx, int p, const Tuple& b) {
  ctx.validate();
  if (b.size() != ctx.y.size()) throw ArityError("b has " + std::to_string(b.size()) + " entries for " + std::to_string(ctx.y.size()) + " variables");
  auto space = type_space(ctx.m, isize(ctx.x.size()), ctx.params);
  auto hat = compatible_phi_types(ctx, *space, p);
  int hits = 0;
  for (const auto& t : hat) hits += t.contains(b);
  return Rational(hits) / Rational(isize(hat.size()));
}

Rational rho_multiplicity(const PhiContext& ctx, int p, const Tuple& b) {
  ctx.validate();
  if (b.size() != ctx.y.size()) throw ArityError("b has " + std::to_string(b.size()) + " entries for " + std::to_string(ctx.y.size()) + " variables");
  auto space = type_space(ctx.m, isize(ctx.x.size()), ctx.params);
  if (p < 0 || p >= space->size())
    throw PreconditionError("no type p" + std::to_string(p) + " among " + std::to_string(space->size()) + " types over the parameters");
  Formula xi = isolating_formula(*space, p, ctx.x);
  // phi(x, b) with b and the parameters as literals.
  Formula instance = ctx.phi;
  for (std::size_t i = ctx.w.size(); i-- > 0;)
    instance = Formula::exists(ctx.w[i], Formula::conjunction(Formula::equal(Term::variable(ctx.w[i]), Term::element(ctx.params[i])), instance));
  for (std::size_t i = ctx.y.size(); i-- > 0;)
    instance = Formula::exists(ctx.y[i], Formula::conjunction(Formula::equal(Term::variable(ctx.y[i]), Term::element(b[i])), instance));
  auto whole = cb_rank_mult(ctx, xi);
  auto part = cb_rank_mult(ctx, Formula::conjunction(xi, instance));
  if (!whole.rank) throw std::logic_error("a type over the parameters has no realization");
  if (*whole.rank != 0 || (part.rank && *part.rank != 0))
    throw std::logic_error("nonzero Cantor-Bendixson rank in a finite structure");
  return Rational(part.multiplicity) / Rational(whole.multiplicity);
}

Rational rho(const PhiContext& ctx, int p, const Tuple& b) {
  auto a = rho_fraction(ctx, p, b);
  auto m = rho_multiplicity(ctx, p, b);
  if (a != m) throw std::logic_error("rho: fraction " + to_string(a) + " but multiplicity ratio " + to_string(m));
  return a;
}

Rational rho(const PhiContext& ctx, int p, const TypeId& b) { return rho(ctx, p, b.representative); }

MeasurableMap restrict_to_params(const TypeSpace& space, const TypeSpace& sw, int nw) {
  MeasurableMap map;
  for (int z = 0; z < sw.size(); ++z) map.codomain.push_back("s" + std::to_string(z));
  int n = space.arity() - nw;
  for (int q = 0; q < space.size(); ++q)
    map.image.push_back(sw.type_of(slice(space.representative(q), static_cast<std::size_t>(n), static_cast<std::size_t>(nw))));
  return map;
}

FiberTypeSpace make_fiber_type_space(const StructurePtr& m, int nx, int ny, int nw) {
  FiberTypeSpace out;
  out.sx = type_space(m, nx + nw);
  out.sy = type_space(m, ny + nw);
  out.sw = type_space(m, nw);
  out.fiber = make_fiber_space(restrict_to_params(*out.sx, *out.sw, nw), restrict_to_params(*out.sy, *out.sw, nw));
  return out;
}

Rational rho_at(const PhiContext& ctx, const FiberTypeSpace& fts, int point) {
  ctx.validate(false);
  auto [i, j] = fts.fiber.points.at(static_cast<std::size_t>(point));
  std::map<int, std::vector<PhiType>> hats;
  return rho_pair(ctx, *fts.sx, *fts.sy, *fts.sw, i, j, hats);
}

RationalFn rho_function(const PhiContext& ctx, const FiberTypeSpace& fts) {
  RationalFn out;
  for (int k = 0; k < fts.fiber.size(); ++k) out.push_back(rho_at(ctx, fts, k));
  return out;
}

Rational rho_hat(const PhiContext& ctx, const RMeasure& p, const RMeasure& q) {
  ctx.validate(false);
  check_measure_shape(ctx, p, ctx.x.size(), "p");
  check_measure_shape(ctx, q, ctx.y.size(), "q");
  int nw = isize(ctx.w.size());
  auto sw = type_space(ctx.m, nw);
  // The fiber product over the supports only, since FinProbSpace weights are
  // positive.
  auto support = [&](const RMeasure& nu, std::vector<std::string>& labels, std::vector<Rational>& weights) {
    std::vector<int> idx;
    for (int k = 0; k < nu.space().size(); ++k)
      if (nu.weight(k) > 0) {
        idx.push_back(k);
        labels.push_back("q" + std::to_string(k));
        weights.push_back(nu.weight(k));
      }
    return idx;
  };
  std::vector<std::string> lx, ly;
  std::vector<Rational> wx, wy;
  auto ix = support(p, lx, wx);
  auto iy = support(q, ly, wy);
  auto full_x = restrict_to_params(p.space(), *sw, nw);
  auto full_y = restrict_to_params(q.space(), *sw, nw);
  MeasurableMap px{full_x.codomain, {}}, py{full_y.codomain, {}};
  for (int k : ix) px.image.push_back(full_x(k));
  for (int k : iy) py.image.push_back(full_y(k));
  auto fib = make_fiber_space(px, py);
  auto product = fiber_product(FinProbSpace(lx, wx), FinProbSpace(ly, wy), fib);
  Rational total = 0;
  std::map<int, std::vector<PhiType>> hats;
  for (int k = 0; k < fib.size(); ++k) {
    auto [a, b] = fib.points[static_cast<std::size_t>(k)];
    total += product.weight(k) * rho_pair(ctx, p.space(), q.space(), *sw, ix[static_cast<std::size_t>(a)], iy[static_cast<std::size_t>(b)], hats);
  }
  return total;
}

namespace {

struct ExtensionShape {
  int nx, ny, k, nw;
  TypeSpacePtr sw;
  TypeSpacePtr target;
  std::vector<int> xw_coords() const {
    auto c = range(0, nx);
    for (int i = 0; i < nw; ++i) c.push_back(nx + k * ny + i);
    return c;
  }
  std::vector<int> yw_coords() const { return range(nx, k * ny + nw); }
  std::vector<int> yiw_coords(int i) const {
    auto c = range(nx + i * ny, ny);
    for (int j = 0; j < nw; ++j) c.push_back(nx + k * ny + j);
    return c;
  }
};

ExtensionShape extension_shape(const PhiContext& ctx, const RMeasure& p, const RMeasure& q) {
  ctx.validate(false);
  check_measure_shape(ctx, p, ctx.x.size(), "p");
  check_measure_shape(ctx, q, static_cast<std::size_t>(-1), "q");
  ExtensionShape s;
  s.nx = isize(ctx.x.size());
  s.ny = isize(ctx.y.size());
  s.nw = isize(ctx.w.size());
  if (s.ny == 0 ? q.arity() != 0 : q.arity() % s.ny != 0)
    throw ArityError("q has arity " + std::to_string(q.arity()) + ", not a multiple of |y| = " + std::to_string(s.ny));
  s.k = s.ny == 0 ? 0 : q.arity() / s.ny;
  s.sw = type_space(ctx.m, s.nw);
  check_same_w(*s.sw, p, q, s.nw);
  s.target = type_space(ctx.m, s.nx + s.k * s.ny + s.nw);
  return s;
}

// The marginal of q on (y_i, W) as a measure over S_{y,W}.
RMeasure marginal_i(const PhiContext& ctx, const ExtensionShape& s, const RMeasure& q, int i) {
  auto space = type_space(ctx.m, s.ny + s.nw);
  auto coords = range(i * s.ny, s.ny);
  for (int j = 0; j < s.nw; ++j) coords.push_back(s.k * s.ny + j);
  return RMeasure(space, project(q.space(), q.weights(), coords, *space), s.nw);
}

}  // namespace

RMeasure nonforking_extension(const PhiContext& ctx, const RMeasure& p, const RMeasure& q) {
  auto s = extension_shape(ctx, p, q);
  auto wx = project(p.space(), p.weights(), range(s.nx, s.nw), *s.sw);
  auto rx = restrict_to_params(p.space(), *s.sw, s.nw);
  auto ry = restrict_to_params(q.space(), *s.sw, s.nw);
  std::vector<Rational> out(static_cast<std::size_t>(s.target->size()), Rational(0));
  for (int i = 0; i < p.space().size(); ++i) {
    if (p.weight(i) == 0) continue;
    const auto& rep = p.space().representative(i);
    Tuple params = slice(rep, static_cast<std::size_t>(s.nx), static_cast<std::size_t>(s.nw));
    auto local = ctx.with_params(params);
    auto space = type_space(ctx.m, s.nx, params);
    int p0 = space->type_of(slice(rep, 0, static_cast<std::size_t>(s.nx)));
    // Realizations of p0 over the parameters, grouped by phi-type.
    std::map<std::vector<Tuple>, std::vector<Tuple>> by_trace;
    PhiEval eval(local);
    for (const auto& a : space->orbit(p0)) by_trace[trace_of(local, eval, a).trace].push_back(a);
    for (int j = 0; j < q.space().size(); ++j) {
      if (q.weight(j) == 0 || ry(j) != rx(i)) continue;
      Rational mass = p.weight(i) * q.weight(j) / wx[static_cast<std::size_t>(rx(i))];
      const auto& qrep = q.space().representative(j);
      auto sigma = carrying(*s.sw, slice(qrep, static_cast<std::size_t>(s.k * s.ny), static_cast<std::size_t>(s.nw)), params);
      Tuple ybar = apply_perm(sigma, slice(qrep, 0, static_cast<std::size_t>(s.k * s.ny)));
      Rational per_type = mass / Rational(isize(by_trace.size()));
      for (const auto& [trace, realizations] : by_trace) {
        Rational each = per_type / Rational(isize(realizations.size()));
        for (const auto& a : realizations)
          out[static_cast<std::size_t>(s.target->type_of(concat(concat(a, ybar), params)))] += each;
      }
    }
  }
  return RMeasure(s.target, std::move(out), s.k * s.ny + s.nw);
}

StationaritySystem stationarity_system(const PhiContext& ctx, const RMeasure& p, const RMeasure& q) {
  auto s = extension_shape(ctx, p, q);
  StationaritySystem sys;
  sys.target = s.target;
  const auto& target = *s.target;
  sys.problem.ground_size = target.size();
  auto indicator_rows = [&](const RMeasure& nu, const std::vector<int>& coords) {
    Tuple sub(coords.size());
    std::vector<int> image;
    for (int r = 0; r < target.size(); ++r) {
      for (std::size_t c = 0; c < coords.size(); ++c)
        sub[c] = target.representative(r)[static_cast<std::size_t>(coords[c])];
      image.push_back(nu.space().type_of(sub));
    }
    for (int t = 0; t < nu.space().size(); ++t) {
      RationalFn row(static_cast<std::size_t>(target.size()), Rational(0));
      for (int r = 0; r < target.size(); ++r)
        if (image[static_cast<std::size_t>(r)] == t) row[static_cast<std::size_t>(r)] = 1;
      sys.problem.constraints.push_back({row, nu.weight(t), Relation::kEqual});
    }
  };
  indicator_rows(p, s.xw_coords());
  indicator_rows(q, s.yw_coords());
  CompiledFormula phi(ctx.phi, concat(concat(ctx.x, ctx.y), ctx.w));
  for (int i = 0; i < s.k; ++i) {
    auto qi = marginal_i(ctx, s, q, i);
    sys.rho_hats.push_back(rho_hat(ctx, p, qi));
    RationalFn row(static_cast<std::size_t>(target.size()), Rational(0));
    Tuple values;
    for (int r = 0; r < target.size(); ++r) {
      const auto& rep = target.representative(r);
      values.clear();
      for (int c : range(0, s.nx)) values.push_back(rep[static_cast<std::size_t>(c)]);
      for (int c : s.yiw_coords(i)) values.push_back(rep[static_cast<std::size_t>(c)]);
      if (phi.eval(*ctx.m, values)) row[static_cast<std::size_t>(r)] = 1;
    }
    sys.rho_rows.push_back(isize(sys.problem.constraints.size()));
    sys.problem.constraints.push_back({row, sys.rho_hats.back(), Relation::kEqual});
  }
  return sys;
}

StationarityReport certify_extension(const PhiContext& ctx, const RMeasure& p, const RMeasure& q,
                                     const RMeasure& extension, int positivity_trials, unsigned seed) {
  auto s = extension_shape(ctx, p, q);
  StationarityReport rep;
  if (!(extension.space() == *s.target)) throw PreconditionError("extension lives on another type space");
  const auto& target = *s.target;
  rep.marginals_ok = project(target, extension.weights(), s.xw_coords(), p.space()) == p.weights() &&
                     project(target, extension.weights(), s.yw_coords(), q.space()) == q.weights();

  auto sys = stationarity_system(ctx, p, q);
  rep.rho_hats = sys.rho_hats;
  rep.rho_hat_ok = true;
  for (std::size_t i = 0; i < sys.rho_rows.size(); ++i) {
    const auto& row = sys.problem.constraints[static_cast<std::size_t>(sys.rho_rows[i])].phi;
    Rational v = 0;
    for (int r = 0; r < target.size(); ++r) v += row[static_cast<std::size_t>(r)] * extension.weight(r);
    rep.phi_values.push_back(v);
    rep.rho_hat_ok = rep.rho_hat_ok && v == sys.rho_hats[i];
  }

  rep.satisfies_system = true;
  for (const auto& c : sys.problem.constraints) {
    Rational v = 0;
    for (int r = 0; r < target.size(); ++r) v += c.phi[static_cast<std::size_t>(r)] * extension.weight(r);
    rep.satisfies_system = rep.satisfies_system && v == c.bound;
  }

  auto cert = extend_measure_eq(sys.problem);
  rep.certified = cert.feasible;
  rep.certificate_ok = verify_certificate(cert);

  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coeff(-3, 3);
  rep.positivity_ok = true;
  for (int t = 0; t < positivity_trials; ++t) {
    std::vector<Rational> y;
    for (std::size_t c = 0; c < sys.problem.constraints.size(); ++c) y.emplace_back(coeff(rng));
    std::optional<Rational> low;
    for (int r = 0; r < target.size(); ++r) {
      Rational v = 0;
      for (std::size_t c = 0; c < y.size(); ++c) v += y[c] * sys.problem.constraints[c].phi[static_cast<std::size_t>(r)];
      if (!low || v < *low) low = v;
    }
    Rational bounds = 0;
    for (std::size_t c = 0; c < y.size(); ++c) bounds += y[c] * sys.problem.constraints[c].bound;
    // With the constant row weighted -low the combination is >= 0 pointwise,
    // so consistency demands the shifted bounds be >= 0.
    rep.positivity_ok = rep.positivity_ok && bounds - low.value_or(Rational(0)) >= 0;
    ++rep.positivity_trials;
  }
  return rep;
}

std::vector<std::vector<int>> depth_classes(const TypeSpace& space, int depth) {
  if (!space.params().empty()) throw PreconditionError("depth classes need a type space over the empty set");
  const auto& m = space.structure();
  int n = space.arity();
  std::vector<std::vector<int>> out;
  if (depth < 0 || depth >= m.size()) {
    for (int q = 0; q < space.size(); ++q) out.push_back({q});
    return out;
  }
  // Back-and-forth classes, functions and constants read as their graphs.
  const auto& sig = m.signature();
  auto atomic = [&](const Tuple& t) {
    std::vector<char> key;
    int l = isize(t.size());
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) key.push_back(t[static_cast<std::size_t>(i)] == t[static_cast<std::size_t>(j)]);
    for (int c = 0; c < isize(sig.constants().size()); ++c)
      for (auto e : t) key.push_back(e == m.constant(c));
    for (int rel = 0; rel < isize(sig.relations().size()); ++rel)
      for (const auto& idx : all_tuples(l, sig.relations()[static_cast<std::size_t>(rel)].arity)) {
        Tuple args;
        for (auto i : idx) args.push_back(t[static_cast<std::size_t>(i)]);
        key.push_back(m.holds(rel, args));
      }
    for (int f = 0; f < isize(sig.functions().size()); ++f)
      for (const auto& idx : all_tuples(l, sig.functions()[static_cast<std::size_t>(f)].arity + 1)) {
        Tuple args;
        for (std::size_t i = 0; i + 1 < idx.size(); ++i) args.push_back(t[static_cast<std::size_t>(idx[i])]);
        key.push_back(m.apply(f, args) == t[static_cast<std::size_t>(idx.back())]);
      }
    return key;
  };
  // ids[l - n] indexes tuples of length l by encoded position.
  std::vector<int> below;
  int len = n + depth;
  {
    std::map<std::vector<char>, int> ids;
    for (const auto& t : all_tuples(m.size(), len)) below.push_back(ids.emplace(atomic(t), isize(ids.size())).first->second);
  }
  for (int l = len - 1; l >= n; --l) {
    std::map<std::vector<int>, int> ids;
    std::vector<int> here;
    for (std::size_t code = 0; code < below.size() / static_cast<std::size_t>(m.size()); ++code) {
      std::vector<int> key;
      for (int c = 0; c < m.size(); ++c) key.push_back(below[code * static_cast<std::size_t>(m.size()) + static_cast<std::size_t>(c)]);
      std::sort(key.begin(), key.end());
      key.erase(std::unique(key.begin(), key.end()), key.end());
      here.push_back(ids.emplace(key, isize(ids.size())).first->second);
    }
    below = std::move(here);
  }
  std::map<int, std::size_t> slot;
  for (int q = 0; q < space.size(); ++q) {
    int id = below[n == 0 ? 0 : m.encode(space.representative(q))];
    auto [it, fresh] = slot.emplace(id, out.size());
    if (fresh) out.emplace_back();
    out[it->second].push_back(q);
  }
  return out;
}

IndependenceVerdict check_independence(const Randomization& r, const std::vector<RandomElement>& c,
                                       const std::vector<RandomElement>& b, const std::vector<RandomElement>& a,
                                       const IndependenceOptions& options) {
  auto p = rtype_of(r, c, a);
  auto q = rtype_of(r, b, a);
  const auto& m = p.space().structure_ptr();
  auto names = [](const std::string& stem, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(n == 1 ? stem : stem + std::to_string(i));
    return out;
  };
  PhiContext ctx{m, Formula::truth(), names("x", c.size()), names("y", b.size()), names("w", a.size()), {}};
  IndependenceVerdict verdict;
  verdict.vars = concat(concat(ctx.x, ctx.y), ctx.w);

  std::vector<RandomElement> args = c;
  args.insert(args.end(), b.begin(), b.end());
  args.insert(args.end(), a.begin(), a.end());

  int nw = isize(a.size());
  // Subtuples of A by size, then lexicographically by position.
  std::vector<std::vector<int>> subsets;
  for (int size = 0; size <= nw; ++size)
    for (unsigned mask = 0; mask < (1u << nw); ++mask)
      if (std::popcount(mask) == size) {
        std::vector<int> s;
        for (int i = 0; i < nw; ++i)
          if (mask >> i & 1u) s.push_back(i);
        subsets.push_back(s);
      }
  std::sort(subsets.begin(), subsets.end(), [](const auto& l, const auto& rr) {
    return l.size() != rr.size() ? l.size() < rr.size() : l < rr;
  });

  for (const auto& sub : subsets) {
    std::vector<std::string> vars = concat(ctx.x, ctx.y);
    for (int i : sub) vars.push_back(ctx.w[static_cast<std::size_t>(i)]);
    auto space = type_space(m, isize(vars.size()));
    auto classes = depth_classes(*space, options.depth < 0 ? m->size() : options.depth);
    int k = isize(classes.size());
    std::vector<std::vector<int>> unions;
    if (k <= options.max_classes) {
      for (int size = 1; size < k; ++size)
        for (unsigned mask = 1; mask < (1u << k); ++mask)
          if (std::popcount(mask) == size) {
            std::vector<int> u;
            for (int i = 0; i < k; ++i)
              if (mask >> i & 1u) u.push_back(i);
            unions.push_back(u);
          }
      std::sort(unions.begin(), unions.end(), [](const auto& l, const auto& rr) {
        return l.size() != rr.size() ? l.size() < rr.size() : l < rr;
      });
    } else {
      std::set<std::vector<int>> seen;
      auto add = [&](std::vector<int> u) {
        if (seen.insert(u).second) unions.push_back(u);
        std::vector<int> comp;
        for (int i = 0; i < k; ++i)
          if (!std::binary_search(u.begin(), u.end(), i)) comp.push_back(i);
        if (seen.insert(comp).second) unions.push_back(comp);
      };
      for (int i = 0; i < k; ++i) add({i});
    }
    for (const auto& u : unions) {
      std::vector<Formula> parts;
      for (int cls : u)
        for (int orbit : classes[static_cast<std::size_t>(cls)]) parts.push_back(Formula::type_is(space, orbit, vars));
      auto local = ctx;
      local.phi = Formula::disjunction(parts);
      Rational lhs = mu(r, event_of(r, local.phi, verdict.vars, args));
      Rational rhs = rho_hat(local, p, q);
      ++verdict.formulas_checked;
      if (lhs != rhs) {
        std::vector<Formula> named;
        for (int cls : u)
          for (int orbit : classes[static_cast<std::size_t>(cls)]) named.push_back(isolating_formula(*space, orbit, vars));
        verdict.independent = false;
        verdict.witness = Formula::disjunction(named);
        verdict.lhs = lhs;
        verdict.rhs = rhs;
        return verdict;
      }
    }
  }
  return verdict;
}

std::vector<Formula> phi_corpus(const Signature& sig, int limit) {
  std::vector<Formula> out;
  std::set<std::string> seen;
  auto add = [&](const Formula& f) {
    if (isize(out.size()) < limit && seen.insert(to_string(f)).second) out.push_back(f);
  };
  auto base = formula_corpus(sig, static_cast<std::size_t>(limit));
  auto with_w = atoms_over(sig, {"x", "y", "w"});
  std::vector<Formula> mention;
  for (const auto& f : with_w) {
    auto fv = f.free_vars();
    if (std::find(fv.begin(), fv.end(), "w") != fv.end()) mention.push_back(f);
  }
  // Interleave so that a short limit still sees w.
  std::size_t i = 0, j = 0;
  while (isize(out.size()) < limit && (i < base.size() || j < mention.size())) {
    if (i < base.size()) add(base[i++]);
    if (j < mention.size()) {
      add(mention[j]);
      if (!base.empty()) add(Formula::conjunction(base[j % base.size()], mention[j]));
      ++j;
    }
  }
  return out;
}

}  // namespace randlab
