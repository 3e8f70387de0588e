#include "randlab/rtype.hpp"

#include <algorithm>
#include <set>

#include "lexer.hpp"

namespace randlab {

namespace {

const StructurePtr& single_structure(const Randomization& r) {
  const auto& m = r.structure_ptr(0);
  for (int w = 1; w < r.size(); ++w) {
    const auto& other = r.structure_ptr(w);
    if (other != m && print_structure(*other) != print_structure(*m))
      throw PreconditionError("types need a single structure; point " + r.base().label(w) + " carries " +
                              other->name() + ", point " + r.base().label(0) + " carries " + m->name());
  }
  return m;
}

}  // namespace

RMeasure::RMeasure(TypeSpacePtr space, std::vector<Rational> weights, int param_count)
    : space_(std::move(space)), weights_(std::move(weights)), param_count_(param_count) {
  if (!space_) throw PreconditionError("missing type space");
  if (param_count_ < 0 || param_count_ > space_->arity()) throw PreconditionError("bad parameter count");
  if (weights_.size() != static_cast<std::size_t>(space_->size()))
    throw PreconditionError(std::to_string(weights_.size()) + " weights for " + std::to_string(space_->size()) + " types");
  for (std::size_t q = 0; q < weights_.size(); ++q)
    if (weights_[q] < 0) throw PreconditionError("negative weight on q" + std::to_string(q));
  if (sum(weights_) != 1) throw PreconditionError("weights sum to " + to_string(sum(weights_)));
}

RMeasure RMeasure::point_mass(TypeSpacePtr space, int q, int param_count) {
  std::vector<Rational> w(static_cast<std::size_t>(space->size()), Rational(0));
  w.at(static_cast<std::size_t>(q)) = 1;
  return RMeasure(std::move(space), std::move(w), param_count);
}

bool RMeasure::operator==(const RMeasure& other) const {
  return param_count_ == other.param_count_ && weights_ == other.weights_ &&
         (space_ == other.space_ || *space_ == *other.space_);
}

RMeasure rtype_of(const Randomization& r, const std::vector<RandomElement>& tuple,
                  const std::vector<RandomElement>& params) {
  const auto& m = single_structure(r);
  for (const auto& f : tuple) r.check_element(f);
  for (const auto& f : params) r.check_element(f);
  auto space = type_space(m, static_cast<int>(tuple.size() + params.size()));
  std::vector<Rational> weights(static_cast<std::size_t>(space->size()), Rational(0));
  Tuple t(tuple.size() + params.size());
  for (int w = 0; w < r.size(); ++w) {
    std::size_t i = 0;
    for (const auto& f : tuple) t[i++] = f[static_cast<std::size_t>(w)];
    for (const auto& f : params) t[i++] = f[static_cast<std::size_t>(w)];
    weights[static_cast<std::size_t>(space->type_of(t))] += r.base().weight(w);
  }
  return RMeasure(space, std::move(weights), static_cast<int>(params.size()));
}

Rational formula_mass(const RMeasure& nu, const Formula& phi, const std::vector<std::string>& vars) {
  if (vars.size() != static_cast<std::size_t>(nu.space().arity()))
    throw ArityError(std::to_string(vars.size()) + " variables for types of arity " + std::to_string(nu.space().arity()));
  CompiledFormula compiled(phi, vars);
  Rational total = 0;
  for (int q = 0; q < nu.space().size(); ++q)
    if (compiled.eval(nu.space().structure(), nu.space().representative(q))) total += nu.weight(q);
  return total;
}

std::string print_rmeasure(const RMeasure& nu) {
  std::string out = "rtype {";
  for (int q = 0; q < nu.space().size(); ++q)
    out += std::string(q ? ", " : " ") + "q" + std::to_string(q) + ": " + to_string(nu.weight(q));
  return out + " }";
}

RMeasure parse_rmeasure(std::string_view text, TypeSpacePtr space, int param_count) {
  detail::TokenStream ts(text);
  ts.expect_word("rtype");
  ts.expect("{");
  std::vector<Rational> weights(static_cast<std::size_t>(space->size()), Rational(0));
  std::vector<bool> seen(weights.size(), false);
  if (!ts.accept("}")) {
    do {
      std::size_t pos = ts.peek().pos;
      std::string name = ts.expect_ident();
      int q = -1;
      if (name.size() > 1 && name[0] == 'q' && std::all_of(name.begin() + 1, name.end(), ::isdigit)) q = std::stoi(name.substr(1));
      if (q < 0 || q >= space->size()) throw ResolutionError("no type " + name + " at position " + std::to_string(pos));
      if (seen[static_cast<std::size_t>(q)]) throw ParseError("type " + name + " listed twice", pos);
      seen[static_cast<std::size_t>(q)] = true;
      ts.expect(":");
      std::string r = std::to_string(ts.expect_int());
      if (ts.accept("/")) r += "/" + std::to_string(ts.expect_int());
      weights[static_cast<std::size_t>(q)] = parse_rational(r);
    } while (ts.accept(","));
    ts.expect("}");
  }
  if (!ts.at_end()) ts.fail("unexpected trailing input");
  return RMeasure(std::move(space), std::move(weights), param_count);
}

RandomElement RefinedBase::lift(const RandomElement& f) const {
  RandomElement out;
  for (int w : projection) out.push_back(f.at(static_cast<std::size_t>(w)));
  return out;
}

Event RefinedBase::lift(const Event& e) const {
  Event out(projection.size());
  for (std::size_t p = 0; p < projection.size(); ++p) out[p] = e.test(static_cast<std::size_t>(projection[p]));
  return out;
}

RefinedBase refine(const FinProbSpace& base, const std::vector<std::vector<int>>& groups,
                   const std::vector<std::vector<Rational>>& masses) {
  if (groups.size() != masses.size()) throw PreconditionError("one list of masses per group is needed");
  struct Piece {
    int point;
    int order;
    int target;
    Rational weight;
  };
  std::vector<Piece> pieces;
  std::vector<int> split(static_cast<std::size_t>(base.size()), 0);
  int target_offset = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Rational group_mass = 0;
    for (int w : groups[g]) group_mass += base.weight(w);
    if (sum(masses[g]) != group_mass)
      throw PreconditionError("group " + std::to_string(g) + " has mass " + to_string(group_mass) +
                              " but its targets sum to " + to_string(sum(masses[g])));
    std::size_t t = 0;
    Rational target_left = masses[g].empty() ? Rational(0) : masses[g][0];
    for (int w : groups[g]) {
      Rational point_left = base.weight(w);
      while (point_left > 0) {
        while (target_left == 0) target_left = masses[g].at(++t);
        Rational piece = std::min(point_left, target_left);
        pieces.push_back({w, split[static_cast<std::size_t>(w)]++, target_offset + static_cast<int>(t), piece});
        point_left -= piece;
        target_left -= piece;
      }
    }
    target_offset += static_cast<int>(masses[g].size());
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return std::tie(a.point, a.order) < std::tie(b.point, b.order); });
  RefinedBase out;
  std::vector<std::string> labels;
  std::vector<Rational> weights;
  for (const auto& p : pieces) {
    std::string label = base.label(p.point);
    if (split[static_cast<std::size_t>(p.point)] > 1) label += "." + std::to_string(p.order);
    labels.push_back(std::move(label));
    weights.push_back(p.weight);
    out.projection.push_back(p.point);
    out.target.push_back(p.target);
  }
  out.base = FinProbSpace(std::move(labels), std::move(weights));
  return out;
}

Realization realize(const Randomization& r, const RMeasure& nu) {
  const auto& m = single_structure(r);
  if (!(nu.space().structure_ptr() == m || print_structure(nu.space().structure()) == print_structure(*m)))
    throw PreconditionError("the measure lives over " + nu.space().structure().name() + ", not " + m->name());
  std::vector<int> all(static_cast<std::size_t>(r.size()));
  for (int w = 0; w < r.size(); ++w) all[static_cast<std::size_t>(w)] = w;
  std::vector<int> types;
  std::vector<Rational> masses;
  for (int q = 0; q < nu.space().size(); ++q)
    if (nu.weight(q) > 0) {
      types.push_back(q);
      masses.push_back(nu.weight(q));
    }
  RefinedBase refined = refine(r.base(), {all}, {masses});
  Randomization rand = Randomization::constant(m, refined.base);
  std::vector<RandomElement> tuple(static_cast<std::size_t>(nu.space().arity()), RandomElement(refined.projection.size()));
  for (std::size_t p = 0; p < refined.projection.size(); ++p) {
    const Tuple& rep = nu.space().representative(types[static_cast<std::size_t>(refined.target[p])]);
    for (std::size_t i = 0; i < tuple.size(); ++i) tuple[i][p] = rep[i];
  }
  return {std::move(rand), std::move(tuple), std::move(refined)};
}

Rational d_metric(const RMeasure& a, const RMeasure& b) {
  if (!(a.space_ptr() == b.space_ptr() || a.space() == b.space()))
    throw PreconditionError("the measures live on different type spaces");
  if (a.param_count() || b.param_count() || !a.space().params().empty())
    throw PreconditionError("the distance between types over parameters is not implemented");
  Rational total = 0;
  for (int q = 0; q < a.space().size(); ++q) total += abs(a.weight(q) - b.weight(q));
  return total / 2;
}

std::vector<ParamCell> param_cells(const Randomization& r, const std::vector<RandomElement>& params) {
  const auto& m = single_structure(r);
  for (const auto& f : params) r.check_element(f);
  std::map<Tuple, Event> cells;
  for (int w = 0; w < r.size(); ++w) {
    Tuple value;
    for (const auto& f : params) value.push_back(f[static_cast<std::size_t>(w)]);
    auto [it, fresh] = cells.try_emplace(value, r.empty_event());
    it->second.set(static_cast<std::size_t>(w));
  }
  std::vector<ParamCell> out;
  for (auto& [value, e] : cells) out.push_back({value, e, type_space(m, 1, value)});
  return out;
}

ConditionalRealization realize_conditional(const Randomization& r, const CondRealizationSpec& spec) {
  const auto& m = single_structure(r);
  auto cells = param_cells(r, spec.params);
  if (spec.beta.size() != cells.size())
    throw PreconditionError(std::to_string(spec.beta.size()) + " cells given, the parameters have " +
                            std::to_string(cells.size()));
  std::vector<std::vector<int>> groups;
  std::vector<std::vector<Rational>> masses;
  std::vector<Element> reps;  // a_q, indexed like the flattened targets
  for (std::size_t n = 0; n < cells.size(); ++n) {
    const auto& cell = cells[n];
    std::vector<int> points;
    for (auto w = cell.event.find_first(); w != Event::npos; w = cell.event.find_next(w)) points.push_back(static_cast<int>(w));
    std::vector<Rational> ms;
    for (const auto& [q, beta] : spec.beta[n]) {
      if (q < 0 || q >= cell.space->size())
        throw PreconditionError("cell " + std::to_string(n) + " has no type q" + std::to_string(q));
      if (beta < 0) throw PreconditionError("negative mass in cell " + std::to_string(n));
      if (beta == 0) continue;
      ms.push_back(beta);
      reps.push_back(cell.space->representative(q)[0]);
    }
    Rational cell_mass = 0;
    for (int w : points) cell_mass += r.base().weight(w);
    if (sum(ms) != cell_mass)
      throw PreconditionError("cell " + std::to_string(n) + " has mass " + to_string(cell_mass) + " but its masses sum to " +
                              to_string(sum(ms)));
    groups.push_back(std::move(points));
    masses.push_back(std::move(ms));
  }
  RefinedBase refined = refine(r.base(), groups, masses);
  Randomization rand = Randomization::constant(m, refined.base);
  RandomElement f(refined.projection.size());
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = reps[static_cast<std::size_t>(refined.target[p])];
  std::vector<RandomElement> params;
  for (const auto& g : spec.params) params.push_back(refined.lift(g));
  auto lifted_cells = param_cells(rand, params);
  return {std::move(rand), std::move(f), std::move(params), std::move(lifted_cells), std::move(refined)};
}

namespace {

void compositions(int total, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int a = 0; a <= total; ++a) {
    cur.push_back(a);
    compositions(total - a, parts - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<RMeasure> measure_battery(const TypeSpacePtr& space, int max_den) {
  std::set<std::vector<Rational>> seen;
  std::vector<RMeasure> out;
  for (int d = 1; d <= max_den; ++d) {
    std::vector<std::vector<int>> comps;
    std::vector<int> cur;
    compositions(d, space->size(), cur, comps);
    for (const auto& c : comps) {
      std::vector<Rational> w;
      for (int a : c) w.emplace_back(a, d);
      if (seen.insert(w).second) out.emplace_back(space, w);
    }
  }
  return out;
}

CategoricityReport check_omega_categoricity(const StructurePtr& m, int n_max) {
  CategoricityReport report;
  const FinProbSpace bases[] = {FinProbSpace::uniform(1), FinProbSpace({"a", "b", "c"}, {Rational(1, 2), Rational(1, 3), Rational(1, 6)})};
  for (int n = 1; n <= n_max; ++n) {
    auto space = type_space(m, n);
    report.type_counts.push_back(space->size());
    int checked = 0, ok = 0;
    if (space->size() <= 4) {
      for (const auto& nu : measure_battery(space, 4))
        for (const auto& base : bases) {
          ++checked;
          auto real = realize(Randomization::constant(m, base), nu);
          if (rtype_of(real.rand, real.tuple) == nu) ++ok;
        }
    }
    report.measures_checked += checked;
    report.realized += ok;
    report.lines.push_back("S_" + std::to_string(n) + ": " + std::to_string(space->size()) + " types, " +
                           (space->size() <= 4 ? std::to_string(ok) + "/" + std::to_string(checked) + " battery measures realized"
                                               : std::string("battery skipped (more than 4 types)")));
  }
  return report;
}

}  // namespace randlab
