// Command line front end: loads a workspace, runs one operation, prints exact
// rationals. Exit codes: 0 ok, 1 check failure, 2 unresolved name, 3 parse
// error, 4 budget exceeded.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "randlab/axioms.hpp"
#include "randlab/cformula.hpp"
#include "randlab/corpus.hpp"
#include "randlab/error.hpp"
#include "randlab/linear_feasibility.hpp"
#include "randlab/stability.hpp"
#include "randlab/workspace.hpp"

using namespace randlab;

namespace {

struct Session {
  Workspace ws;
  double budget = kDefaultBudget;
  int decimal = -1;

  std::string show(const Rational& r) const {
    if (decimal < 0) return to_string(r);
    BigInt scale = 1;
    for (int i = 0; i < decimal; ++i) scale *= 10;
    Rational scaled = abs(r) * Rational(scale) + Rational(1, 2);
    BigInt digits = numerator(scaled) / denominator(scaled);
    std::string s = digits.str();
    if (decimal > 0) {
      if (s.size() <= static_cast<std::size_t>(decimal)) s.insert(0, static_cast<std::size_t>(decimal) + 1 - s.size(), '0');
      s.insert(s.size() - static_cast<std::size_t>(decimal), ".");
    }
    return to_string(r) + " (" + (r < 0 ? "-" : "") + s + ")";
  }
};

std::vector<std::string> split(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw ResolutionError("missing " + flag);
}

std::vector<RandomElement> elements(const Session& s, const std::string& names) {
  std::vector<RandomElement> out;
  for (const auto& n : split(names)) out.push_back(s.ws.element(n));
  return out;
}

Tuple tuple_of(const std::string& text) {
  std::string t = text;
  if (!t.empty() && t.front() == '[') t = t.substr(1, t.size() > 1 ? t.size() - 2 : 0);
  Tuple out;
  for (const auto& item : split(t)) {
    if (item.find_first_not_of("0123456789") != std::string::npos) throw ParseError("expected an element, found '" + item + "'", 0);
    out.push_back(std::stoi(item));
  }
  return out;
}

std::vector<std::string> var_group(const std::string& text, const std::string& fallback) {
  auto v = split(text);
  return v.empty() && !fallback.empty() ? std::vector<std::string>{fallback} : v;
}

int finish(bool ok) { return ok ? 0 : 1; }

// ---- eval

struct EvalArgs {
  std::string rand, cformula, bind;
};

int cmd_eval(Session& s, const EvalArgs& a) {
  require(a.rand, "--rand");
  require(a.cformula, "--cformula");
  const auto& r = s.ws.rand(a.rand);
  auto phi = parse_cformula(a.cformula, r.signature());
  CAssignment val;
  for (const auto& item : split(a.bind)) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("expected var=name in --bind, found '" + item + "'", 0);
    auto var = item.substr(0, eq), name = item.substr(eq + 1);
    if (is_event_variable(var))
      val.events[var] = s.ws.event(name, r.size());
    else
      val.elements[var] = s.ws.element(name);
  }
  std::cout << s.show(eval_cformula(r, phi, val, s.budget)) << "\n";
  return 0;
}

// ---- check

struct CheckArgs {
  std::string what, rand, structure, tuple, c, b, params, phi;
  int n = 2;
  int samples = 48;
  int depth = -1;
};

int check_axioms_cmd(Session& s, const CheckArgs& a) {
  require(a.rand, "--rand");
  AxiomOptions opt;
  opt.samples = static_cast<std::size_t>(a.samples);
  auto report = check_axioms(s.ws.rand(a.rand), opt);
  for (const auto& f : report.findings) std::cout << (f.pass ? "PASS " : "FAIL ") << f.axiom << " " << f.detail << "\n";
  std::cout << "atomless-defect " << s.show(report.atomless_defect) << "\n";
  return finish(report.all_pass());
}

int check_types_cmd(Session& s, const CheckArgs& a) {
  require(a.rand, "--rand");
  require(a.tuple, "--tuple");
  const auto& r = s.ws.rand(a.rand);
  auto tuple = elements(s, a.tuple);
  auto nu = rtype_of(r, tuple);
  auto vars = default_vars(static_cast<int>(tuple.size()));
  bool ok = true;
  int checked = 0;
  for (const auto& phi : formula_corpus(r.signature())) {
    bool covered = true;
    for (const auto& v : phi.free_vars()) covered = covered && std::find(vars.begin(), vars.end(), v) != vars.end();
    if (!covered) continue;
    auto lhs = formula_mass(nu, phi, vars);
    auto rhs = mu(r, event_of(r, phi, vars, tuple));
    ok = ok && lhs == rhs;
    ++checked;
    std::cout << (lhs == rhs ? "PASS" : "FAIL") << " c-types " << to_string(phi) << " " << s.show(lhs) << " " << s.show(rhs) << "\n";
  }
  std::cout << (ok ? "PASS" : "FAIL") << " c-types-total " << checked << " formulas\n";
  return finish(ok);
}

int check_categoricity_cmd(Session& s, const CheckArgs& a) {
  require(a.structure, "--structure");
  auto report = check_omega_categoricity(s.ws.structure(a.structure), a.n);
  for (const auto& line : report.lines) std::cout << "PASS categoricity " << line << "\n";
  bool ok = report.realized == report.measures_checked;
  std::cout << (ok ? "PASS" : "FAIL") << " round-trips " << report.realized << "/" << report.measures_checked << "\n";
  return finish(ok);
}

int check_stability_cmd(Session& s, const CheckArgs& a) {
  require(a.structure, "--structure");
  auto m = s.ws.structure(a.structure);
  std::vector<Formula> corpus;
  if (!a.phi.empty())
    corpus.push_back(parse_formula(a.phi, m->signature()));
  else
    corpus = phi_corpus(m->signature(), 24);
  bool ok = true;
  for (const auto& phi : corpus) {
    auto fv = phi.free_vars();
    std::vector<std::string> w;
    if (std::find(fv.begin(), fv.end(), "w") != fv.end()) w.push_back("w");
    PhiContext base{m, phi, {"x"}, {"y"}, w, {}};
    int instances = 0;
    bool routes = true, ranks = true;
    for (const auto& params : all_tuples(m->size(), static_cast<int>(w.size()))) {
      auto ctx = base.with_params(params);
      auto rm = cb_rank_mult(ctx, parse_formula("x = x", m->signature()));
      ranks = ranks && rm.rank && *rm.rank == 0;
      auto space = type_space(m, 1, params);
      for (int p = 0; p < space->size(); ++p)
        for (Element b = 0; b < m->size(); ++b) {
          try {
            rho(ctx, p, Tuple{b});
          } catch (const std::logic_error&) {
            routes = false;
          }
          ++instances;
        }
    }
    PhiContext plain{m, phi, {"x"}, {"y"}, w, Tuple(w.size(), 0)};
    int ladder = ladder_length(plain, m->size() + 1);
    std::cout << (routes ? "PASS" : "FAIL") << " rho-routes " << to_string(phi) << " " << instances << " instances\n";
    std::cout << (ranks ? "PASS" : "FAIL") << " cb-rank-zero " << to_string(phi) << "\n";
    std::cout << "PASS ladder " << to_string(phi) << " " << ladder << "\n";
    ok = ok && routes && ranks;
  }
  return finish(ok);
}

int check_independence_cmd(Session& s, const CheckArgs& a) {
  require(a.rand, "--rand");
  require(a.c, "--c");
  require(a.b, "--b");
  IndependenceOptions opt;
  opt.depth = a.depth;
  auto v = check_independence(s.ws.rand(a.rand), elements(s, a.c), elements(s, a.b), elements(s, a.params), opt);
  if (v.independent) {
    std::cout << "PASS independence " << v.formulas_checked << " formulas\n";
    return 0;
  }
  std::cout << "FAIL independence witness " << to_string(*v.witness) << " P " << s.show(v.lhs) << " rho_hat " << s.show(v.rhs)
            << "\n";
  return 1;
}

int cmd_check(Session& s, const CheckArgs& a) {
  if (a.what == "axioms") return check_axioms_cmd(s, a);
  if (a.what == "types") return check_types_cmd(s, a);
  if (a.what == "categoricity") return check_categoricity_cmd(s, a);
  if (a.what == "stability") return check_stability_cmd(s, a);
  if (a.what == "independence") return check_independence_cmd(s, a);
  throw ParseError("unknown check '" + a.what + "'", 0);
}

// ---- rho

struct RhoArgs {
  std::string structure, phi, x, y, w, params, p, b;
  std::string rand, c, A, ybar, pm, qm;
  bool hat = false, extend = false, certify = false;
};

int cmd_rho(Session& s, const RhoArgs& a) {
  require(a.phi, "--phi");
  auto x = var_group(a.x, "x"), y = var_group(a.y, "y");
  if (a.hat || a.extend) {
    std::optional<RMeasure> p, q;
    StructurePtr m;
    std::vector<std::string> w = split(a.w);
    if (!a.pm.empty()) {
      p = s.ws.measure(a.pm).measure;
      require(a.qm, "--qm");
      q = s.ws.measure(a.qm).measure;
      m = p->space().structure_ptr();
    } else {
      require(a.rand, "--rand");
      require(a.c, "--c");
      const auto& r = s.ws.rand(a.rand);
      auto params = elements(s, a.A);
      p = rtype_of(r, elements(s, a.c), params);
      auto second = a.extend ? a.ybar : a.b;
      require(second, a.extend ? "--ybar" : "--b");
      q = rtype_of(r, elements(s, second), params);
      m = p->space().structure_ptr();
      if (w.empty())
        for (std::size_t i = 0; i < params.size(); ++i) w.push_back(params.size() == 1 ? "w" : "w" + std::to_string(i));
    }
    PhiContext ctx{m, parse_formula(a.phi, m->signature()), x, y, w, {}};
    if (!a.extend) {
      std::cout << s.show(rho_hat(ctx, *p, *q)) << "\n";
      return 0;
    }
    auto ext = nonforking_extension(ctx, *p, *q);
    std::cout << print_rmeasure(ext) << "\n";
    if (!a.certify) return 0;
    auto sys = stationarity_system(ctx, *p, *q);
    auto cert = extend_measure_eq(sys.problem);
    std::cout << print_certificate(cert);
    auto rep = certify_extension(ctx, *p, *q, ext);
    std::cout << (rep.marginals_ok ? "PASS" : "FAIL") << " marginals\n";
    std::cout << (rep.rho_hat_ok ? "PASS" : "FAIL") << " rho-hat-values";
    for (std::size_t i = 0; i < rep.rho_hats.size(); ++i) std::cout << " " << s.show(rep.rho_hats[i]);
    std::cout << "\n" << (rep.certificate_ok ? "PASS" : "FAIL") << " certificate\n";
    std::cout << (rep.positivity_ok ? "PASS" : "FAIL") << " positivity " << rep.positivity_trials << " trials\n";
    return finish(rep.all_ok());
  }
  require(a.structure, "--structure");
  auto m = s.ws.structure(a.structure);
  PhiContext ctx{m, parse_formula(a.phi, m->signature()), x, y, split(a.w), tuple_of(a.params)};
  ctx.validate();
  auto space = type_space(m, static_cast<int>(x.size()), ctx.params);
  require(a.p, "--p");
  int p = -1;
  if (a.p.size() > 1 && a.p[0] == 'q' && a.p.find_first_not_of("0123456789", 1) == std::string::npos)
    p = std::stoi(a.p.substr(1));
  else
    p = space->type_of(tuple_of(a.p));
  if (p < 0 || p >= space->size()) throw ResolutionError("no type " + a.p);
  require(a.b, "--b");
  Tuple b;
  if (a.b.size() > 1 && a.b[0] == 'q') {
    auto bs = type_space(m, static_cast<int>(y.size()), ctx.params);
    int k = std::stoi(a.b.substr(1));
    if (k < 0 || k >= bs->size()) throw ResolutionError("no type " + a.b);
    b = bs->representative(k);
  } else {
    b = tuple_of(a.b);
  }
  std::cout << s.show(rho(ctx, p, b)) << "\n";
  return 0;
}

// ---- realize, dmetric, types

int cmd_realize(Session& s, const std::string& rand, const std::string& measure, const std::string& as) {
  require(rand, "--rand");
  require(measure, "--measure");
  const auto& r = s.ws.rand(rand);
  const auto& nu = s.ws.measure(measure).measure;
  auto real = realize(r, nu);
  std::cout << "space " << print_space(real.rand.base()) << "\n";
  for (std::size_t i = 0; i < real.tuple.size(); ++i) std::cout << "f" << i << " = " << print_element(real.tuple[i]) << "\n";
  std::vector<RandomElement> tuple(real.tuple.begin(), real.tuple.begin() + nu.arity());
  std::vector<RandomElement> params(real.tuple.begin() + nu.arity(), real.tuple.end());
  bool ok = rtype_of(real.rand, tuple, params) == nu;
  std::cout << (ok ? "PASS" : "FAIL") << " round-trip\n";
  if (!as.empty()) {
    const auto& entry = s.ws.rand_entry(rand);
    s.ws.add_space(as + "_base", real.rand.base());
    std::vector<std::string> family;
    for (int w : real.refinement.projection)
      family.push_back(entry.family.size() == 1 ? entry.family.front() : entry.family.at(static_cast<std::size_t>(w)));
    if (std::all_of(family.begin(), family.end(), [&](const auto& f) { return f == family.front(); })) family.resize(1);
    s.ws.add_rand(as, as + "_base", family);
    for (std::size_t i = 0; i < real.tuple.size(); ++i) s.ws.add_element(as + "_f" + std::to_string(i), real.tuple[i]);
  }
  return finish(ok);
}

int cmd_dmetric(Session& s, const std::vector<std::string>& measures) {
  if (measures.size() != 2) throw ResolutionError("dmetric needs two --measure names");
  std::cout << s.show(d_metric(s.ws.measure(measures[0]).measure, s.ws.measure(measures[1]).measure)) << "\n";
  return 0;
}

int cmd_types(Session& s, const std::string& structure, int n, const std::string& params) {
  require(structure, "--structure");
  auto m = s.ws.structure(structure);
  auto space = type_space(m, n, tuple_of(params));
  auto vars = default_vars(n);
  for (int q = 0; q < space->size(); ++q) {
    const auto& rep = space->representative(q);
    std::string t;
    for (std::size_t i = 0; i < rep.size(); ++i) t += (i ? "," : "") + std::to_string(rep[i]);
    std::cout << "q" << q << " (" << t << ") " << space->orbit(q).size() << " " << to_string(isolating_formula(*space, q, vars))
              << "\n";
  }
  return 0;
}

// ---- fiber

struct FiberArgs {
  std::string mu, nu, pi_x, pi_y, a, b;
};

int cmd_fiber(Session& s, const FiberArgs& f) {
  require(f.mu, "--mu");
  require(f.nu, "--nu");
  require(f.pi_x, "--pi-x");
  require(f.pi_y, "--pi-y");
  const auto& mu = s.ws.space(f.mu);
  const auto& nu = s.ws.space(f.nu);
  auto fib = make_fiber_space(s.ws.map(f.pi_x), s.ws.map(f.pi_y));
  auto product = fiber_product(mu, nu, fib);
  for (int k = 0; k < fib.size(); ++k) {
    auto [x, y] = fib.points[static_cast<std::size_t>(k)];
    std::cout << "(" << mu.label(x) << ", " << nu.label(y) << ") " << s.show(product.weight(k)) << "\n";
  }
  bool ok = fiber_marginal(product, fib, 0, mu.size()) == mu.weights() && fiber_marginal(product, fib, 1, nu.size()) == nu.weights();
  std::cout << (ok ? "PASS" : "FAIL") << " marginals\n";
  if (!f.a.empty() || !f.b.empty()) {
    auto indices = [](const std::string& text, const FinProbSpace& sp) {
      std::vector<int> out;
      for (const auto& l : split(text)) {
        auto i = sp.index_of(l);
        if (!i) throw ResolutionError("no point " + l);
        out.push_back(*i);
      }
      return out;
    };
    auto ra = indices(f.a, mu), rb = indices(f.b, nu);
    Rational v0 = rectangle_mass(mu, nu, fib, ra, rb, 0);
    for (int k = 1; k < 3; ++k) ok = ok && rectangle_mass(mu, nu, fib, ra, rb, k) == v0;
    std::cout << (ok ? "PASS" : "FAIL") << " rectangle " << s.show(v0) << "\n";
  }
  return finish(ok);
}

// ---- extend

int cmd_extend(Session& s, const std::string& file, const std::string& psi) {
  require(file, "--problem");
  std::ifstream in(file);
  if (!in) throw ResolutionError("cannot read " + file);
  std::stringstream text;
  text << in.rdbuf();
  auto prob = parse_problem(text.str());
  bool eq = !prob.constraints.empty() && prob.constraints.front().rel == Relation::kEqual;
  for (const auto& c : prob.constraints)
    if ((c.rel == Relation::kEqual) != eq) throw PreconditionError("mixed <= and = constraints");
  if (!psi.empty()) {
    if (eq) throw PreconditionError("--debug-lambda-tilde needs a <= problem");
    RationalFn f;
    for (const auto& v : split(psi)) f.push_back(parse_rational(v));
    if (static_cast<int>(f.size()) != prob.ground_size) throw ArityError("psi has " + std::to_string(f.size()) + " values");
    auto lt = lambda_tilde(prob, f);
    std::cout << "lambda_tilde " << (lt ? s.show(*lt) : std::string("none")) << "\n";
  }
  auto cert = eq ? extend_measure_eq(prob) : extend_measure_ineq(prob);
  std::cout << print_certificate(cert);
  bool ok = verify_certificate(cert);
  std::cout << (ok ? "PASS" : "FAIL") << " certificate\n";
  return finish(ok);
}

// ---- convex

int cmd_convex(Session& s, const std::vector<std::string>& parts, const std::string& as, bool check) {
  if (parts.empty()) throw ResolutionError("missing --part");
  std::vector<ConvexPart> cp;
  std::vector<std::string> family;
  for (const auto& part : parts) {
    auto colon = part.find(':');
    if (colon == std::string::npos) throw ParseError("expected weight:rand, found '" + part + "'", 0);
    const auto& entry = s.ws.rand_entry(part.substr(colon + 1));
    cp.push_back({parse_rational(part.substr(0, colon)), entry.rand});
    for (int w = 0; w < entry.rand.size(); ++w)
      family.push_back(entry.family.size() == 1 ? entry.family.front() : entry.family.at(static_cast<std::size_t>(w)));
  }
  ConvexCombination combo(cp);
  std::cout << "space " << print_space(combo.rand().base()) << "\n";
  std::cout << "family [";
  for (std::size_t i = 0; i < family.size(); ++i) std::cout << (i ? ", " : "") << family[i];
  std::cout << "]\n";
  bool ok = true;
  if (check) {
    auto report = check_axioms(combo.rand());
    for (const auto& f : report.findings) std::cout << (f.pass ? "PASS " : "FAIL ") << f.axiom << " " << f.detail << "\n";
    ok = report.exact_pass();
  }
  if (!as.empty()) {
    s.ws.add_space(as + "_base", combo.rand().base());
    if (std::all_of(family.begin(), family.end(), [&](const auto& f) { return f == family.front(); })) family.resize(1);
    s.ws.add_rand(as, as + "_base", family);
  }
  return finish(ok);
}

// ---- approx-simple

int cmd_approx(Session& s, const std::string& rand, const std::string& f, const std::string& algebra, const std::string& eps) {
  require(rand, "--rand");
  require(f, "--f");
  require(eps, "--eps");
  const auto& r = s.ws.rand(rand);
  auto kind = algebra.substr(0, algebra.find(':'));
  auto arg = algebra.find(':') == std::string::npos ? std::string() : algebra.substr(algebra.find(':') + 1);
  std::optional<EventAlgebra> alg;
  if (kind == "dyadic") {
    int total = 0;
    while ((1 << total) < r.size()) ++total;
    if ((1 << total) != r.size()) throw PreconditionError("dyadic algebras need 2^k points");
    alg = EventAlgebra::dyadic(total, static_cast<int>(tuple_of(arg).at(0)));
  } else if (kind == "discrete") {
    alg = EventAlgebra::discrete(r.size());
  } else if (kind == "trivial" || kind.empty()) {
    alg = EventAlgebra::trivial(r.size());
  } else if (kind == "events") {
    std::vector<Event> gens;
    for (const auto& e : split(arg)) gens.push_back(s.ws.event(e, r.size()));
    alg = EventAlgebra::generated_by(r.size(), gens);
  } else {
    throw ParseError("unknown algebra '" + algebra + "'", 0);
  }
  auto out = approximate_by_simple(r, s.ws.element(f), *alg, parse_rational(eps));
  for (const auto& step : out.steps) std::cout << (step.pass ? "PASS " : "FAIL ") << step.name << " " << step.detail << "\n";
  std::cout << "g = " << print_element(out.g) << "\n";
  std::cout << "n " << out.n << "\n";
  std::cout << "dK " << s.show(out.distance) << "\n";
  // Without the density precondition there is nothing to check.
  return finish(!out.density_ok || out.within_eps);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randlab: randomizations of finite structures"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string workspace_file, save_file;
  double budget = kDefaultBudget;
  int decimal = -1;
  app.add_option("--workspace", workspace_file, "workspace file");
  app.add_option("--budget", budget, "quantifier enumeration budget");
  app.add_option("--decimal", decimal, "also print k decimal digits");
  app.add_option("--save", save_file, "write the workspace here afterwards");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "evaluate a continuous formula");
  eval->add_option("--rand", ev.rand);
  eval->add_option("--cformula", ev.cformula);
  eval->add_option("--bind", ev.bind, "x=f,E=ev");

  CheckArgs ck;
  auto* check = app.add_subcommand("check", "axioms | types | categoricity | stability | independence");
  check->add_option("what", ck.what)->required();
  check->add_option("--rand", ck.rand);
  check->add_option("--structure", ck.structure);
  check->add_option("--tuple", ck.tuple);
  check->add_option("--c", ck.c);
  check->add_option("--b", ck.b);
  check->add_option("--A", ck.params);
  check->add_option("--phi", ck.phi);
  check->add_option("--n", ck.n);
  check->add_option("--samples", ck.samples);
  check->add_option("--depth", ck.depth);

  RhoArgs rh;
  auto* rho_cmd = app.add_subcommand("rho", "rho, rho_hat and nonforking extensions");
  rho_cmd->add_option("--structure", rh.structure);
  rho_cmd->add_option("--phi", rh.phi);
  rho_cmd->add_option("--x", rh.x);
  rho_cmd->add_option("--y", rh.y);
  rho_cmd->add_option("--w", rh.w);
  rho_cmd->add_option("--params", rh.params);
  rho_cmd->add_option("--p", rh.p, "q<k> or a realizing tuple");
  rho_cmd->add_option("--b", rh.b);
  rho_cmd->add_option("--rand", rh.rand);
  rho_cmd->add_option("--c", rh.c);
  rho_cmd->add_option("--A", rh.A);
  rho_cmd->add_option("--ybar", rh.ybar);
  rho_cmd->add_option("--pm", rh.pm);
  rho_cmd->add_option("--qm", rh.qm);
  rho_cmd->add_flag("--rho-hat", rh.hat);
  rho_cmd->add_flag("--extend", rh.extend);
  rho_cmd->add_flag("--certify", rh.certify);

  std::string rz_rand, rz_measure, rz_as;
  auto* realize_cmd = app.add_subcommand("realize", "realize a measure as a random tuple");
  realize_cmd->add_option("--rand", rz_rand);
  realize_cmd->add_option("--measure", rz_measure);
  realize_cmd->add_option("--as", rz_as);

  std::vector<std::string> dm;
  auto* dmetric = app.add_subcommand("dmetric", "distance between two type measures");
  dmetric->add_option("--measure", dm);

  FiberArgs fb;
  auto* fiber = app.add_subcommand("fiber", "fiber product of two spaces over a common image");
  fiber->add_option("--mu", fb.mu);
  fiber->add_option("--nu", fb.nu);
  fiber->add_option("--pi-x", fb.pi_x);
  fiber->add_option("--pi-y", fb.pi_y);
  fiber->add_option("--rect-a", fb.a);
  fiber->add_option("--rect-b", fb.b);

  std::string ex_problem, ex_psi;
  auto* extend = app.add_subcommand("extend", "measure extension with certificates");
  extend->add_option("--problem", ex_problem);
  extend->add_option("--debug-lambda-tilde", ex_psi, "psi values");

  std::vector<std::string> cv_parts;
  std::string cv_as;
  bool cv_check = false;
  auto* convex = app.add_subcommand("convex", "convex combination of randomizations");
  convex->add_option("--part", cv_parts, "weight:rand");
  convex->add_option("--as", cv_as);
  convex->add_flag("--check", cv_check);

  std::string ap_rand, ap_f, ap_alg = "trivial", ap_eps;
  auto* approx = app.add_subcommand("approx-simple", "approximate an element over an event algebra");
  approx->add_option("--rand", ap_rand);
  approx->add_option("--f", ap_f);
  approx->add_option("--algebra", ap_alg, "dyadic:k | discrete | trivial | events:E,F");
  approx->add_option("--eps", ap_eps);

  std::string ty_structure, ty_params;
  int ty_n = 1;
  auto* types = app.add_subcommand("types", "list the types of n-tuples");
  types->add_option("--structure", ty_structure);
  types->add_option("--n", ty_n);
  types->add_option("--params", ty_params);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  Session s;
  s.budget = budget;
  s.decimal = decimal;
  try {
    if (!workspace_file.empty()) {
      std::ifstream in(workspace_file);
      if (!in) throw ResolutionError("cannot read workspace " + workspace_file);
      std::stringstream text;
      text << in.rdbuf();
      s.ws = load_workspace(text.str());
    }
    int code = 0;
    if (*eval) code = cmd_eval(s, ev);
    else if (*check) code = cmd_check(s, ck);
    else if (*rho_cmd) code = cmd_rho(s, rh);
    else if (*realize_cmd) code = cmd_realize(s, rz_rand, rz_measure, rz_as);
    else if (*dmetric) code = cmd_dmetric(s, dm);
    else if (*fiber) code = cmd_fiber(s, fb);
    else if (*extend) code = cmd_extend(s, ex_problem, ex_psi);
    else if (*convex) code = cmd_convex(s, cv_parts, cv_as, cv_check);
    else if (*approx) code = cmd_approx(s, ap_rand, ap_f, ap_alg, ap_eps);
    else if (*types) code = cmd_types(s, ty_structure, ty_n, ty_params);
    if (!save_file.empty()) {
      std::ofstream out(save_file);
      out << s.ws.save();
    }
    return code;
  } catch (const ResolutionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.position() << ": " << e.what() << "\n";
    return 3;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
