#include "randlab/linear_feasibility.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "lexer.hpp"
#include "randlab/error.hpp"

namespace randlab {

namespace {

// Dense tableau over rows of a, columns: originals, then one artificial per row.
class Tableau {
 public:
  explicit Tableau(const LinearProgram& lp) : m_(lp.b.size()), n_(lp.c.size()) {
    sign_.assign(m_, 1);
    rows_.assign(m_, std::vector<Rational>(n_ + m_ + 1));
    for (std::size_t i = 0; i < m_; ++i) {
      if (lp.a[i].size() != n_) throw PreconditionError("constraint row has the wrong width");
      if (lp.b[i] < 0) sign_[i] = -1;
      for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = lp.a[i][j] * sign_[i];
      rows_[i][n_ + i] = 1;
      rows_[i][n_ + m_] = lp.b[i] * sign_[i];
    }
    basis_.resize(m_);
    std::iota(basis_.begin(), basis_.end(), n_);
  }

  // Runs Bland's-rule simplex maximizing `cost` over the allowed columns.
  // Returns false when unbounded.
  bool optimize(const std::vector<Rational>& cost, std::size_t allowed) {
    cost_ = cost;
    while (true) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (is_basic(j)) continue;
        if (reduced_cost(j) > 0) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return true;
      std::size_t leave = m_;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (rows_[i][enter] <= 0) continue;
        Rational ratio = rows_[i][n_ + m_] / rows_[i][enter];
        if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

  Rational reduced_cost(std::size_t j) const {
    Rational d = cost_[j];
    for (std::size_t i = 0; i < m_; ++i)
      if (cost_[basis_[i]] != 0) d -= cost_[basis_[i]] * rows_[i][j];
    return d;
  }

  Rational value() const {
    Rational v = 0;
    for (std::size_t i = 0; i < m_; ++i) v += cost_[basis_[i]] * rows_[i][n_ + m_];
    return v;
  }

  // Pivots basic artificials out wherever an original column allows it.
  void expel_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!is_basic(j) && rows_[i][j] != 0) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  std::vector<Rational> solution() const {
    std::vector<Rational> x(n_);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = rows_[i][n_ + m_];
    return x;
  }

  // Duals of the phase-one problem (cost -1 on artificials), turned into a
  // Farkas vector for the original rows.
  std::vector<Rational> farkas() const {
    std::vector<Rational> y(m_);
    for (std::size_t i = 0; i < m_; ++i) y[i] = (1 + reduced_cost(n_ + i)) * sign_[i];
    return y;
  }

  std::size_t width() const { return n_ + m_; }

 private:
  bool is_basic(std::size_t j) const {
    for (std::size_t b : basis_)
      if (b == j) return true;
    return false;
  }

  void pivot(std::size_t r, std::size_t c) {
    Rational p = rows_[r][c];
    for (auto& v : rows_[r]) v /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || rows_[i][c] == 0) continue;
      Rational f = rows_[i][c];
      for (std::size_t j = 0; j <= n_ + m_; ++j)
        if (rows_[r][j] != 0) rows_[i][j] -= f * rows_[r][j];
    }
    basis_[r] = c;
  }

  std::size_t m_, n_;
  std::vector<int> sign_;
  std::vector<std::vector<Rational>> rows_;
  std::vector<std::size_t> basis_;
  std::vector<Rational> cost_;
};

}  // namespace

SimplexResult solve_lp(const LinearProgram& lp) {
  if (lp.a.size() != lp.b.size()) throw PreconditionError("row count mismatch");
  const std::size_t n = lp.c.size(), m = lp.b.size();
  Tableau t(lp);
  std::vector<Rational> phase1(n + m);
  for (std::size_t i = 0; i < m; ++i) phase1[n + i] = -1;
  t.optimize(phase1, n + m);
  SimplexResult result{SimplexResult::Status::kOptimal, {}, 0, {}};
  if (t.value() < 0) {
    result.status = SimplexResult::Status::kInfeasible;
    result.farkas = t.farkas();
    return result;
  }
  t.expel_artificials();
  std::vector<Rational> phase2 = lp.c;
  phase2.resize(n + m);
  if (!t.optimize(phase2, n)) {
    result.status = SimplexResult::Status::kUnbounded;
    return result;
  }
  result.x = t.solution();
  result.value = t.value();
  return result;
}

namespace {

void check_shape(const LinFeasProblem& prob) {
  if (prob.ground_size < 1) throw PreconditionError("empty ground set");
  for (const auto& c : prob.constraints)
    if (static_cast<int>(c.phi.size()) != prob.ground_size)
      throw PreconditionError("constraint function does not match the ground set");
}

// Integer vector parallel to v (positive scaling), with gcd 1.
std::vector<BigInt> integral(const std::vector<Rational>& v) {
  BigInt lcm = common_denominator(v);
  std::vector<BigInt> out;
  BigInt g = 0;
  for (const auto& r : v) {
    BigInt z = numerator_of(r) * (lcm / denominator_of(r));
    out.push_back(z);
    g = gcd(g, z);
  }
  if (g > 1)
    for (auto& z : out) z /= g;
  return out;
}

// Weighted pointwise minimum of sum m_i phi_i.
Rational combination_min(const LinFeasProblem& prob, const std::vector<BigInt>& m) {
  Rational lo;
  for (int x = 0; x < prob.ground_size; ++x) {
    Rational s = 0;
    for (std::size_t i = 0; i < m.size(); ++i) s += Rational(m[i]) * prob.constraints[i].phi[static_cast<std::size_t>(x)];
    if (x == 0 || s < lo) lo = s;
  }
  return lo;
}

}  // namespace

Certificate extend_measure_ineq(const LinFeasProblem& prob) {
  check_shape(prob);
  for (const auto& c : prob.constraints)
    if (c.rel != Relation::kLessEq) throw PreconditionError("inequality problem holds an equality constraint");
  const std::size_t k = prob.constraints.size(), g = static_cast<std::size_t>(prob.ground_size);
  // Columns: mu_x, then one slack per constraint. Rows: constraints, then total mass.
  LinearProgram lp;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<Rational> row(g + k);
    for (std::size_t x = 0; x < g; ++x) row[x] = prob.constraints[i].phi[x];
    row[g + i] = 1;
    lp.a.push_back(row);
    lp.b.push_back(prob.constraints[i].bound);
  }
  std::vector<Rational> mass(g + k);
  for (std::size_t x = 0; x < g; ++x) mass[x] = 1;
  lp.a.push_back(mass);
  lp.b.push_back(1);
  lp.c.assign(g + k, 0);
  auto r = solve_lp(lp);
  Certificate cert;
  cert.problem = prob;
  if (r.status != SimplexResult::Status::kInfeasible) {
    cert.feasible = true;
    cert.measure.assign(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(g));
    return cert;
  }
  // y.a <= 0 and y.b > 0; the slack columns force y_i <= 0, so alpha = -y.
  std::vector<Rational> alpha;
  for (std::size_t i = 0; i < k; ++i) alpha.push_back(-r.farkas[i]);
  cert.multipliers = integral(alpha);
  cert.n = combination_min(prob, cert.multipliers);
  return cert;
}

Certificate extend_measure_eq(const LinFeasProblem& prob) {
  check_shape(prob);
  LinFeasProblem full = prob;
  std::optional<std::size_t> unit;
  for (std::size_t i = 0; i < full.constraints.size(); ++i) {
    const auto& c = full.constraints[i];
    if (c.rel != Relation::kEqual) throw PreconditionError("equality problem holds an inequality constraint");
    if (std::all_of(c.phi.begin(), c.phi.end(), [](const Rational& v) { return v == 1; })) {
      if (c.bound != 1) throw PreconditionError("the constant function 1 must be assigned 1, got " + to_string(c.bound));
      if (!unit) unit = i;
    }
  }
  if (!unit) {
    full.constraints.push_back({RationalFn(static_cast<std::size_t>(full.ground_size), 1), 1, Relation::kEqual});
    unit = full.constraints.size() - 1;
  }
  // Each equality becomes the pair phi <= l, -phi <= -l.
  LinFeasProblem doubled{full.ground_size, {}};
  for (const auto& c : full.constraints) {
    doubled.constraints.push_back({c.phi, c.bound, Relation::kLessEq});
    RationalFn neg;
    for (const auto& v : c.phi) neg.push_back(-v);
    doubled.constraints.push_back({neg, -c.bound, Relation::kLessEq});
  }
  Certificate inner = extend_measure_ineq(doubled);
  Certificate cert;
  cert.problem = full;
  if (inner.feasible) {
    cert.feasible = true;
    cert.measure = inner.measure;
    return cert;
  }
  // sum c_i phi_i >= n with sum c_i l_i < n; moving n onto the unit
  // constraint gives the homogeneous form.
  std::vector<Rational> c;
  for (std::size_t i = 0; i < full.constraints.size(); ++i)
    c.push_back(Rational(inner.multipliers[2 * i]) - Rational(inner.multipliers[2 * i + 1]));
  c[*unit] -= inner.n;
  cert.multipliers = integral(c);
  cert.n = 0;
  return cert;
}

bool verify_certificate(const Certificate& cert) {
  const auto& prob = cert.problem;
  const auto g = static_cast<std::size_t>(prob.ground_size);
  if (cert.feasible) {
    if (cert.measure.size() != g) return false;
    Rational total = 0;
    for (const auto& w : cert.measure) {
      if (w < 0) return false;
      total += w;
    }
    if (total != 1) return false;
    for (const auto& c : prob.constraints) {
      Rational v = 0;
      for (std::size_t x = 0; x < g; ++x) v += c.phi[x] * cert.measure[x];
      if (c.rel == Relation::kEqual ? v != c.bound : v > c.bound) return false;
    }
    return true;
  }
  if (cert.multipliers.size() != prob.constraints.size()) return false;
  bool equality = !prob.constraints.empty() && prob.constraints.front().rel == Relation::kEqual;
  if (!equality)
    for (const auto& m : cert.multipliers)
      if (m < 0) return false;
  Rational n = equality ? Rational(0) : cert.n;
  if (combination_min(prob, cert.multipliers) < n) return false;
  Rational lhs = 0;
  for (std::size_t i = 0; i < cert.multipliers.size(); ++i) lhs += Rational(cert.multipliers[i]) * prob.constraints[i].bound;
  return lhs < n;
}

std::optional<Rational> lambda_tilde(const LinFeasProblem& prob, const RationalFn& psi) {
  check_shape(prob);
  if (static_cast<int>(psi.size()) != prob.ground_size) throw PreconditionError("psi does not match the ground set");
  const std::size_t k = prob.constraints.size(), g = static_cast<std::size_t>(prob.ground_size);
  // Columns: alpha_i, t+, t-, one slack per point. Row x:
  //   -sum alpha_i phi_i(x) + t+ - t- + s_x = psi(x).
  LinearProgram lp;
  for (std::size_t x = 0; x < g; ++x) {
    std::vector<Rational> row(k + 2 + g);
    for (std::size_t i = 0; i < k; ++i) row[i] = -prob.constraints[i].phi[x];
    row[k] = 1;
    row[k + 1] = -1;
    row[k + 2 + x] = 1;
    lp.a.push_back(row);
    lp.b.push_back(psi[x]);
  }
  lp.c.assign(k + 2 + g, 0);
  for (std::size_t i = 0; i < k; ++i) lp.c[i] = -prob.constraints[i].bound;
  lp.c[k] = 1;
  lp.c[k + 1] = -1;
  auto r = solve_lp(lp);
  if (r.status != SimplexResult::Status::kOptimal) return std::nullopt;
  return r.value;
}

LinFeasProblem parse_problem(std::string_view text) {
  detail::TokenStream ts(text);
  LinFeasProblem prob;
  auto rational = [&] {
    bool neg = ts.accept("-");
    Rational r(BigInt(ts.expect_int()));
    if (ts.accept("/")) {
      std::size_t pos = ts.peek().pos;
      long long d = ts.expect_int();
      if (d == 0) throw ParseError("zero denominator", pos);
      r /= d;
    }
    return neg ? Rational(-r) : r;
  };
  while (!ts.at_end()) {
    Constraint c;
    if (ts.accept("=")) {
      c.rel = Relation::kEqual;
    } else if (ts.is("<=")) {
      ts.next();
      c.rel = Relation::kLessEq;
    } else {
      ts.fail("expected '<=' or '='");
    }
    c.bound = rational();
    ts.expect(":");
    std::size_t pos = ts.peek().pos;
    do {
      c.phi.push_back(rational());
    } while (ts.accept(","));
    if (prob.constraints.empty()) prob.ground_size = static_cast<int>(c.phi.size());
    if (static_cast<int>(c.phi.size()) != prob.ground_size)
      throw ParseError("constraint lists " + std::to_string(c.phi.size()) + " values for a ground set of " +
                           std::to_string(prob.ground_size),
                       pos);
    prob.constraints.push_back(std::move(c));
  }
  return prob;
}

std::string print_problem(const LinFeasProblem& prob) {
  std::ostringstream os;
  for (const auto& c : prob.constraints) {
    os << (c.rel == Relation::kEqual ? "= " : "<= ") << to_string(c.bound) << " :";
    for (std::size_t x = 0; x < c.phi.size(); ++x) os << (x ? "," : " ") << to_string(c.phi[x]);
    os << "\n";
  }
  return os.str();
}

std::string print_certificate(const Certificate& cert) {
  std::ostringstream os;
  if (cert.feasible) {
    os << "FEASIBLE\nmeasure";
    for (const auto& w : cert.measure) os << " " << to_string(w);
    os << "\n";
    return os.str();
  }
  bool equality = !cert.problem.constraints.empty() && cert.problem.constraints.front().rel == Relation::kEqual;
  os << "INFEASIBLE\nmultipliers";
  for (const auto& m : cert.multipliers) os << " " << m.str();
  os << "\n";
  Rational lhs = 0;
  for (std::size_t i = 0; i < cert.multipliers.size(); ++i)
    lhs += Rational(cert.multipliers[i]) * cert.problem.constraints[i].bound;
  Rational n = equality ? Rational(0) : cert.n;
  os << "combination >= " << to_string(n) << " pointwise; bounds combine to " << to_string(lhs) << "\n";
  return os.str();
}

}  // namespace randlab
