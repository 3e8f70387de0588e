#include "randlab/measure.hpp"

#include <algorithm>
#include <set>

#include "randlab/error.hpp"

namespace randlab {

FinProbSpace::FinProbSpace(std::vector<std::string> labels, std::vector<Rational> weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  if (labels_.size() != weights_.size()) throw PreconditionError("label and weight counts differ");
  if (labels_.empty()) throw PreconditionError("empty sample space");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw PreconditionError("duplicate sample point label");
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (weights_[i] <= 0) throw PreconditionError("point '" + labels_[i] + "' has non-positive weight");
  if (total() != 1) throw PreconditionError("weights sum to " + to_string(total()) + ", not 1");
}

FinProbSpace FinProbSpace::unchecked(std::vector<std::string> labels, std::vector<Rational> weights) {
  FinProbSpace s;
  s.labels_ = std::move(labels);
  s.weights_ = std::move(weights);
  return s;
}

FinProbSpace FinProbSpace::uniform(int n, const std::string& prefix) {
  if (n < 1) throw PreconditionError("uniform space needs at least one point");
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
  return FinProbSpace(std::move(labels), std::vector<Rational>(static_cast<std::size_t>(n), Rational(1, n)));
}

FinProbSpace FinProbSpace::dyadic(int depth, const std::string& prefix) {
  if (depth < 0 || depth > 20) throw PreconditionError("dyadic depth out of range");
  return uniform(1 << depth, prefix);
}

std::optional<int> FinProbSpace::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

Rational FinProbSpace::min_weight() const { return *std::min_element(weights_.begin(), weights_.end()); }

namespace {

void check_map(const FinProbSpace& mu, const MeasurableMap& pi) {
  if (static_cast<int>(pi.image.size()) != mu.size()) throw PreconditionError("map is not total on the space");
  for (int y : pi.image)
    if (y < 0 || y >= static_cast<int>(pi.codomain.size())) throw PreconditionError("map leaves its codomain");
}

std::vector<Rational> pushed(const FinProbSpace& mu, const MeasurableMap& pi) {
  check_map(mu, pi);
  std::vector<Rational> w(pi.codomain.size());
  for (int x = 0; x < mu.size(); ++x) w[static_cast<std::size_t>(pi(x))] += mu.weight(x);
  return w;
}

}  // namespace

FinProbSpace image_measure(const FinProbSpace& mu, const MeasurableMap& pi) {
  auto w = pushed(mu, pi);
  std::vector<std::string> labels;
  std::vector<Rational> weights;
  for (std::size_t y = 0; y < w.size(); ++y) {
    if (w[y] == 0) continue;
    labels.push_back(pi.codomain[y]);
    weights.push_back(w[y]);
  }
  return FinProbSpace(std::move(labels), std::move(weights));
}

std::vector<std::optional<Rational>> cond_exp(const FinProbSpace& mu, const RationalFn& f, const MeasurableMap& pi) {
  if (static_cast<int>(f.size()) != mu.size()) throw PreconditionError("function and space differ in size");
  auto w = pushed(mu, pi);
  std::vector<Rational> num(w.size());
  for (int x = 0; x < mu.size(); ++x) num[static_cast<std::size_t>(pi(x))] += f[static_cast<std::size_t>(x)] * mu.weight(x);
  std::vector<std::optional<Rational>> out(w.size());
  for (std::size_t y = 0; y < w.size(); ++y)
    if (w[y] != 0) out[y] = num[y] / w[y];
  return out;
}

Rational pair(const RationalFn& phi, const FinProbSpace& mu) {
  if (static_cast<int>(phi.size()) != mu.size()) throw PreconditionError("function and measure live on different ground sets");
  Rational s = 0;
  for (int x = 0; x < mu.size(); ++x) s += phi[static_cast<std::size_t>(x)] * mu.weight(x);
  return s;
}

FiberSpace make_fiber_space(MeasurableMap pi_x, MeasurableMap pi_y) {
  if (pi_x.codomain != pi_y.codomain) throw PreconditionError("fiber maps have different codomains");
  FiberSpace fib{std::move(pi_x), std::move(pi_y), {}};
  for (std::size_t x = 0; x < fib.pi_x.image.size(); ++x)
    for (std::size_t y = 0; y < fib.pi_y.image.size(); ++y)
      if (fib.pi_x.image[x] == fib.pi_y.image[y]) fib.points.emplace_back(static_cast<int>(x), static_cast<int>(y));
  return fib;
}

namespace {

std::vector<Rational> common_image(const FinProbSpace& mu, const FinProbSpace& nu, const FiberSpace& fib) {
  auto eta = pushed(mu, fib.pi_x);
  auto eta_y = pushed(nu, fib.pi_y);
  for (std::size_t z = 0; z < eta.size(); ++z)
    if (eta[z] != eta_y[z])
      throw PreconditionError("image measures differ at '" + fib.pi_x.codomain[z] + "': " + to_string(eta[z]) +
                              " vs " + to_string(eta_y[z]));
  return eta;
}

}  // namespace

FinProbSpace fiber_product(const FinProbSpace& mu, const FinProbSpace& nu, const FiberSpace& fib) {
  auto eta = common_image(mu, nu, fib);
  std::vector<std::string> labels;
  std::vector<Rational> weights;
  for (auto [x, y] : fib.points) {
    labels.push_back("(" + mu.label(x) + "," + nu.label(y) + ")");
    weights.push_back(mu.weight(x) * nu.weight(y) / eta[static_cast<std::size_t>(fib.pi_x(x))]);
  }
  return FinProbSpace(std::move(labels), std::move(weights));
}

Rational rectangle_mass(const FinProbSpace& mu, const FinProbSpace& nu, const FiberSpace& fib,
                        const std::vector<int>& a, const std::vector<int>& b, int formula) {
  auto eta = common_image(mu, nu, fib);
  RationalFn in_a(static_cast<std::size_t>(mu.size())), in_b(static_cast<std::size_t>(nu.size()));
  for (int x : a) in_a.at(static_cast<std::size_t>(x)) = 1;
  for (int y : b) in_b.at(static_cast<std::size_t>(y)) = 1;
  auto pa = cond_exp(mu, in_a, fib.pi_x);
  auto pb = cond_exp(nu, in_b, fib.pi_y);
  Rational s = 0;
  switch (formula) {
    case 0:
      for (std::size_t z = 0; z < eta.size(); ++z)
        if (eta[z] != 0) s += *pa[z] * *pb[z] * eta[z];
      return s;
    case 1:
      for (int x : a) s += *pb[static_cast<std::size_t>(fib.pi_x(x))] * mu.weight(x);
      return s;
    case 2:
      for (int y : b) s += *pa[static_cast<std::size_t>(fib.pi_y(y))] * nu.weight(y);
      return s;
  }
  throw PreconditionError("rectangle formula must be 0, 1 or 2");
}

std::vector<Rational> fiber_marginal(const FinProbSpace& product, const FiberSpace& fib, int side, int factor_size) {
  std::vector<Rational> out(static_cast<std::size_t>(factor_size));
  for (int i = 0; i < fib.size(); ++i) {
    auto [x, y] = fib.points[static_cast<std::size_t>(i)];
    out.at(static_cast<std::size_t>(side == 0 ? x : y)) += product.weight(i);
  }
  return out;
}

}  // namespace randlab
