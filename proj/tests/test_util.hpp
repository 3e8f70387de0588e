#pragma once

#include <random>
#include <string>
#include <vector>

#include "randlab/measure.hpp"

namespace testing_util {

using randlab::Rational;

inline Rational random_rational(std::mt19937& rng, int lo, int hi, int max_den) {
  std::uniform_int_distribution<int> den(1, max_den);
  int d = den(rng);
  std::uniform_int_distribution<int> num(lo * d, hi * d);
  return Rational(num(rng), d);
}

// Strictly positive weights summing to 1.
inline std::vector<Rational> random_weights(std::mt19937& rng, int n, int grain = 6) {
  std::uniform_int_distribution<int> part(1, grain);
  std::vector<Rational> w;
  int total = 0;
  for (int i = 0; i < n; ++i) {
    w.emplace_back(part(rng));
    total += static_cast<int>(w.back().convert_to<int>());
  }
  for (auto& v : w) v /= total;
  return w;
}

inline randlab::FinProbSpace random_space(std::mt19937& rng, int n, const std::string& prefix = "w") {
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
  return randlab::FinProbSpace(labels, random_weights(rng, n));
}

}  // namespace testing_util
