#include <algorithm>
#include <map>

#include "randlab/type_space.hpp"

namespace randlab {

namespace {

// Relations and function graphs viewed uniformly as tuple predicates.
struct Predicate {
  const FinStructure* m;
  bool function;
  int index;
  int arity;

  bool holds(std::span<const Element> t) const {
    if (!function) return m->holds(index, t);
    return m->apply(index, t.first(t.size() - 1)) == t.back();
  }
};

std::vector<Predicate> predicates(const FinStructure& m) {
  std::vector<Predicate> out;
  const auto& sig = m.signature();
  for (std::size_t r = 0; r < sig.relations().size(); ++r)
    out.push_back({&m, false, static_cast<int>(r), sig.relations()[r].arity});
  for (std::size_t f = 0; f < sig.functions().size(); ++f)
    out.push_back({&m, true, static_cast<int>(f), sig.functions()[f].arity + 1});
  return out;
}

template <typename Key>
std::vector<int> compress(const std::vector<Key>& keys) {
  std::map<Key, int> ids;
  for (const auto& k : keys) ids.emplace(k, 0);
  int next = 0;
  for (auto& [k, id] : ids) id = next++;
  std::vector<int> out;
  for (const auto& k : keys) out.push_back(ids[k]);
  return out;
}

std::vector<int> refined_colors(const FinStructure& m, std::span<const Element> fix,
                                const std::vector<Predicate>& preds,
                                const std::vector<std::vector<Tuple>>& holding) {
  const int n = m.size();
  std::vector<std::vector<int>> init(static_cast<std::size_t>(n));
  for (Element a = 0; a < n; ++a) {
    auto& key = init[static_cast<std::size_t>(a)];
    auto it = std::find(fix.begin(), fix.end(), a);
    key.push_back(it == fix.end() ? -1 : static_cast<int>(it - fix.begin()));
    for (std::size_t c = 0; c < m.signature().constants().size(); ++c)
      key.push_back(m.constant(static_cast<int>(c)) == a);
  }
  std::vector<int> color = compress(init);
  int classes = *std::max_element(color.begin(), color.end()) + 1;
  while (true) {
    std::vector<std::pair<int, std::vector<std::vector<int>>>> keys(static_cast<std::size_t>(n));
    for (Element a = 0; a < n; ++a) keys[static_cast<std::size_t>(a)].first = color[static_cast<std::size_t>(a)];
    for (std::size_t p = 0; p < preds.size(); ++p) {
      for (const auto& t : holding[p]) {
        std::vector<int> colored{static_cast<int>(p)};
        for (Element e : t) colored.push_back(color[static_cast<std::size_t>(e)]);
        for (std::size_t i = 0; i < t.size(); ++i) {
          auto inc = colored;
          inc.push_back(static_cast<int>(i));
          keys[static_cast<std::size_t>(t[i])].second.push_back(std::move(inc));
        }
      }
    }
    for (auto& k : keys) std::sort(k.second.begin(), k.second.end());
    std::vector<int> next = compress(keys);
    int next_classes = *std::max_element(next.begin(), next.end()) + 1;
    color = std::move(next);
    if (next_classes == classes) break;
    classes = next_classes;
  }
  return color;
}

}  // namespace

std::vector<Permutation> automorphisms(const FinStructure& m, std::span<const Element> fix) {
  const int n = m.size();
  auto preds = predicates(m);
  std::vector<std::vector<Tuple>> holding;
  for (const auto& p : preds) {
    std::vector<Tuple> h;
    for (auto& t : all_tuples(n, p.arity))
      if (p.holds(t)) h.push_back(std::move(t));
    holding.push_back(std::move(h));
  }
  std::vector<int> color = refined_colors(m, fix, preds, holding);

  // checks[a]: predicate tuples whose largest entry is a.
  std::vector<std::vector<std::pair<int, Tuple>>> checks(static_cast<std::size_t>(n));
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (preds[p].arity == 0) continue;
    for (auto& t : all_tuples(n, preds[p].arity)) {
      Element top = *std::max_element(t.begin(), t.end());
      checks[static_cast<std::size_t>(top)].emplace_back(static_cast<int>(p), std::move(t));
    }
  }

  std::vector<Permutation> out;
  Permutation sigma(static_cast<std::size_t>(n), -1);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  Tuple image;
  auto consistent = [&](Element a) {
    for (const auto& [p, t] : checks[static_cast<std::size_t>(a)]) {
      image.resize(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) image[i] = sigma[static_cast<std::size_t>(t[i])];
      if (preds[static_cast<std::size_t>(p)].holds(t) != preds[static_cast<std::size_t>(p)].holds(image))
        return false;
    }
    return true;
  };
  auto search = [&](auto&& self, Element a) -> void {
    if (a == n) {
      out.push_back(sigma);
      return;
    }
    for (Element b = 0; b < n; ++b) {
      if (used[static_cast<std::size_t>(b)] || color[static_cast<std::size_t>(b)] != color[static_cast<std::size_t>(a)])
        continue;
      sigma[static_cast<std::size_t>(a)] = b;
      used[static_cast<std::size_t>(b)] = 1;
      if (consistent(a)) self(self, a + 1);
      used[static_cast<std::size_t>(b)] = 0;
    }
    sigma[static_cast<std::size_t>(a)] = -1;
  };
  search(search, 0);
  return out;
}

}  // namespace randlab
