#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "randlab/measure.hpp"
#include "randlab/randomization.hpp"
#include "randlab/rtype.hpp"

namespace randlab {

// Named objects for the command line tool. The text form is one declaration
// per line, plus `structure` blocks in their own format:
//
//   space S = { a: 1/2, b: 1/3, c: 1/6 }       (also `dyadic 3`, `uniform 4`)
//   rand r = m2 over S
//   rand t = S family [m2, c3x, m2]
//   element f = [0, 1, 1]
//   event E = [0, 2]
//   measure nu = c3 types 1 params 1 rtype { q0: 1/2, q1: 1/2 }
//   map pi = [0, 0, 1] into {z0, z1}
//
// Lines starting with `//` or `#` are comments. Structure names that are not
// declared resolve to the builtin library.
class Workspace {
 public:
  struct RandEntry {
    std::string space;
    std::vector<std::string> family;
    Randomization rand;
  };
  struct MeasureEntry {
    std::string structure;
    int arity = 0;
    RMeasure measure;
  };

  StructurePtr structure(const std::string& name) const;
  const FinProbSpace& space(const std::string& name) const;
  const Randomization& rand(const std::string& name) const;
  const RandEntry& rand_entry(const std::string& name) const;
  const RandomElement& element(const std::string& name) const;
  // The event as a bitset over `size` points.
  Event event(const std::string& name, int size) const;
  const MeasureEntry& measure(const std::string& name) const;
  const MeasurableMap& map(const std::string& name) const;

  // Each throws PreconditionError when the name is taken by any object.
  void add_structure(StructurePtr m);
  void add_space(const std::string& name, FinProbSpace space);
  void add_rand(const std::string& name, const std::string& space, std::vector<std::string> family);
  void add_element(const std::string& name, RandomElement f);
  void add_event(const std::string& name, std::vector<int> points);
  void add_measure(const std::string& name, const std::string& structure, int arity, RMeasure nu);
  void add_map(const std::string& name, MeasurableMap pi);

  bool empty() const { return order_.empty(); }
  const std::vector<std::string>& names() const { return order_; }

  bool operator==(const Workspace& other) const { return save() == other.save(); }

  std::string save() const;

 private:
  void claim(const std::string& name);

  std::vector<std::string> order_;
  std::map<std::string, StructurePtr> structures_;
  std::map<std::string, FinProbSpace> spaces_;
  std::map<std::string, RandEntry> rands_;
  std::map<std::string, RandomElement> elements_;
  std::map<std::string, std::vector<int>> events_;
  std::map<std::string, MeasureEntry> measures_;
  std::map<std::string, MeasurableMap> maps_;
};

// ParseError (with the offset into text) on malformed input,
// ResolutionError on references to undeclared objects.
Workspace load_workspace(std::string_view text);

std::string print_space(const FinProbSpace& space);
FinProbSpace parse_space(std::string_view text);

}  // namespace randlab
