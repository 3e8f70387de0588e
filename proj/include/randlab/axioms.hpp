#pragma once

#include <string>
#include <vector>

#include "randlab/randomization.hpp"

namespace randlab {

struct AxiomFinding {
  std::string axiom;
  bool pass = true;
  bool exact = true;  // false only for the atomless defect
  std::string detail;
};

struct AxiomReport {
  std::vector<AxiomFinding> findings;
  Rational atomless_defect;
  Rational atomless_threshold;  // half the least atom
  bool atomless_exhaustive = false;

  // Every exact group passed.
  bool exact_pass() const;
  bool all_pass() const;
  const AxiomFinding& find(const std::string& axiom) const;
};

struct AxiomOptions {
  std::size_t samples = 48;  // random tuples or events per identity
  unsigned seed = 1;
  // Empty lists select the shipped corpora for the signature.
  std::vector<Formula> corpus;
  std::vector<Formula> valid;
  std::vector<Formula> sentences;
};

// Groups, in order: validity, boolean-algebra, boolean-connectives, distance,
// fullness, event, measure, atomless, transfer. Validity is checked on a
// corpus of valid formulas only.
AxiomReport check_axioms(const Randomization& r, const AxiomOptions& options = {});

// max over U of min over V inside U of |mu(V) - mu(U)/2|, by enumeration.
// Requires at most 16 points.
Rational atomless_defect_exhaustive(const FinProbSpace& base);
// The same value in closed form: half the largest atom.
Rational atomless_defect_closed(const FinProbSpace& base);

// One line per group: "PASS <axiom>: <detail>".
std::string print_report(const AxiomReport& report);

}  // namespace randlab
