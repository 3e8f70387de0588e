#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace randlab {

using Element = int;
using Tuple = std::vector<Element>;

enum class SymbolKind { kRelation, kFunction, kConstant };

struct Symbol {
  std::string name;
  int arity = 0;
};

struct SymbolRef {
  SymbolKind kind;
  int index;
};

// Relation, function and constant symbols. Names are unique across kinds.
class Signature {
 public:
  int add_relation(std::string name, int arity);
  int add_function(std::string name, int arity);
  int add_constant(std::string name);

  std::optional<SymbolRef> find(std::string_view name) const;

  const std::vector<Symbol>& relations() const { return relations_; }
  const std::vector<Symbol>& functions() const { return functions_; }
  const std::vector<Symbol>& constants() const { return constants_; }

  bool operator==(const Signature& other) const;

 private:
  void check_fresh(const std::string& name, int arity) const;

  std::vector<Symbol> relations_;
  std::vector<Symbol> functions_;
  std::vector<Symbol> constants_;
};

bool operator==(const Symbol& a, const Symbol& b);

// Finite L-structure with universe {0, ..., size-1}. Immutable once built.
class FinStructure {
 public:
  FinStructure(std::string name, std::shared_ptr<const Signature> signature, int size);

  const std::string& name() const { return name_; }
  const Signature& signature() const { return *signature_; }
  const std::shared_ptr<const Signature>& signature_ptr() const { return signature_; }
  int size() const { return size_; }

  bool holds(int relation, std::span<const Element> args) const;
  Element apply(int function, std::span<const Element> args) const;
  Element constant(int index) const { return constants_[static_cast<std::size_t>(index)]; }

  void set_relation(int relation, std::span<const Element> args, bool value = true);
  void set_function(int function, std::span<const Element> args, Element value);
  void set_constant(int index, Element value);

  // Throws PreconditionError unless every function is total, constants are in
  // range and the universe has at least two elements.
  void validate() const;

  std::vector<Tuple> relation_tuples(int relation) const;

  // Flat index of a tuple in mixed radix `size`.
  std::size_t encode(std::span<const Element> args) const;

 private:
  std::string name_;
  std::shared_ptr<const Signature> signature_;
  int size_;
  std::vector<std::vector<char>> relations_;
  std::vector<std::vector<Element>> functions_;
  std::vector<Element> constants_;
};

using StructurePtr = std::shared_ptr<const FinStructure>;

// Canonical text form, parseable by parse_structure.
std::string print_structure(const FinStructure& m);

// `structure <name> { universe = n; relation R/k = {(..),..}; function f/k =
// {(..)->v,..}; constant c = i; }`
FinStructure parse_structure(std::string_view text);

// All structures in a text holding several `structure` blocks.
std::vector<FinStructure> parse_structures(std::string_view text);

// Small library of named structures used throughout the tests and the CLI:
// "m2" (pure equality, 2 elements), "c3" (directed 3-cycle E), "l3" (linear
// order <), plus "m3" and "c4", "c5" variants.
StructurePtr builtin_structure(std::string_view name);

// Enumerates all tuples of the given length over {0..size-1} in lex order.
std::vector<Tuple> all_tuples(int size, int length);

}  // namespace randlab
