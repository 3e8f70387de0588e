#include "randlab/structure.hpp"

#include <algorithm>
#include <sstream>

#include "lexer.hpp"
#include "randlab/error.hpp"

namespace randlab {

bool operator==(const Symbol& a, const Symbol& b) { return a.name == b.name && a.arity == b.arity; }

void Signature::check_fresh(const std::string& name, int arity) const {
  if (find(name)) throw PreconditionError("duplicate symbol '" + name + "'");
  if (arity < 0) throw PreconditionError("negative arity for '" + name + "'");
}

int Signature::add_relation(std::string name, int arity) {
  check_fresh(name, arity);
  relations_.push_back({std::move(name), arity});
  return static_cast<int>(relations_.size()) - 1;
}

int Signature::add_function(std::string name, int arity) {
  check_fresh(name, arity);
  functions_.push_back({std::move(name), arity});
  return static_cast<int>(functions_.size()) - 1;
}

int Signature::add_constant(std::string name) {
  check_fresh(name, 0);
  constants_.push_back({std::move(name), 0});
  return static_cast<int>(constants_.size()) - 1;
}

std::optional<SymbolRef> Signature::find(std::string_view name) const {
  auto search = [&](const std::vector<Symbol>& v, SymbolKind kind) -> std::optional<SymbolRef> {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i].name == name) return SymbolRef{kind, static_cast<int>(i)};
    return std::nullopt;
  };
  if (auto r = search(relations_, SymbolKind::kRelation)) return r;
  if (auto r = search(functions_, SymbolKind::kFunction)) return r;
  return search(constants_, SymbolKind::kConstant);
}

bool Signature::operator==(const Signature& other) const {
  return relations_ == other.relations_ && functions_ == other.functions_ &&
         constants_ == other.constants_;
}

namespace {

std::size_t power(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

}  // namespace

FinStructure::FinStructure(std::string name, std::shared_ptr<const Signature> signature, int size)
    : name_(std::move(name)), signature_(std::move(signature)), size_(size) {
  if (size_ < 1) throw PreconditionError("universe must be non-empty");
  for (const auto& r : signature_->relations()) relations_.emplace_back(power(size_, r.arity), 0);
  for (const auto& f : signature_->functions()) functions_.emplace_back(power(size_, f.arity), -1);
  constants_.assign(signature_->constants().size(), -1);
}

std::size_t FinStructure::encode(std::span<const Element> args) const {
  std::size_t code = 0;
  for (Element a : args) {
    if (a < 0 || a >= size_) throw PreconditionError("element " + std::to_string(a) + " out of range");
    code = code * static_cast<std::size_t>(size_) + static_cast<std::size_t>(a);
  }
  return code;
}

bool FinStructure::holds(int relation, std::span<const Element> args) const {
  return relations_[static_cast<std::size_t>(relation)][encode(args)] != 0;
}

Element FinStructure::apply(int function, std::span<const Element> args) const {
  return functions_[static_cast<std::size_t>(function)][encode(args)];
}

void FinStructure::set_relation(int relation, std::span<const Element> args, bool value) {
  const auto& sym = signature_->relations().at(static_cast<std::size_t>(relation));
  if (static_cast<int>(args.size()) != sym.arity)
    throw ArityError("relation '" + sym.name + "' expects " + std::to_string(sym.arity) + " arguments");
  relations_[static_cast<std::size_t>(relation)][encode(args)] = value ? 1 : 0;
}

void FinStructure::set_function(int function, std::span<const Element> args, Element value) {
  const auto& sym = signature_->functions().at(static_cast<std::size_t>(function));
  if (static_cast<int>(args.size()) != sym.arity)
    throw ArityError("function '" + sym.name + "' expects " + std::to_string(sym.arity) + " arguments");
  if (value < 0 || value >= size_) throw PreconditionError("function value out of range");
  functions_[static_cast<std::size_t>(function)][encode(args)] = value;
}

void FinStructure::set_constant(int index, Element value) {
  if (value < 0 || value >= size_) throw PreconditionError("constant out of range");
  constants_.at(static_cast<std::size_t>(index)) = value;
}

void FinStructure::validate() const {
  if (size_ < 2) throw PreconditionError("structure '" + name_ + "' has fewer than two elements");
  for (std::size_t f = 0; f < functions_.size(); ++f)
    if (std::find(functions_[f].begin(), functions_[f].end(), -1) != functions_[f].end())
      throw PreconditionError("function '" + signature_->functions()[f].name + "' is not total");
  for (std::size_t c = 0; c < constants_.size(); ++c)
    if (constants_[c] < 0)
      throw PreconditionError("constant '" + signature_->constants()[c].name + "' is not interpreted");
}

std::vector<Tuple> all_tuples(int size, int length) {
  std::vector<Tuple> out;
  Tuple t(static_cast<std::size_t>(length), 0);
  while (true) {
    out.push_back(t);
    int i = length - 1;
    while (i >= 0 && t[static_cast<std::size_t>(i)] == size - 1) t[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
    ++t[static_cast<std::size_t>(i)];
  }
  return out;
}

std::vector<Tuple> FinStructure::relation_tuples(int relation) const {
  std::vector<Tuple> out;
  int arity = signature_->relations()[static_cast<std::size_t>(relation)].arity;
  for (auto& t : all_tuples(size_, arity))
    if (holds(relation, t)) out.push_back(t);
  return out;
}

std::string print_structure(const FinStructure& m) {
  std::ostringstream os;
  os << "structure " << m.name() << " {\n  universe = " << m.size() << ";\n";
  auto tuple_text = [](const Tuple& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
  };
  const auto& sig = m.signature();
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    os << "  relation " << sig.relations()[r].name << "/" << sig.relations()[r].arity << " = {";
    auto tuples = m.relation_tuples(static_cast<int>(r));
    for (std::size_t i = 0; i < tuples.size(); ++i) os << (i ? "," : "") << tuple_text(tuples[i]);
    os << "};\n";
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    os << "  function " << sig.functions()[f].name << "/" << sig.functions()[f].arity << " = {";
    auto args = all_tuples(m.size(), sig.functions()[f].arity);
    for (std::size_t i = 0; i < args.size(); ++i)
      os << (i ? "," : "") << tuple_text(args[i]) << "->" << m.apply(static_cast<int>(f), args[i]);
    os << "};\n";
  }
  for (std::size_t c = 0; c < sig.constants().size(); ++c)
    os << "  constant " << sig.constants()[c].name << " = " << m.constant(static_cast<int>(c)) << ";\n";
  os << "}\n";
  return os.str();
}

namespace {

struct PendingSymbol {
  SymbolKind kind;
  std::string name;
  int arity;
  std::vector<std::pair<Tuple, Element>> entries;
  Element constant = -1;
};

Tuple parse_tuple(detail::TokenStream& ts) {
  Tuple t;
  ts.expect("(");
  if (!ts.is(")")) {
    do {
      t.push_back(static_cast<Element>(ts.expect_int()));
    } while (ts.accept(","));
  }
  ts.expect(")");
  return t;
}

std::string parse_symbol_name(detail::TokenStream& ts) {
  const auto& t = ts.peek();
  if (t.kind == detail::Tok::kIdent || t.kind == detail::Tok::kSym) return ts.next().text;
  ts.fail("expected symbol name");
}

FinStructure parse_one(detail::TokenStream& ts) {
  ts.expect_word("structure");
  std::string name = ts.expect_ident();
  ts.expect("{");
  int universe = -1;
  std::vector<PendingSymbol> symbols;
  while (!ts.accept("}")) {
    std::string kw = ts.expect_ident();
    if (kw == "universe") {
      ts.expect("=");
      universe = static_cast<int>(ts.expect_int());
    } else if (kw == "relation" || kw == "function") {
      PendingSymbol p;
      p.kind = kw == "relation" ? SymbolKind::kRelation : SymbolKind::kFunction;
      p.name = parse_symbol_name(ts);
      ts.expect("/");
      p.arity = static_cast<int>(ts.expect_int());
      ts.expect("=");
      ts.expect("{");
      if (!ts.is("}")) {
        do {
          std::size_t pos = ts.peek().pos;
          Tuple t = parse_tuple(ts);
          if (static_cast<int>(t.size()) != p.arity)
            throw ArityError("tuple of length " + std::to_string(t.size()) + " for '" + p.name + "/" +
                             std::to_string(p.arity) + "' at position " + std::to_string(pos));
          Element v = 0;
          if (p.kind == SymbolKind::kFunction) {
            ts.expect("->");
            v = static_cast<Element>(ts.expect_int());
          }
          p.entries.emplace_back(std::move(t), v);
        } while (ts.accept(","));
      }
      ts.expect("}");
      symbols.push_back(std::move(p));
    } else if (kw == "constant") {
      PendingSymbol p;
      p.kind = SymbolKind::kConstant;
      p.name = parse_symbol_name(ts);
      p.arity = 0;
      ts.expect("=");
      p.constant = static_cast<Element>(ts.expect_int());
      symbols.push_back(std::move(p));
    } else {
      throw ParseError("unknown structure clause '" + kw + "'", ts.peek().pos);
    }
    ts.expect(";");
  }
  if (universe < 1) throw ParseError("structure '" + name + "' lacks a universe size", ts.peek().pos);
  auto sig = std::make_shared<Signature>();
  for (const auto& p : symbols) {
    if (p.kind == SymbolKind::kRelation) sig->add_relation(p.name, p.arity);
    else if (p.kind == SymbolKind::kFunction) sig->add_function(p.name, p.arity);
    else sig->add_constant(p.name);
  }
  FinStructure m(name, sig, universe);
  int r = 0, f = 0, c = 0;
  for (const auto& p : symbols) {
    if (p.kind == SymbolKind::kRelation) {
      for (const auto& [t, v] : p.entries) m.set_relation(r, t);
      ++r;
    } else if (p.kind == SymbolKind::kFunction) {
      for (const auto& [t, v] : p.entries) m.set_function(f, t, v);
      ++f;
    } else {
      m.set_constant(c++, p.constant);
    }
  }
  m.validate();
  return m;
}

}  // namespace

FinStructure parse_structure(std::string_view text) {
  detail::TokenStream ts(text);
  FinStructure m = parse_one(ts);
  if (!ts.at_end()) ts.fail("trailing input after structure");
  return m;
}

std::vector<FinStructure> parse_structures(std::string_view text) {
  detail::TokenStream ts(text);
  std::vector<FinStructure> out;
  while (!ts.at_end()) out.push_back(parse_one(ts));
  return out;
}

StructurePtr builtin_structure(std::string_view name) {
  static const char* kLibrary[] = {
      "structure m2 { universe = 2; }",
      "structure m3 { universe = 3; }",
      "structure c3 { universe = 3; relation E/2 = {(0,1),(1,2),(2,0)}; }",
      "structure c4 { universe = 4; relation E/2 = {(0,1),(1,2),(2,3),(3,0)}; }",
      "structure c5 { universe = 5; relation E/2 = {(0,1),(1,2),(2,3),(3,4),(4,0)}; }",
      "structure l3 { universe = 3; relation </2 = {(0,1),(0,2),(1,2)}; }",
      "structure p4 { universe = 4; relation E/2 = {(0,1),(1,0),(1,2),(2,1),(2,3),(3,2)}; }",
      "structure s3 { universe = 3; function s/1 = {(0)->1,(1)->2,(2)->0}; constant zero = 0; }",
      "structure u4 { universe = 4; relation P/1 = {(0),(1)}; }",
  };
  for (const char* text : kLibrary) {
    FinStructure m = parse_structure(text);
    if (m.name() == name) return std::make_shared<const FinStructure>(std::move(m));
  }
  throw ResolutionError("no builtin structure named '" + std::string(name) + "'");
}

}  // namespace randlab
