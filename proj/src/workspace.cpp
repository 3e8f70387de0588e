#include "randlab/workspace.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "randlab/error.hpp"

namespace randlab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

// The items of a bracketed list "[a, b, c]" or "{a, b}".
std::vector<std::string> list_items(std::string_view text, char open, char close, std::size_t pos) {
  text = trim(text);
  if (text.size() < 2 || text.front() != open || text.back() != close)
    throw ParseError(std::string("expected a list in '") + open + close + "'", pos);
  std::vector<std::string> out;
  auto body = trim(text.substr(1, text.size() - 2));
  if (body.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto comma = body.find(',', start);
    auto item = trim(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (item.empty()) throw ParseError("empty list item", pos);
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

int to_int(const std::string& s, std::size_t pos) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw ParseError("expected a nonnegative integer, found '" + s + "'", pos);
  return std::stoi(s);
}

std::vector<int> int_list(std::string_view text, std::size_t pos) {
  std::vector<int> out;
  for (const auto& item : list_items(text, '[', ']', pos)) out.push_back(to_int(item, pos));
  return out;
}

}  // namespace

std::string print_space(const FinProbSpace& space) {
  std::string out = "{";
  for (int i = 0; i < space.size(); ++i) out += std::string(i ? ", " : " ") + space.label(i) + ": " + to_string(space.weight(i));
  return out + " }";
}

FinProbSpace parse_space(std::string_view text) {
  text = trim(text);
  auto words = std::string(text);
  std::istringstream in(words);
  std::string head;
  in >> head;
  if (head == "dyadic" || head == "uniform") {
    std::string n;
    in >> n;
    int k = to_int(n, 0);
    if (head == "dyadic" && k > 20) throw PreconditionError("dyadic depth " + n + " is too large");
    if (head == "uniform" && k < 1) throw PreconditionError("a space needs a point");
    return head == "dyadic" ? FinProbSpace::dyadic(k) : FinProbSpace::uniform(k);
  }
  std::vector<std::string> labels;
  std::vector<Rational> weights;
  for (const auto& item : list_items(text, '{', '}', 0)) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'label: weight', found '" + item + "'", 0);
    labels.emplace_back(trim(std::string_view(item).substr(0, colon)));
    try {
      weights.push_back(parse_rational(item.substr(colon + 1)));
    } catch (const Error&) {
      throw ParseError("bad weight in '" + item + "'", 0);
    }
  }
  return FinProbSpace(std::move(labels), std::move(weights));
}

void Workspace::claim(const std::string& name) {
  if (std::find(order_.begin(), order_.end(), name) != order_.end())
    throw PreconditionError("the name " + name + " is already taken");
  order_.push_back(name);
}

StructurePtr Workspace::structure(const std::string& name) const {
  if (auto it = structures_.find(name); it != structures_.end()) return it->second;
  try {
    return builtin_structure(name);
  } catch (const Error&) {
    throw ResolutionError("no structure named " + name);
  }
}

const FinProbSpace& Workspace::space(const std::string& name) const {
  auto it = spaces_.find(name);
  if (it == spaces_.end()) throw ResolutionError("no space named " + name);
  return it->second;
}

const Workspace::RandEntry& Workspace::rand_entry(const std::string& name) const {
  auto it = rands_.find(name);
  if (it == rands_.end()) throw ResolutionError("no randomization named " + name);
  return it->second;
}

const Randomization& Workspace::rand(const std::string& name) const { return rand_entry(name).rand; }

const RandomElement& Workspace::element(const std::string& name) const {
  auto it = elements_.find(name);
  if (it == elements_.end()) throw ResolutionError("no element named " + name);
  return it->second;
}

Event Workspace::event(const std::string& name, int size) const {
  auto it = events_.find(name);
  if (it == events_.end()) throw ResolutionError("no event named " + name);
  Event e(static_cast<std::size_t>(size));
  for (int w : it->second) {
    if (w < 0 || w >= size)
      throw PreconditionError("event " + name + " names point " + std::to_string(w) + " of a " + std::to_string(size) + "-point base");
    e.set(static_cast<std::size_t>(w));
  }
  return e;
}

const Workspace::MeasureEntry& Workspace::measure(const std::string& name) const {
  auto it = measures_.find(name);
  if (it == measures_.end()) throw ResolutionError("no measure named " + name);
  return it->second;
}

const MeasurableMap& Workspace::map(const std::string& name) const {
  auto it = maps_.find(name);
  if (it == maps_.end()) throw ResolutionError("no map named " + name);
  return it->second;
}

void Workspace::add_structure(StructurePtr m) {
  claim(m->name());
  structures_.emplace(m->name(), std::move(m));
}

void Workspace::add_space(const std::string& name, FinProbSpace space) {
  claim(name);
  spaces_.emplace(name, std::move(space));
}

void Workspace::add_rand(const std::string& name, const std::string& space, std::vector<std::string> family) {
  const auto& base = this->space(space);
  std::vector<StructurePtr> ms;
  for (const auto& s : family) ms.push_back(structure(s));
  if (family.size() == 1) ms.assign(static_cast<std::size_t>(base.size()), ms.front());
  Randomization r(base, ms);
  claim(name);
  rands_.emplace(name, RandEntry{space, std::move(family), std::move(r)});
}

void Workspace::add_element(const std::string& name, RandomElement f) {
  claim(name);
  elements_.emplace(name, std::move(f));
}

void Workspace::add_event(const std::string& name, std::vector<int> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  claim(name);
  events_.emplace(name, std::move(points));
}

void Workspace::add_measure(const std::string& name, const std::string& structure, int arity, RMeasure nu) {
  claim(name);
  measures_.emplace(name, MeasureEntry{structure, arity, std::move(nu)});
}

void Workspace::add_map(const std::string& name, MeasurableMap pi) {
  for (int v : pi.image)
    if (v < 0 || v >= static_cast<int>(pi.codomain.size())) throw PreconditionError("map " + name + " leaves its codomain");
  claim(name);
  maps_.emplace(name, std::move(pi));
}

std::string Workspace::save() const {
  std::string out;
  for (const auto& name : order_) {
    if (auto s = structures_.find(name); s != structures_.end()) {
      out += print_structure(*s->second);
    } else if (auto p = spaces_.find(name); p != spaces_.end()) {
      out += "space " + name + " = " + print_space(p->second) + "\n";
    } else if (auto r = rands_.find(name); r != rands_.end()) {
      const auto& e = r->second;
      if (e.family.size() == 1)
        out += "rand " + name + " = " + e.family.front() + " over " + e.space + "\n";
      else
        out += "rand " + name + " = " + e.space + " family [" + join(e.family, ", ") + "]\n";
    } else if (auto f = elements_.find(name); f != elements_.end()) {
      out += "element " + name + " = " + print_element(f->second) + "\n";
    } else if (auto v = events_.find(name); v != events_.end()) {
      std::vector<std::string> items;
      for (int w : v->second) items.push_back(std::to_string(w));
      out += "event " + name + " = [" + join(items, ", ") + "]\n";
    } else if (auto m = measures_.find(name); m != measures_.end()) {
      const auto& e = m->second;
      out += "measure " + name + " = " + e.structure + " types " + std::to_string(e.arity) + " params " +
             std::to_string(e.measure.param_count()) + " " + print_rmeasure(e.measure) + "\n";
    } else if (auto pi = maps_.find(name); pi != maps_.end()) {
      std::vector<std::string> items;
      for (int x : pi->second.image) items.push_back(std::to_string(x));
      out += "map " + name + " = [" + join(items, ", ") + "] into {" + join(pi->second.codomain, ", ") + "}\n";
    }
  }
  return out;
}

Workspace load_workspace(std::string_view text) {
  Workspace ws;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = trim(text.substr(pos, eol - pos));
    std::size_t here = pos;
    if (line.empty() || line.starts_with("//") || line.starts_with("#")) {
      pos = eol + 1;
      continue;
    }
    if (line.starts_with("structure")) {
      // The block runs to its matching brace.
      auto open = text.find('{', pos);
      if (open == std::string_view::npos) throw ParseError("structure without a body", here);
      int depth = 0;
      std::size_t end = open;
      for (; end < text.size(); ++end) {
        if (text[end] == '{') ++depth;
        if (text[end] == '}' && --depth == 0) break;
      }
      if (end == text.size()) throw ParseError("unterminated structure block", here);
      try {
        ws.add_structure(std::make_shared<const FinStructure>(parse_structure(text.substr(pos, end + 1 - pos))));
      } catch (const ParseError& e) {
        throw ParseError(e.what(), here + e.position());
      }
      pos = end + 1;
      continue;
    }
    pos = eol + 1;
    std::istringstream in{std::string(line)};
    std::string kind, name, eq;
    in >> kind >> name >> eq;
    if (eq != "=") throw ParseError("expected '<kind> <name> = <value>'", here);
    std::string rest;
    std::getline(in, rest);
    std::string_view value = trim(rest);
    if (kind == "space") {
      try {
        ws.add_space(name, parse_space(value));
      } catch (const ParseError& e) {
        throw ParseError(e.what(), here);
      }
    } else if (kind == "rand") {
      std::istringstream v{std::string(value)};
      std::string first, word;
      v >> first >> word;
      std::string tail;
      std::getline(v, tail);
      if (word == "over") {
        ws.add_rand(name, std::string(trim(tail)), {first});
      } else if (word == "family") {
        ws.add_rand(name, first, list_items(tail, '[', ']', here));
      } else {
        throw ParseError("expected '<structure> over <space>' or '<space> family [...]'", here);
      }
    } else if (kind == "element") {
      ws.add_element(name, int_list(value, here));
    } else if (kind == "event") {
      ws.add_event(name, int_list(value, here));
    } else if (kind == "measure") {
      std::istringstream v{std::string(value)};
      std::string structure, types, arity, params, count;
      v >> structure >> types >> arity >> params >> count;
      if (types != "types" || params != "params") throw ParseError("expected '<structure> types <n> params <k> rtype {...}'", here);
      int n = to_int(arity, here), k = to_int(count, here);
      std::string tail;
      std::getline(v, tail);
      auto space = type_space(ws.structure(structure), n + k);
      try {
        ws.add_measure(name, structure, n, parse_rmeasure(trim(tail), space, k));
      } catch (const ParseError& e) {
        throw ParseError(e.what(), here);
      }
    } else if (kind == "map") {
      auto into = value.find("into");
      if (into == std::string_view::npos) throw ParseError("expected '[...] into {...}'", here);
      MeasurableMap pi;
      for (int x : int_list(value.substr(0, into), here)) pi.image.push_back(x);
      pi.codomain = list_items(value.substr(into + 4), '{', '}', here);
      ws.add_map(name, std::move(pi));
    } else {
      throw ParseError("unknown declaration '" + kind + "'", here);
    }
  }
  return ws;
}

}  // namespace randlab
