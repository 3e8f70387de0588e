#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "randlab/error.hpp"

namespace randlab::detail {

enum class Tok { kIdent, kInt, kSym, kPunct, kEnd };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

// Identifiers [A-Za-z_][A-Za-z0-9_]*, integers, symbolic relation names built
// from "<>+*^%" (optionally ending in '='), and punctuation including the
// multi-character "<->", "->", "!=" and "-.".
std::vector<Token> tokenize(std::string_view text);

class TokenStream {
 public:
  explicit TokenStream(std::string_view text) : tokens_(tokenize(text)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = index_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (index_ + 1 < tokens_.size()) ++index_;
    return t;
  }
  bool at_end() const { return peek().kind == Tok::kEnd; }

  bool is(std::string_view punct, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return (t.kind == Tok::kPunct || t.kind == Tok::kSym) && t.text == punct;
  }
  bool is_word(std::string_view word, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::kIdent && t.text == word;
  }
  bool accept(std::string_view punct) {
    if (!is(punct)) return false;
    next();
    return true;
  }
  void expect(std::string_view punct) {
    if (!accept(punct)) fail("expected '" + std::string(punct) + "'");
  }
  void expect_word(std::string_view word) {
    if (!is_word(word)) fail("expected '" + std::string(word) + "'");
    next();
  }
  std::string expect_ident() {
    if (peek().kind != Tok::kIdent) fail("expected identifier");
    return next().text;
  }
  long long expect_int() {
    if (peek().kind != Tok::kInt) fail("expected integer");
    return std::stoll(next().text);
  }

  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::kEnd ? "end of input" : "'" + t.text + "'";
    throw ParseError(message + ", found " + found, t.pos);
  }

  std::size_t mark() const { return index_; }
  void reset(std::size_t mark) { index_ = mark; }

 private:
  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

}  // namespace randlab::detail
