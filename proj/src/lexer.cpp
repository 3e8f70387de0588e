#include "lexer.hpp"

#include <cctype>

namespace randlab::detail {

namespace {

bool is_sym_char(char c) {
  return c == '<' || c == '>' || c == '+' || c == '*' || c == '^' || c == '%';
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto starts = [&](std::string_view s) { return text.substr(i, s.size()) == s; };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      out.push_back({Tok::kIdent, std::string(text.substr(start, i - start)), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back({Tok::kInt, std::string(text.substr(start, i - start)), start});
      continue;
    }
    bool matched = false;
    for (std::string_view p : {"<->", "->", "!=", "-."}) {
      if (starts(p)) {
        out.push_back({Tok::kPunct, std::string(p), start});
        i += p.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (is_sym_char(c)) {
      while (i < text.size() && is_sym_char(text[i])) ++i;
      if (i < text.size() && text[i] == '=') ++i;
      out.push_back({Tok::kSym, std::string(text.substr(start, i - start)), start});
      continue;
    }
    static constexpr std::string_view kPunct = "()[]{},;:=!&|#/~.-";
    if (kPunct.find(c) != std::string_view::npos) {
      out.push_back({Tok::kPunct, std::string(1, c), start});
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }
  out.push_back({Tok::kEnd, "", text.size()});
  return out;
}

}  // namespace randlab::detail
