#include "lexer.hpp"

#include <array>
#include <cctype>

namespace plancheck::detail {

namespace {

constexpr std::array<std::string_view, 16> kReserved = {
    "MODULE", "main", "VAR", "ASSIGN", "LTLSPEC", "init", "next", "case",
    "esac",   "boolean", "TRUE", "FALSE", "X", "F", "G", "U"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

bool is_reserved_word(std::string_view word) {
  for (auto r : kReserved) {
    if (r == word) return true;
  }
  return false;
}

SourcePos position_at(std::string_view text, std::size_t offset) {
  SourcePos pos;
  pos.offset = offset > text.size() ? text.size() : offset;
  for (std::size_t i = 0; i < pos.offset; ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  SourcePos pos;
  std::size_t i = 0;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
      pos.offset = i + 1;
    }
  };

  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    const SourcePos start = pos;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      tokens.push_back({TokenKind::Ident, std::string(text.substr(i, j - i)), start});
      advance(j - i);
      continue;
    }
    if (c == ':' && i + 1 < text.size() && text[i + 1] == '=') {
      tokens.push_back({TokenKind::Symbol, ":=", start});
      advance(2);
      continue;
    }
    switch (c) {
      case ':': case ';': case '(': case ')': case '{': case '}':
      case ',': case '!': case '&': case '|': case '=':
        tokens.push_back({TokenKind::Symbol, std::string(1, c), start});
        advance(1);
        continue;
      default:
        break;
    }
    std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "\\x" + [&] {
      static constexpr char kHex[] = "0123456789abcdef";
      const auto u = static_cast<unsigned char>(c);
      return std::string{kHex[u >> 4], kHex[u & 15]};
    }();
    throw ParseError("unexpected character '" + shown + "'", start);
  }
  tokens.push_back({TokenKind::End, "", pos});
  return tokens;
}

}  // namespace plancheck::detail
